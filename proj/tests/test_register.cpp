#include <gtest/gtest.h>

#include <deque>

#include "stabreg/oracle_node.hpp"
#include "stabreg/register_node.hpp"

namespace stabreg {
namespace {

// Hand-driven network: messages leave outboxes only when a test moves them.
template <class Node>
struct Net {
  std::vector<Node> nodes;
  std::vector<std::optional<Completion<typename Node::StampT>>> done;

  // Moves every queued message from p to q (dropping messages for others
  // when `drop_others`).
  void move(ProcessorId p, ProcessorId q) {
    auto& box = nodes[p].outbox();
    std::deque<typename Node::Msg> keep;
    while (!box.empty()) {
      auto msg = std::move(box.front());
      box.pop_front();
      if (msg.destination != q) {
        keep.push_back(std::move(msg));
        continue;
      }
      if (auto c = nodes[q].deliver(msg)) done[q] = c;
    }
    box = std::move(keep);
  }

  // Delivers everything until all outboxes are empty.
  void settle() {
    for (bool moved = true; moved;) {
      moved = false;
      for (ProcessorId p = 0; p < nodes.size(); ++p) {
        for (ProcessorId q = 0; q < nodes.size(); ++q) {
          if (p == q) continue;
          const bool has = std::any_of(nodes[p].outbox().begin(), nodes[p].outbox().end(),
                                       [&](const auto& m) { return m.destination == q; });
          if (has) {
            move(p, q);
            moved = true;
          }
        }
      }
    }
  }
};

struct Fixture {
  std::shared_ptr<const ProtocolParams> params;
  Label l0;
  Net<RegisterNode> net;

  explicit Fixture(std::size_t n = 3, std::uint64_t r = 8)
      : params(std::make_shared<const ProtocolParams>(ProtocolParams::derive(n, 1, r))),
        l0(next_b({}, params->labels)) {
    for (ProcessorId p = 0; p < n; ++p) {
      net.nodes.emplace_back(p, params, MaxTs{Timestamp{l0, 0}, std::nullopt}, "init");
    }
    net.done.resize(n);
  }

  RegisterNode& node(ProcessorId p) { return net.nodes[p]; }

  Completion<Timestamp> write(const std::string& v) {
    net.done[0].reset();
    node(0).begin_write(v);
    net.settle();
    EXPECT_TRUE(net.done[0].has_value());
    return *net.done[0];
  }

  Completion<Timestamp> read(ProcessorId p) {
    net.done[p].reset();
    node(p).begin_read();
    net.settle();
    EXPECT_TRUE(net.done[p].has_value());
    return *net.done[p];
  }

  // A label incomparable with l0.
  Label stranger() {
    std::mt19937_64 rng(1);
    const std::vector<Label> others{l0};
    return incomparable_family(1, params->labels, rng, others).front();
  }
};

TEST(ProtocolParams, DerivedSizes) {
  const auto p = ProtocolParams::derive(5, 2, 64);
  EXPECT_EQ(p.hidden_epoch_bound(), 170u);
  EXPECT_EQ(p.labels.k, 340u);
  EXPECT_EQ(p.queue_capacity, 340u);
  EXPECT_EQ(p.majority(), 3u);
  const auto small = ProtocolParams::derive(5, 2, 64, 12);
  EXPECT_EQ(small.labels.k, 12u);
  EXPECT_EQ(small.queue_capacity, 12u);
  EXPECT_THROW(ProtocolParams::derive(2, 1, 8), InvalidInput);
  EXPECT_THROW(ProtocolParams::derive(3, 0, 8), InvalidInput);
  EXPECT_THROW(ProtocolParams::derive(3, 1, 0), InvalidInput);
}

TEST(Register, CleanWriteIncrementsAndReachesAll) {
  Fixture f;
  const auto done = f.write("a");
  EXPECT_FALSE(done.aborted);
  EXPECT_EQ(done.stamp, (Timestamp{f.l0, 1}));
  for (ProcessorId p = 1; p < 3; ++p) {
    EXPECT_EQ(f.node(p).max_ts().ml, (Timestamp{f.l0, 1}));
    EXPECT_EQ(f.node(p).value(), "a");
  }
  EXPECT_EQ(f.node(0).writer_stats().epoch_changes, 0u);
}

TEST(Register, OnlyRolesMayInvoke) {
  Fixture f;
  EXPECT_THROW(f.node(1).begin_write("x"), InvalidInput);
  EXPECT_THROW(f.node(0).begin_read(), InvalidInput);
  f.node(0).begin_write("x");
  EXPECT_THROW(f.node(0).begin_write("y"), InvalidInput);
}

TEST(Register, IncomparableEvidenceForcesFreshEpoch) {
  Fixture f;
  const Label other = f.stranger();
  f.node(1).corrupt(MaxTs{Timestamp{f.l0, 0}, Timestamp{other, 3}}, "init");
  f.node(0).begin_write("a");
  // Only processor 1 answers the query, so its evidence is in the quorum.
  f.net.move(0, 1);
  f.net.move(1, 0);
  f.net.settle();
  ASSERT_TRUE(f.net.done[0]);
  const Timestamp ts = *f.net.done[0]->stamp;
  EXPECT_EQ(ts.seq, 0u);
  EXPECT_TRUE(precedes_b(other, ts.epoch));
  EXPECT_TRUE(precedes_b(f.l0, ts.epoch));
  EXPECT_TRUE(f.node(0).epochs()->contains(other));
  EXPECT_EQ(f.node(0).writer_stats().forced_epoch_changes, 1u);
}

TEST(Register, SequenceWrapChangesEpoch) {
  Fixture f(3, 4);
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(f.write("w" + std::to_string(i)).stamp->seq, static_cast<std::uint64_t>(i));
  const auto done = f.write("w5");
  EXPECT_EQ(done.stamp->seq, 0u);
  EXPECT_TRUE(precedes_b(f.l0, done.stamp->epoch));
  EXPECT_EQ(f.node(0).writer_stats().epoch_changes, 1u);
  EXPECT_EQ(f.node(0).writer_stats().forced_epoch_changes, 0u);
  EXPECT_EQ(f.node(0).epochs()->entries().front(), f.l0);
}

TEST(Register, UnanimousReadReturnsAndWritesBack) {
  Fixture f;
  for (auto& n : f.net.nodes) n.corrupt(MaxTs{Timestamp{f.l0, 5}, std::nullopt}, "five");
  const auto done = f.read(2);
  EXPECT_FALSE(done.aborted);
  EXPECT_EQ(done.value, "five");
  EXPECT_EQ(done.stamp, (Timestamp{f.l0, 5}));
}

TEST(Register, ReadWritesBackToAMajority) {
  Fixture f(5);
  f.node(1).corrupt(MaxTs{Timestamp{f.l0, 6}, std::nullopt}, "six");
  f.node(4).begin_read();
  f.net.move(4, 1);
  f.net.move(1, 4);
  f.net.move(4, 2);
  f.net.move(2, 4);
  // Query done; the write-back goes out next.
  f.net.settle();
  ASSERT_TRUE(f.net.done[4]);
  EXPECT_EQ(f.net.done[4]->value, "six");
  std::size_t holders = 0;
  for (auto& n : f.net.nodes) holders += n.value() == "six";
  EXPECT_GE(holders, 3u);
}

TEST(Register, IncomparableCancelingStampAbortsRead) {
  Fixture f;
  f.node(1).corrupt(MaxTs{Timestamp{f.l0, 0}, Timestamp{f.stranger(), 0}}, "init");
  f.node(2).begin_read();
  f.net.move(2, 1);
  f.net.move(1, 2);
  ASSERT_TRUE(f.net.done[2]);
  EXPECT_TRUE(f.net.done[2]->aborted);
  EXPECT_TRUE(f.node(2).idle());
}

TEST(Register, EqualMaximalStampsDoNotAbort) {
  Fixture f;
  f.write("a");
  const auto done = f.read(1);
  EXPECT_FALSE(done.aborted);
  EXPECT_EQ(done.value, "a");
}

TEST(Register, MemberAdoptsNewerStamp) {
  Fixture f;
  f.node(1).corrupt(MaxTs{Timestamp{f.l0, 2}, Timestamp{f.l0, 3}}, "two");
  f.node(1).apply_update(Timestamp{f.l0, 4}, "four");
  EXPECT_EQ(f.node(1).max_ts().ml, (Timestamp{f.l0, 4}));
  EXPECT_FALSE(f.node(1).max_ts().cl);
  EXPECT_EQ(f.node(1).value(), "four");
}

TEST(Register, MemberRecordsIncomparableAsEvidence) {
  Fixture f;
  const Timestamp odd{f.stranger(), 1};
  f.node(1).apply_update(odd, "odd");
  EXPECT_EQ(f.node(1).max_ts().ml, (Timestamp{f.l0, 0}));
  EXPECT_EQ(f.node(1).max_ts().cl, MaybeTimestamp(odd));
  EXPECT_EQ(f.node(1).value(), "init");
  EXPECT_FALSE(precedes_b(odd.epoch, f.node(1).max_ts().ml.epoch));
}

TEST(Register, MemberIgnoresStaleStamp) {
  Fixture f;
  f.node(1).corrupt(MaxTs{Timestamp{f.l0, 5}, std::nullopt}, "five");
  f.node(1).apply_update(Timestamp{f.l0, 2}, "two");
  EXPECT_EQ(f.node(1).max_ts().ml, (Timestamp{f.l0, 5}));
  EXPECT_FALSE(f.node(1).max_ts().cl);
  EXPECT_EQ(f.node(1).value(), "five");
}

TEST(Register, StaleAckStillSent) {
  Fixture f;
  f.node(1).corrupt(MaxTs{Timestamp{f.l0, 5}, std::nullopt}, "five");
  Message req{MessageKind::kQwReq, 9, 2, 1, std::nullopt, Timestamp{f.l0, 2}, "two"};
  f.node(1).deliver(req);
  ASSERT_EQ(f.node(1).outbox().size(), 1u);
  EXPECT_EQ(f.node(1).outbox().front().kind, MessageKind::kQwAck);
  EXPECT_EQ(f.node(1).outbox().front().nonce, 9u);
}

TEST(Register, WriterLearnsEpochsFromUpdates) {
  Fixture f;
  const Label other = f.stranger();
  f.node(0).apply_update(Timestamp{other, 2}, "x");
  EXPECT_TRUE(f.node(0).epochs()->contains(other));
  EXPECT_EQ(f.node(0).max_ts().ml, (Timestamp{f.l0, 0}));
  f.node(0).apply_update(Timestamp{f.l0, 7}, "y");
  EXPECT_FALSE(f.node(0).epochs()->contains(f.l0));
}

TEST(Register, QueryReplyIsVerbatimAndIdempotent) {
  Fixture f;
  f.node(1).corrupt(MaxTs{Timestamp{f.l0, 3}, Timestamp{f.stranger(), 1}}, "v");
  Message req{MessageKind::kQrReq, 4, 0, 1, std::nullopt, std::nullopt, {}};
  f.node(1).deliver(req);
  f.node(1).deliver(req);
  ASSERT_EQ(f.node(1).outbox().size(), 2u);
  for (const auto& m : f.node(1).outbox()) {
    EXPECT_EQ(m.kind, MessageKind::kQrResp);
    EXPECT_EQ(m.nonce, 4u);
    EXPECT_EQ(*m.snapshot, f.node(1).max_ts());
    EXPECT_EQ(m.value, "v");
  }
}

TEST(Register, StaleNonceResponsesAreDiscarded) {
  Fixture f;
  f.node(2).begin_read();
  const auto nonce = f.node(2).phase()->nonce;
  Message stale{MessageKind::kQrResp, nonce + 1, 1, 2,
                MaxTs{Timestamp{f.l0, 0}, std::nullopt}, std::nullopt, "init"};
  EXPECT_FALSE(f.node(2).deliver(stale));
  EXPECT_EQ(std::count(f.node(2).phase()->answered.begin(), f.node(2).phase()->answered.end(), 1), 1);
  // Wrong destination or self-addressed messages are ignored too.
  Message misrouted = stale;
  misrouted.nonce = nonce;
  misrouted.destination = 1;
  EXPECT_FALSE(f.node(2).deliver(misrouted));
  misrouted.destination = 2;
  misrouted.sender = 2;
  EXPECT_FALSE(f.node(2).deliver(misrouted));
  EXPECT_FALSE(f.node(2).idle());
}

TEST(Register, DuplicateResponsesCountOnce) {
  Fixture f(5);
  f.node(4).begin_read();
  const auto nonce = f.node(4).phase()->nonce;
  Message reply{MessageKind::kQrResp, nonce, 1, 4, MaxTs{Timestamp{f.l0, 0}, std::nullopt},
                std::nullopt, "init"};
  EXPECT_FALSE(f.node(4).deliver(reply));
  EXPECT_FALSE(f.node(4).deliver(reply));
  EXPECT_FALSE(f.node(4).idle());
}

TEST(Register, UnansweredRequestsAreRetransmitted) {
  Fixture f;
  RetransmitPolicy policy{4, 16};
  RegisterNode w(0, f.params, MaxTs{Timestamp{f.l0, 0}, std::nullopt}, "init", policy);
  w.begin_write("a");
  EXPECT_EQ(w.outbox().size(), 2u);
  w.outbox().clear();  // lost
  for (int i = 0; i < 3; ++i) w.tick();
  EXPECT_TRUE(w.outbox().empty());
  w.tick();
  EXPECT_EQ(w.outbox().size(), 2u);
  // Already queued requests are not duplicated.
  for (int i = 0; i < 8; ++i) w.tick();
  EXPECT_EQ(w.outbox().size(), 2u);
}

TEST(FindDominant, Cases) {
  Fixture f;
  const Label other = f.stranger();
  using R = RegisterNode::Reply;
  const Timestamp t1{f.l0, 1};
  const Timestamp t2{f.l0, 2};
  EXPECT_EQ(find_dominant({R{0, MaxTs{t1, std::nullopt}, "a"}, R{1, MaxTs{t2, std::nullopt}, "b"}}),
            std::optional<std::size_t>(1));
  EXPECT_EQ(find_dominant({R{0, MaxTs{t2, std::nullopt}, "b"}, R{1, MaxTs{t2, std::nullopt}, "b"}}),
            std::optional<std::size_t>(0));
  EXPECT_EQ(find_dominant({R{0, MaxTs{t2, t1}, "b"}}), std::optional<std::size_t>(0));
  EXPECT_FALSE(find_dominant({R{0, MaxTs{t1, Timestamp{other, 0}}, "a"}}));
  EXPECT_FALSE(find_dominant({R{0, MaxTs{t1, std::nullopt}, "a"},
                              R{1, MaxTs{Timestamp{other, 0}, std::nullopt}, "z"}}));
}

TEST(Oracle, FirstWriteReachesMajorityWithSequenceOne) {
  Net<OracleNode> net;
  for (ProcessorId p = 0; p < 5; ++p) net.nodes.emplace_back(p, 5, 0, "init");
  net.done.resize(5);
  net.nodes[0].begin_write("a");
  net.settle();
  ASSERT_TRUE(net.done[0]);
  EXPECT_EQ(net.done[0]->stamp, std::optional<std::uint64_t>(1));
  std::size_t at_one = 0;
  for (auto& n : net.nodes) at_one += n.max_seq() == 1;
  EXPECT_GE(at_one, 3u);
}

TEST(Oracle, ReadReturnsMaximumAndWriterCatchesUp) {
  Net<OracleNode> net;
  for (ProcessorId p = 0; p < 3; ++p) net.nodes.emplace_back(p, 3, 0, "init");
  net.done.resize(3);
  net.nodes[1].corrupt(40, "forty");
  net.nodes[2].begin_read();
  net.move(2, 1);
  net.move(1, 2);
  net.settle();
  ASSERT_TRUE(net.done[2]);
  EXPECT_EQ(net.done[2]->value, "forty");
  EXPECT_EQ(net.nodes[2].max_seq(), 40u);

  net.nodes[0].begin_write("next");
  net.settle();
  EXPECT_EQ(net.done[0]->stamp, std::optional<std::uint64_t>(41));
  EXPECT_GE(net.nodes[0].observed_larger(), 1u);
}

}  // namespace
}  // namespace stabreg
