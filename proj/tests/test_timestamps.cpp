#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "stabreg/timestamp.hpp"

namespace stabreg {
namespace {

const LabelParams k2 = LabelParams::for_k(2);
const Label L(3, {1, 2});
const Label A(1, {2, 3});
const Label B(2, {1, 5});  // incomparable with A
const Label C(4, {1, 5});

TEST(PrecedesE, SameEpochOrdersBySequence) {
  EXPECT_TRUE(precedes_e(Timestamp{L, 3}, Timestamp{L, 7}));
  EXPECT_FALSE(precedes_e(Timestamp{L, 7}, Timestamp{L, 3}));
  EXPECT_FALSE(precedes_e(Timestamp{L, 3}, Timestamp{L, 3}));
  EXPECT_TRUE(precedes_or_equal_e(Timestamp{L, 3}, Timestamp{L, 3}));
}

TEST(PrecedesE, BottomIsLeast) {
  const MaybeTimestamp bottom;
  EXPECT_TRUE(precedes_e(bottom, Timestamp{L, 0}));
  EXPECT_FALSE(precedes_e(Timestamp{L, 0}, bottom));
  EXPECT_FALSE(precedes_e(bottom, bottom));
  EXPECT_TRUE(precedes_or_equal_e(bottom, bottom));
  EXPECT_TRUE(epoch_precedes(bottom, Timestamp{L, 0}));
}

TEST(PrecedesE, IncomparableEpochsIgnoreSequence) {
  ASSERT_FALSE(precedes_b(A, B));
  ASSERT_FALSE(precedes_b(B, A));
  for (std::uint64_t i : {0u, 5u}) {
    for (std::uint64_t j : {0u, 5u}) {
      EXPECT_FALSE(precedes_e(Timestamp{A, i}, Timestamp{B, j}));
      EXPECT_FALSE(precedes_e(Timestamp{B, j}, Timestamp{A, i}));
    }
  }
}

TEST(PrecedesE, EpochOrderBeatsSequence) {
  const Label low(2, {4, 5});
  const Label high(1, {2, 3});
  ASSERT_TRUE(precedes_b(low, high));
  EXPECT_TRUE(precedes_e(Timestamp{low, 60}, Timestamp{high, 0}));
  EXPECT_FALSE(precedes_e(Timestamp{high, 0}, Timestamp{low, 60}));
}

TEST(PrecedesE, StrictPartialOrderOnK2) {
  std::vector<Label> labels;
  for (std::uint32_t s = 1; s <= 5; ++s) {
    for (std::uint32_t a = 1; a <= 5; ++a) {
      for (std::uint32_t b = a + 1; b <= 5; ++b) labels.emplace_back(s, std::vector<std::uint32_t>{a, b});
    }
  }
  std::vector<Timestamp> ts;
  for (const auto& l : labels) {
    for (std::uint64_t i = 0; i < 3; ++i) ts.push_back(Timestamp{l, i});
  }
  for (const auto& a : ts) {
    EXPECT_FALSE(precedes_e(a, a));
    for (const auto& b : ts) EXPECT_FALSE(precedes_e(a, b) && precedes_e(b, a));
  }
}

TEST(TimestampText, RoundTrip) {
  const Timestamp t{L, 42};
  EXPECT_EQ(to_string(t), "((3|1,2);42)");
  EXPECT_EQ(parse_timestamp("((3|1,2);42)"), MaybeTimestamp(t));
  EXPECT_EQ(to_string(MaybeTimestamp{}), "_");
  EXPECT_EQ(parse_timestamp("_"), MaybeTimestamp{});
  EXPECT_THROW(parse_timestamp("((3|1,2);x)"), std::exception);
  EXPECT_THROW(parse_timestamp("(3|1,2)"), std::exception);
}

TEST(EpochsQueue, Examples) {
  EpochsQueue q(3);
  q.enqueue(C);
  q.enqueue(B);
  EXPECT_EQ(std::vector<Label>(q.entries().begin(), q.entries().end()), (std::vector<Label>{B, C}));

  q.enqueue(A);
  EXPECT_EQ(std::vector<Label>(q.entries().begin(), q.entries().end()),
            (std::vector<Label>{A, B, C}));

  q.enqueue(C);
  EXPECT_EQ(std::vector<Label>(q.entries().begin(), q.entries().end()),
            (std::vector<Label>{C, A, B}));

  EpochsQueue full(3);
  for (const auto& l : {C, B, A}) full.enqueue(l);
  const Label D(5, {1, 2});
  const auto after = enqueued(full, D);
  EXPECT_EQ(std::vector<Label>(after.entries().begin(), after.entries().end()),
            (std::vector<Label>{D, A, B}));
  EXPECT_TRUE(full.contains(C));
  EXPECT_FALSE(after.contains(C));
}

TEST(EpochsQueue, FuzzNeverOverflowsOrDuplicates) {
  std::mt19937_64 rng(99);
  EpochsQueue q(6);
  std::vector<Label> model;  // reference move-to-front list
  for (int i = 0; i < 100000; ++i) {
    const Label l = random_label(k2, rng);
    q.enqueue(l);
    model.erase(std::remove(model.begin(), model.end(), l), model.end());
    model.insert(model.begin(), l);
    if (model.size() > 6) model.pop_back();

    ASSERT_LE(q.size(), q.capacity());
    ASSERT_EQ(q.entries().front(), l);
    if (i % 97 == 0) {
      std::set<std::string> distinct;
      for (const auto& e : q.entries()) distinct.insert(e.to_string());
      ASSERT_EQ(distinct.size(), q.size());
      ASSERT_TRUE(std::equal(model.begin(), model.end(), q.entries().begin(), q.entries().end()));
    }
  }
}

TEST(NextE, IncrementsBelowR) {
  EpochsQueue q(4);
  const Timestamp next = next_e(Timestamp{L, 5}, q, 64, k2);
  EXPECT_EQ(next, (Timestamp{L, 6}));
  EXPECT_EQ(q.size(), 0u);
}

TEST(NextE, FreshEpochAtR) {
  EpochsQueue q(4);
  q.enqueue(A);
  const Timestamp next = next_e(Timestamp{L, 64}, q, 64, k2);
  EXPECT_EQ(next.seq, 0u);
  EXPECT_EQ(q.entries().front(), L);
  const std::vector<Label> both{A, L};
  EXPECT_EQ(next.epoch, next_b(both, k2));
  EXPECT_TRUE(precedes_e(Timestamp{L, 64}, next));
  EXPECT_TRUE(precedes_e(Timestamp{A, 64}, next));
}

TEST(NextE, OverflowEvictsOldest) {
  EpochsQueue q(2);
  q.enqueue(C);
  q.enqueue(B);
  next_e(Timestamp{L, 8}, q, 8, k2);
  EXPECT_EQ(std::vector<Label>(q.entries().begin(), q.entries().end()), (std::vector<Label>{L, B}));
}

TEST(NextE, DominatesWhateverTheQueueHolds) {
  std::mt19937_64 rng(4);
  const auto params = LabelParams::for_k(6);
  for (int i = 0; i < 2000; ++i) {
    EpochsQueue q(5);
    const auto fill = std::uniform_int_distribution<int>(0, 5)(rng);
    for (int j = 0; j < fill; ++j) q.enqueue(random_label(params, rng));
    const Timestamp cur{random_label(params, rng), 10};
    const Timestamp next = next_e(cur, q, 10, params);
    EXPECT_TRUE(precedes_e(cur, next));
    for (const auto& e : q.entries()) EXPECT_TRUE(precedes_b(e, next.epoch));
  }
}

}  // namespace
}  // namespace stabreg
