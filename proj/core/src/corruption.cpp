#include <algorithm>

#include "stabreg/simulation.hpp"

namespace stabreg {
namespace {

using Rng = std::mt19937_64;

std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

Value junk_value(Rng& rng) { return "junk-" + std::to_string(uniform(rng, 0, 999'999)); }

template <class Node>
Configuration<Node> empty_configuration(std::size_t n) {
  Configuration<Node> config;
  config.links.resize(link_count(n));
  config.crashed.assign(n, 0);
  return config;
}

// Message kinds that travel on each channel.
MessageKind random_kind(Rng& rng, Channel ch) {
  const bool first = uniform(rng, 0, 1) == 0;
  if (ch == Channel::kRequest) return first ? MessageKind::kQrReq : MessageKind::kQwReq;
  return first ? MessageKind::kQrResp : MessageKind::kQwAck;
}

// Fills `msg` with whatever payload its kind carries.
template <class MakeSnapshot, class MakeStamp>
void fill_payload(Message& msg, Rng& rng, MakeSnapshot snapshot, MakeStamp stamp) {
  if (msg.kind == MessageKind::kQrResp) {
    msg.snapshot = snapshot();
    msg.value = junk_value(rng);
  } else if (msg.kind == MessageKind::kQwReq) {
    msg.stamp = stamp();
    msg.value = junk_value(rng);
  }
}

void near_wrap(Configuration<RegisterNode>& config, const Scenario& s, const Label& l0,
               Rng& rng) {
  const std::size_t n = s.n;
  const Timestamp top{l0, s.r};
  for (auto& node : config.nodes) node.corrupt(MaxTs{top, std::nullopt}, junk_value(rng));
  for (std::size_t i = 0; i < config.links.size(); ++i) {
    const auto ends = link_ends(n, i);
    const auto count = uniform(rng, 0, s.c);
    for (std::uint64_t j = 0; j < count; ++j) {
      Message msg{random_kind(rng, ends.channel), uniform(rng, 1, 4), ends.from, ends.to,
                  std::nullopt, std::nullopt, {}};
      fill_payload(msg, rng, [&] { return MaxTs{top, std::nullopt}; }, [&] { return top; });
      config.links[i].push_back(std::move(msg));
    }
  }
}

// A family of labels incomparable to the writer's epoch and to each other,
// spread over every processor slot and every link slot, so the writer keeps
// running into epochs it has never seen.
void hidden_epoch(Configuration<RegisterNode>& config, const Scenario& s,
                  const ProtocolParams& params, const Label& l0, Rng& rng) {
  const std::size_t n = s.n;
  const std::size_t slots = 2 * n - 1 + link_count(n) / 2 * s.c * 3;
  const std::size_t m = params.hidden_epoch_bound();
  const std::size_t k = params.labels.k;
  const std::size_t family_size = std::min({slots, m > 1 ? m - 1 : 1, k});
  const std::vector<Label> others{l0};
  const auto family = incomparable_family(family_size, params.labels, rng, others);
  std::size_t next = 0;
  auto take = [&] { return Timestamp{family[next++ % family.size()], uniform(rng, 0, s.r)}; };

  for (auto& node : config.nodes) {
    if (node.is_writer()) {
      node.corrupt(MaxTs{Timestamp{l0, 0}, take()}, s.initial_value);
    } else {
      Timestamp ml = take();
      node.corrupt(MaxTs{ml, take()}, junk_value(rng));
    }
  }
  for (std::size_t i = 0; i < config.links.size(); ++i) {
    const auto ends = link_ends(n, i);
    // Upcoming nonces of the receiver, so forged responses are consumed.
    const std::uint64_t base = config.nodes[ends.to].next_nonce();
    for (std::size_t j = 0; j < s.c; ++j) {
      if (ends.channel == Channel::kRequest) {
        config.links[i].push_back(Message{MessageKind::kQwReq, uniform(rng, 1, 1000), ends.from,
                                          ends.to, std::nullopt, take(), junk_value(rng)});
      } else {
        Timestamp ml = take();
        config.links[i].push_back(Message{MessageKind::kQrResp, base + j, ends.from, ends.to,
                                          MaxTs{ml, take()}, std::nullopt, junk_value(rng)});
      }
    }
  }
}

void random_state(Configuration<RegisterNode>& config, const Scenario& s,
                  const ProtocolParams& params, Rng& rng) {
  const std::size_t n = s.n;
  auto stamp = [&] { return Timestamp{random_label(params.labels, rng), uniform(rng, 0, s.r)}; };
  auto maybe = [&]() -> MaybeTimestamp {
    if (uniform(rng, 0, 2) == 0) return std::nullopt;
    return stamp();
  };
  for (auto& node : config.nodes) {
    Timestamp ml = stamp();
    node.corrupt(MaxTs{ml, maybe()}, junk_value(rng));
    node.set_next_nonce(uniform(rng, 1, 8));
    if (node.is_writer()) {
      EpochsQueue q(params.queue_capacity);
      const auto fill = uniform(rng, 0, params.queue_capacity);
      for (std::uint64_t j = 0; j < fill; ++j) q.enqueue(random_label(params.labels, rng));
      node.corrupt_epochs(std::move(q));
    }
  }
  for (std::size_t i = 0; i < config.links.size(); ++i) {
    const auto ends = link_ends(n, i);
    const auto count = uniform(rng, 0, s.c);
    for (std::uint64_t j = 0; j < count; ++j) {
      Message msg{random_kind(rng, ends.channel), uniform(rng, 1, 8), ends.from, ends.to,
                  std::nullopt, std::nullopt, {}};
      fill_payload(msg, rng, [&] { Timestamp ml = stamp(); return MaxTs{ml, maybe()}; }, stamp);
      config.links[i].push_back(std::move(msg));
    }
  }
}

}  // namespace

Label initial_epoch(const LabelParams& params) { return next_b({}, params); }

Configuration<RegisterNode> make_initial_configuration(
    const Scenario& scenario, std::shared_ptr<const ProtocolParams> params, Rng& rng) {
  scenario.validate();
  if (!params || params->n != scenario.n) throw InvalidInput("protocol parameters mismatch");
  auto config = empty_configuration<RegisterNode>(scenario.n);
  const Label l0 = initial_epoch(params->labels);
  config.nodes.reserve(scenario.n);
  for (ProcessorId p = 0; p < scenario.n; ++p) {
    config.nodes.emplace_back(p, params, MaxTs{Timestamp{l0, 0}, std::nullopt},
                              scenario.initial_value, scenario.retransmit);
  }
  switch (scenario.corruption) {
    case CorruptionMode::kNone:
      break;
    case CorruptionMode::kNearWrap:
      near_wrap(config, scenario, l0, rng);
      break;
    case CorruptionMode::kHiddenEpoch:
      hidden_epoch(config, scenario, *params, l0, rng);
      break;
    case CorruptionMode::kRandom:
      random_state(config, scenario, *params, rng);
      break;
  }
  return config;
}

Configuration<OracleNode> make_oracle_configuration(const Scenario& scenario, Rng& rng) {
  scenario.validate();
  auto config = empty_configuration<OracleNode>(scenario.n);
  config.nodes.reserve(scenario.n);
  for (ProcessorId p = 0; p < scenario.n; ++p) {
    config.nodes.emplace_back(p, scenario.n, 0, scenario.initial_value, scenario.retransmit);
  }
  if (scenario.corruption == CorruptionMode::kNone) return config;

  // Every corrupted mode maps to arbitrary integers; the reference protocol
  // has no epochs to hide.
  constexpr std::uint64_t kMaxSeq = 1'000'000;
  for (auto& node : config.nodes) {
    node.corrupt(uniform(rng, 0, kMaxSeq), junk_value(rng));
    node.set_next_nonce(uniform(rng, 1, 8));
  }
  for (std::size_t i = 0; i < config.links.size(); ++i) {
    const auto ends = link_ends(scenario.n, i);
    const auto count = uniform(rng, 0, scenario.c);
    for (std::uint64_t j = 0; j < count; ++j) {
      OracleMessage msg{random_kind(rng, ends.channel), uniform(rng, 1, 8), ends.from, ends.to,
                        std::nullopt, std::nullopt, {}};
      if (msg.kind == MessageKind::kQrResp) msg.snapshot = uniform(rng, 0, kMaxSeq);
      if (msg.kind == MessageKind::kQwReq) msg.stamp = uniform(rng, 0, kMaxSeq);
      if (msg.kind == MessageKind::kQrResp || msg.kind == MessageKind::kQwReq) {
        msg.value = junk_value(rng);
      }
      config.links[i].push_back(std::move(msg));
    }
  }
  return config;
}

}  // namespace stabreg
