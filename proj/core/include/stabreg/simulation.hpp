#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "stabreg/oracle_node.hpp"
#include "stabreg/register_node.hpp"
#include "stabreg/scenario.hpp"
#include "stabreg/trace.hpp"

namespace stabreg {

/// Each ordered pair of processors has a request link and a response link,
/// giving 2(n^2-n) bounded message sets in total.
enum class Channel : std::uint8_t { kRequest, kResponse };

inline Channel channel_for(MessageKind kind) {
  return is_request(kind) ? Channel::kRequest : Channel::kResponse;
}

inline std::size_t link_count(std::size_t n) { return 2 * n * (n - 1); }
std::size_t link_index(std::size_t n, ProcessorId from, ProcessorId to, Channel channel);

struct LinkEnds {
  ProcessorId from = 0;
  ProcessorId to = 0;
  Channel channel = Channel::kRequest;
};
LinkEnds link_ends(std::size_t n, std::size_t index);

/// Full system state: processor states plus every link's message set.
template <class Node>
struct Configuration {
  using Msg = typename Node::Msg;

  std::vector<Node> nodes;
  std::vector<std::vector<Msg>> links;
  std::vector<std::uint8_t> crashed;
  std::uint64_t step = 0;

  std::vector<Msg>& link(ProcessorId from, ProcessorId to, Channel ch) {
    return links[link_index(nodes.size(), from, to, ch)];
  }
  const std::vector<Msg>& link(ProcessorId from, ProcessorId to, Channel ch) const {
    return links[link_index(nodes.size(), from, to, ch)];
  }
};

/// The epoch every processor starts in on a clean start.
Label initial_epoch(const LabelParams& params);

/// Initial configuration for the bounded register under scenario.corruption.
Configuration<RegisterNode> make_initial_configuration(
    const Scenario& scenario, std::shared_ptr<const ProtocolParams> params, std::mt19937_64& rng);

/// Initial configuration for the unbounded reference protocol.
Configuration<OracleNode> make_oracle_configuration(const Scenario& scenario,
                                                    std::mt19937_64& rng);

/// g(C): distinct sequence numbers anywhere in the configuration that exceed
/// the writer's.
std::uint64_t potential(const Configuration<OracleNode>& config);

std::string stamp_text(const Timestamp& ts);
std::string stamp_text(std::uint64_t seq);

/// Seeded discrete-event driver. Each step picks one live processor, lets
/// its client start an operation if it is idle, and performs exactly one
/// send or one receive for it.
template <class Node>
class Simulation {
 public:
  using Msg = typename Node::Msg;
  using Observer = std::function<void(const Configuration<Node>&)>;

  Simulation(Scenario scenario, Configuration<Node> initial);

  void set_observer(Observer observer) { observer_ = std::move(observer); }

  /// Returns false once no live processor remains to step.
  bool step();
  bool finished() const;

  /// Steps until finished() and returns the recorded trace.
  Trace run();

  const Configuration<Node>& configuration() const { return config_; }
  const std::vector<TraceEvent>& events() const { return events_; }
  const RunMetrics& metrics() const { return metrics_; }
  /// Processor that took the most recent step.
  std::optional<ProcessorId> last_stepped() const { return last_stepped_; }

 private:
  struct Client {
    bool busy = false;
    std::uint64_t op_id = 0;
    std::uint32_t wait = 0;
    std::uint32_t retries = 0;
  };

  struct PhaseTraffic {
    std::vector<std::uint8_t> destinations;
    std::uint64_t requests = 0;
    std::uint64_t request_sends = 0;
    std::uint64_t responses = 0;
    bool completed = false;
  };

  bool alive(ProcessorId p) const { return !config_.crashed[p]; }
  bool coin(double p) { return p > 0.0 && std::bernoulli_distribution(p)(rng_); }
  std::uint32_t think_time();
  void apply_crashes();
  std::optional<ProcessorId> choose_processor();
  void poll_client(ProcessorId p);
  void send(Msg msg);
  void receive(ProcessorId p, std::vector<std::size_t>& incoming);
  void on_completion(ProcessorId p, const Completion<typename Node::StampT>& done);
  bool writer_done() const;
  void finalize_metrics();

  Scenario scenario_;
  Configuration<Node> config_;
  std::mt19937_64 rng_;
  Observer observer_;
  std::vector<Client> clients_;
  std::vector<std::int64_t> last_step_;
  std::vector<CrashEvent> pending_crashes_;
  std::map<std::pair<ProcessorId, std::uint64_t>, PhaseTraffic> traffic_;
  std::vector<TraceEvent> events_;
  RunMetrics metrics_;
  std::uint64_t writes_invoked_ = 0;
  std::uint64_t next_op_id_ = 1;
  std::uint64_t potential_ = 0;
  std::optional<ProcessorId> last_stepped_;
};

/// Builds the initial configuration for `scenario` and runs it.
Trace run_scenario(const Scenario& scenario);

// ---------------------------------------------------------------------------

template <class Node>
Simulation<Node>::Simulation(Scenario scenario, Configuration<Node> initial)
    : scenario_(std::move(scenario)), config_(std::move(initial)) {
  scenario_.validate();
  const std::size_t n = config_.nodes.size();
  if (n != scenario_.n || config_.links.size() != link_count(n)) {
    throw InvalidInput("configuration does not match scenario size");
  }
  config_.crashed.resize(n, 0);
  std::seed_seq seq{scenario_.seed, std::uint64_t{0x5eed}};
  rng_.seed(seq);
  clients_.resize(n);
  last_step_.assign(n, -1);
  pending_crashes_ = scenario_.crashes;
  std::sort(pending_crashes_.begin(), pending_crashes_.end(),
            [](const CrashEvent& a, const CrashEvent& b) { return a.step > b.step; });
  if constexpr (std::is_same_v<Node, OracleNode>) {
    if (scenario_.track_potential) {
      potential_ = potential(config_);
      metrics_.potential_initial = potential_;
    }
  }
}

template <class Node>
std::uint32_t Simulation<Node>::think_time() {
  return std::uniform_int_distribution<std::uint32_t>(0, scenario_.reader_think_max)(rng_);
}

template <class Node>
void Simulation<Node>::apply_crashes() {
  while (!pending_crashes_.empty() && pending_crashes_.back().step <= config_.step) {
    config_.crashed[pending_crashes_.back().processor] = 1;
    pending_crashes_.pop_back();
  }
}

template <class Node>
std::optional<ProcessorId> Simulation<Node>::choose_processor() {
  const std::size_t n = config_.nodes.size();
  const auto now = static_cast<std::int64_t>(config_.step);
  const std::int64_t threshold = scenario_.effective_fairness_window() - n;
  std::optional<ProcessorId> overdue;
  std::vector<ProcessorId> live;
  live.reserve(n);
  for (ProcessorId p = 0; p < n; ++p) {
    if (!alive(p)) continue;
    live.push_back(p);
    if (now - last_step_[p] >= threshold &&
        (!overdue || last_step_[p] < last_step_[*overdue])) {
      overdue = p;
    }
  }
  if (live.empty()) return std::nullopt;
  if (overdue) return overdue;
  return live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng_)];
}

template <class Node>
bool Simulation<Node>::writer_done() const {
  return metrics_.writes_completed >= scenario_.writes || !alive(0);
}

template <class Node>
bool Simulation<Node>::finished() const {
  if (config_.step >= scenario_.max_steps) return true;
  if (!writer_done()) return false;
  for (ProcessorId p = 0; p < config_.nodes.size(); ++p) {
    if (alive(p) && clients_[p].busy) return false;
  }
  return true;
}

template <class Node>
void Simulation<Node>::poll_client(ProcessorId p) {
  Client& client = clients_[p];
  if (client.busy) return;
  if (client.wait > 0) {
    --client.wait;
    return;
  }
  Node& node = config_.nodes[p];
  TraceEvent ev;
  ev.step = config_.step;
  ev.proc = p;
  if (node.is_writer()) {
    if (writes_invoked_ >= scenario_.writes) return;
    Value v = "v#" + std::to_string(++writes_invoked_);
    ev.kind = EventKind::kWriteInvoke;
    ev.value = v;
    node.begin_write(std::move(v));
  } else {
    if (writer_done()) return;
    ev.kind = EventKind::kReadInvoke;
    node.begin_read();
  }
  client.busy = true;
  client.op_id = next_op_id_++;
  ev.op_id = client.op_id;
  events_.push_back(std::move(ev));
}

template <class Node>
void Simulation<Node>::send(Msg msg) {
  ++metrics_.sends;
  ++metrics_.sent_by_kind[static_cast<std::size_t>(msg.kind)];
  if (is_request(msg.kind)) {
    auto& t = traffic_[{msg.sender, msg.nonce}];
    if (t.destinations.empty()) t.destinations.assign(config_.nodes.size(), 0);
    ++t.request_sends;
    if (!t.destinations[msg.destination]) {
      t.destinations[msg.destination] = 1;
      ++t.requests;
    }
  } else if (auto it = traffic_.find({msg.destination, msg.nonce}); it != traffic_.end()) {
    ++it->second.responses;
  }
  if (coin(scenario_.loss_prob)) {
    ++metrics_.losses;
    return;
  }
  auto& link = config_.link(msg.sender, msg.destination, channel_for(msg.kind));
  link.push_back(std::move(msg));
  if (link.size() > scenario_.c) {
    // Over capacity: any one message of the union is lost.
    const auto victim = std::uniform_int_distribution<std::size_t>(0, link.size() - 1)(rng_);
    link[victim] = std::move(link.back());
    link.pop_back();
    ++metrics_.overflow_drops;
  }
}

template <class Node>
void Simulation<Node>::receive(ProcessorId p, std::vector<std::size_t>& incoming) {
  if (incoming.empty() || coin(scenario_.null_receive_prob)) {
    ++metrics_.null_receives;
    return;
  }
  auto& link = config_.links[incoming[std::uniform_int_distribution<std::size_t>(
      0, incoming.size() - 1)(rng_)]];
  const auto idx = std::uniform_int_distribution<std::size_t>(0, link.size() - 1)(rng_);
  Msg msg = std::move(link[idx]);
  link[idx] = std::move(link.back());
  link.pop_back();
  ++metrics_.receives;

  Node& node = config_.nodes[p];
  std::optional<std::uint64_t> before;
  if (node.phase()) before = node.phase()->nonce;
  auto done = node.deliver(msg);
  if (before && (!node.phase() || node.phase()->nonce != *before)) {
    traffic_[{p, *before}].completed = true;
  }
  if (done) on_completion(p, *done);
}

template <class Node>
void Simulation<Node>::on_completion(ProcessorId p,
                                     const Completion<typename Node::StampT>& done) {
  Client& client = clients_[p];
  TraceEvent ev;
  ev.step = config_.step;
  ev.proc = p;
  ev.op_id = client.op_id;
  if (done.kind == OpKind::kWrite) {
    ev.kind = EventKind::kWriteResponse;
    ++metrics_.writes_completed;
  } else {
    ev.kind = EventKind::kReadResponse;
    if (done.aborted) {
      ++metrics_.reads_aborted;
      if (++client.retries >= scenario_.max_read_retries) {
        ++metrics_.reads_abandoned;
        client.retries = 0;
        client.wait = think_time();
      } else {
        client.wait = scenario_.abort_backoff * std::min<std::uint32_t>(client.retries, 8);
      }
    } else {
      ++metrics_.reads_completed;
      client.retries = 0;
      client.wait = think_time();
    }
  }
  if (done.aborted) {
    ev.aborted = true;
  } else {
    ev.value = done.value;
    if (done.stamp) ev.timestamp = stamp_text(*done.stamp);
  }
  client.busy = false;
  events_.push_back(std::move(ev));
}

template <class Node>
bool Simulation<Node>::step() {
  apply_crashes();
  const auto chosen = choose_processor();
  if (!chosen) return false;
  const ProcessorId p = *chosen;
  last_step_[p] = static_cast<std::int64_t>(config_.step);
  last_stepped_ = p;

  std::uint64_t discoveries_before = 0;
  if constexpr (std::is_same_v<Node, OracleNode>) {
    discoveries_before = config_.nodes[0].observed_larger();
  }

  poll_client(p);
  Node& node = config_.nodes[p];
  node.tick();

  std::vector<std::size_t> incoming;
  for (ProcessorId q = 0; q < config_.nodes.size(); ++q) {
    if (q == p) continue;
    for (Channel ch : {Channel::kRequest, Channel::kResponse}) {
      const auto idx = link_index(config_.nodes.size(), q, p, ch);
      if (!config_.links[idx].empty()) incoming.push_back(idx);
    }
  }
  const bool do_send = !node.outbox().empty() && (incoming.empty() || coin(0.5));
  if (do_send) {
    Msg msg = std::move(node.outbox().front());
    node.outbox().pop_front();
    send(std::move(msg));
  } else {
    receive(p, incoming);
  }

  ++config_.step;
  metrics_.steps = config_.step;

  for (const auto& link : config_.links) {
    if (link.size() > scenario_.c) ++metrics_.capacity_violations;
  }
  const auto now = static_cast<std::int64_t>(config_.step);
  for (ProcessorId q = 0; q < config_.nodes.size(); ++q) {
    if (alive(q) && now - last_step_[q] > scenario_.effective_fairness_window()) {
      ++metrics_.fairness_violations;
    }
  }

  if constexpr (std::is_same_v<Node, OracleNode>) {
    if (scenario_.track_potential) {
      const std::uint64_t after = potential(config_);
      const bool discovered = config_.nodes[0].observed_larger() > discoveries_before;
      if (after > potential_) ++metrics_.potential_increases;
      if (discovered) {
        ++metrics_.writer_discoveries;
        if (!(after < potential_)) ++metrics_.missed_strict_decreases;
      }
      potential_ = after;
      metrics_.potential_final = after;
    }
  }

  if (observer_) observer_(config_);
  return true;
}

template <class Node>
void Simulation<Node>::finalize_metrics() {
  metrics_.writer_finished = metrics_.writes_completed >= scenario_.writes;
  metrics_.phases_completed = 0;
  metrics_.max_phase_requests = 0;
  metrics_.max_phase_responses = 0;
  metrics_.max_phase_request_sends = 0;
  for (const auto& [key, t] : traffic_) {
    if (!t.completed) continue;
    ++metrics_.phases_completed;
    metrics_.max_phase_requests = std::max(metrics_.max_phase_requests, t.requests);
    metrics_.max_phase_responses = std::max(metrics_.max_phase_responses, t.responses);
    metrics_.max_phase_request_sends = std::max(metrics_.max_phase_request_sends, t.request_sends);
  }
  if constexpr (std::is_same_v<Node, RegisterNode>) {
    metrics_.epoch_changes = config_.nodes[0].writer_stats().epoch_changes;
    metrics_.forced_epoch_changes = config_.nodes[0].writer_stats().forced_epoch_changes;
  }
}

template <class Node>
Trace Simulation<Node>::run() {
  while (!finished() && step()) {
  }
  finalize_metrics();
  Trace trace;
  trace.header = scenario_.resolved();
  trace.events = events_;
  trace.metrics = metrics_;
  return trace;
}

extern template class Simulation<RegisterNode>;
extern template class Simulation<OracleNode>;

}  // namespace stabreg
