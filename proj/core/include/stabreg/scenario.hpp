#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stabreg/message.hpp"
#include "stabreg/quorum_node.hpp"

namespace stabreg {

enum class ProtocolKind : std::uint8_t { kBounded, kOracle };

/// How the initial configuration is built.
///   none          every processor at (L0, 0), empty links
///   near-wrap     every timestamp at (L0, r), so the first write must change epoch
///   hidden-epoch  a family of crafted labels incomparable to the writer's
///                 epoch, spread over processor states and full links
///   random        arbitrary labels, sequence numbers, values, nonces and
///                 link contents
enum class CorruptionMode : std::uint8_t { kNone, kNearWrap, kHiddenEpoch, kRandom };

std::string_view to_string(CorruptionMode mode);
CorruptionMode parse_corruption_mode(std::string_view text);
std::string_view to_string(ProtocolKind kind);
ProtocolKind parse_protocol_kind(std::string_view text);

struct CrashEvent {
  ProcessorId processor = 0;
  std::uint64_t step = 0;

  friend bool operator==(const CrashEvent&, const CrashEvent&) = default;
};

/// Everything needed to reproduce one simulation run.
struct Scenario {
  ProtocolKind protocol = ProtocolKind::kBounded;
  std::size_t n = 5;
  std::size_t c = 2;
  std::uint64_t r = 64;
  std::optional<std::size_t> k_override;
  std::uint64_t seed = 1;
  std::uint64_t max_steps = 1'000'000;
  std::uint64_t writes = 100;
  double loss_prob = 0.0;
  // Chance that a receive step yields nothing although messages are pending.
  double null_receive_prob = 0.05;
  std::vector<CrashEvent> crashes;
  CorruptionMode corruption = CorruptionMode::kNone;
  // Every live processor steps at least once per window; 0 means 4n.
  std::uint32_t fairness_window = 0;
  // Reader pause between reads, in own steps, drawn from [0, reader_think_max].
  std::uint32_t reader_think_max = 16;
  std::uint32_t abort_backoff = 8;
  // Consecutive aborts after which a reader gives up and pauses as after a
  // completed read.
  std::uint32_t max_read_retries = 64;
  RetransmitPolicy retransmit;
  // Oracle runs only: evaluate the potential g(C) around every step.
  bool track_potential = false;
  Value initial_value = "init";
  // Output files; empty means the caller picks.
  std::string trace_path;
  std::string metrics_path;

  std::uint32_t effective_fairness_window() const {
    return fairness_window ? fairness_window : static_cast<std::uint32_t>(4 * n);
  }

  /// Throws InvalidInput describing the first problem found.
  void validate() const;

  /// Flat key/value view of every field, as written to trace headers.
  std::map<std::string, std::string> resolved() const;
};

/// Parses `key = value` lines; `#` starts a comment. Required keys: n, c, r,
/// seed, steps, writes. Crashes are written `crashes = 3@2000, 4@4000`.
/// Throws MalformedInput naming the offending or missing key.
Scenario parse_scenario(std::string_view text);

}  // namespace stabreg
