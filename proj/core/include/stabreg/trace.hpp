#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stabreg/message.hpp"

namespace stabreg {

enum class EventKind : std::uint8_t { kWriteInvoke, kWriteResponse, kReadInvoke, kReadResponse };

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

struct TraceEvent {
  std::uint64_t step = 0;
  ProcessorId proc = 0;
  EventKind kind = EventKind::kWriteInvoke;
  std::uint64_t op_id = 0;
  std::optional<Value> value;
  std::optional<std::string> timestamp;
  bool aborted = false;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Counters gathered while a scenario runs.
struct RunMetrics {
  std::uint64_t steps = 0;
  std::uint64_t sends = 0;
  std::uint64_t receives = 0;
  std::uint64_t null_receives = 0;
  std::uint64_t overflow_drops = 0;
  std::uint64_t losses = 0;
  std::array<std::uint64_t, 4> sent_by_kind{};

  std::uint64_t writes_completed = 0;
  std::uint64_t reads_completed = 0;
  std::uint64_t reads_aborted = 0;
  std::uint64_t reads_abandoned = 0;

  std::uint64_t epoch_changes = 0;
  std::uint64_t forced_epoch_changes = 0;

  // Per completed quorum phase: distinct (request, destination) sends and
  // response messages addressed back to the phase owner.
  std::uint64_t phases_completed = 0;
  std::uint64_t max_phase_requests = 0;
  std::uint64_t max_phase_responses = 0;
  // Request sends including retransmissions.
  std::uint64_t max_phase_request_sends = 0;

  // Unbounded reference protocol only.
  std::uint64_t potential_initial = 0;
  std::uint64_t potential_final = 0;
  std::uint64_t potential_increases = 0;
  std::uint64_t missed_strict_decreases = 0;
  std::uint64_t writer_discoveries = 0;

  std::uint64_t capacity_violations = 0;
  std::uint64_t fairness_violations = 0;
  bool writer_finished = false;
};

struct Trace {
  std::map<std::string, std::string> header;
  std::vector<TraceEvent> events;
  RunMetrics metrics;
};

/// Header line {"header":{...}} followed by one event per line:
/// {"step":..,"proc":..,"event":"read_response","op_id":..,"value":..,"timestamp":..}
/// Aborted reads carry "aborted":true and no value.
std::string to_jsonl(const Trace& trace);
std::string event_to_json(const TraceEvent& event);

/// Throws MalformedInput with the offending line number.
Trace parse_trace_jsonl(std::string_view text);

std::string metrics_json(const RunMetrics& metrics);

}  // namespace stabreg
