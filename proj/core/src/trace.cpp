#include "stabreg/trace.hpp"

#include <array>

#include "json.hpp"
#include "stabreg/error.hpp"

namespace stabreg {
namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 4> kEventNames{"write_invoke", "write_response",
                                                      "read_invoke", "read_response"};

json event_json(const TraceEvent& e) {
  json j;
  j["step"] = e.step;
  j["proc"] = e.proc;
  j["event"] = to_string(e.kind);
  j["op_id"] = e.op_id;
  if (e.value) j["value"] = *e.value;
  if (e.timestamp) j["timestamp"] = *e.timestamp;
  if (e.aborted) j["aborted"] = true;
  return j;
}

template <class T>
T required(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw MalformedInput("line " + std::to_string(line) + ": missing field '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw MalformedInput("line " + std::to_string(line) + ": bad field '" + key + "'");
  }
}

}  // namespace

std::string_view to_string(EventKind kind) { return kEventNames.at(static_cast<std::size_t>(kind)); }

EventKind parse_event_kind(std::string_view text) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (kEventNames[i] == text) return static_cast<EventKind>(i);
  }
  throw MalformedInput("unknown event '" + std::string(text) + "'");
}

std::string event_to_json(const TraceEvent& event) { return event_json(event).dump(); }

std::string to_jsonl(const Trace& trace) {
  std::string out = json{{"header", trace.header}}.dump();
  out += '\n';
  for (const auto& e : trace.events) {
    out += event_to_json(e);
    out += '\n';
  }
  return out;
}

Trace parse_trace_jsonl(std::string_view text) {
  Trace trace;
  std::size_t line_no = 0;
  bool seen_event = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw MalformedInput("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) throw MalformedInput("line " + std::to_string(line_no) + ": not an object");

    if (auto h = j.find("header"); h != j.end()) {
      if (seen_event || !trace.header.empty()) {
        throw MalformedInput("line " + std::to_string(line_no) + ": header must come first");
      }
      if (!h->is_object()) throw MalformedInput("line " + std::to_string(line_no) + ": bad header");
      for (const auto& [key, val] : h->items()) {
        trace.header[key] = val.is_string() ? val.get<std::string>() : val.dump();
      }
      continue;
    }

    TraceEvent e;
    e.step = required<std::uint64_t>(j, "step", line_no);
    e.proc = required<ProcessorId>(j, "proc", line_no);
    try {
      e.kind = parse_event_kind(required<std::string>(j, "event", line_no));
    } catch (const MalformedInput& err) {
      throw MalformedInput("line " + std::to_string(line_no) + ": " + err.what());
    }
    e.op_id = required<std::uint64_t>(j, "op_id", line_no);
    if (j.contains("value")) e.value = required<std::string>(j, "value", line_no);
    if (j.contains("timestamp")) e.timestamp = required<std::string>(j, "timestamp", line_no);
    if (j.contains("aborted")) e.aborted = required<bool>(j, "aborted", line_no);
    trace.events.push_back(std::move(e));
    seen_event = true;
  }
  return trace;
}

std::string metrics_json(const RunMetrics& m) {
  json j{
      {"steps", m.steps},
      {"sends", m.sends},
      {"receives", m.receives},
      {"null_receives", m.null_receives},
      {"overflow_drops", m.overflow_drops},
      {"losses", m.losses},
      {"writes_completed", m.writes_completed},
      {"reads_completed", m.reads_completed},
      {"reads_aborted", m.reads_aborted},
      {"reads_abandoned", m.reads_abandoned},
      {"epoch_changes", m.epoch_changes},
      {"forced_epoch_changes", m.forced_epoch_changes},
      {"phases_completed", m.phases_completed},
      {"max_phase_requests", m.max_phase_requests},
      {"max_phase_responses", m.max_phase_responses},
      {"max_phase_request_sends", m.max_phase_request_sends},
      {"potential_initial", m.potential_initial},
      {"potential_final", m.potential_final},
      {"potential_increases", m.potential_increases},
      {"missed_strict_decreases", m.missed_strict_decreases},
      {"writer_discoveries", m.writer_discoveries},
      {"capacity_violations", m.capacity_violations},
      {"fairness_violations", m.fairness_violations},
      {"writer_finished", m.writer_finished},
  };
  json by_kind;
  for (std::size_t i = 0; i < m.sent_by_kind.size(); ++i) {
    by_kind[std::string(to_string(static_cast<MessageKind>(i)))] = m.sent_by_kind[i];
  }
  j["sent_by_kind"] = by_kind;
  return j.dump(2);
}

}  // namespace stabreg
