#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stabreg/quorum_node.hpp"
#include "stabreg/trace.hpp"

namespace stabreg {

struct Operation {
  std::uint64_t op_id = 0;
  ProcessorId proc = 0;
  OpKind kind = OpKind::kRead;
  // Written value for writes, returned value for completed reads.
  std::optional<Value> value;
  std::optional<std::string> timestamp;
  // Positions of the invoke and response events in the trace.
  std::size_t invoke_pos = 0;
  std::optional<std::size_t> response_pos;
  bool aborted = false;

  bool completed() const { return response_pos.has_value(); }
  // a happens before b: a responded before b was invoked.
  bool precedes(const Operation& b) const { return response_pos && *response_pos < b.invoke_pos; }
};

/// Operations of one trace. `ops` is in invoke order; `writes` lists the
/// indices of write operations in writer order.
struct History {
  Value initial_value;
  std::vector<Operation> ops;
  std::vector<std::size_t> writes;
};

/// Throws MalformedInput when a processor's invokes and responses do not
/// alternate, a response does not match its invoke, writes come from more
/// than one processor, or two writes carry the same value.
History build_history(const std::vector<TraceEvent>& events, Value initial_value);

/// Uses the header's initial_value, or "init" when the header has none.
History build_history(const Trace& trace);

enum class ViolationKind : std::uint8_t { kRegularity, kInversion };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind = ViolationKind::kRegularity;
  // Offending read, and for inversions the later read that went backwards.
  std::uint64_t op_id = 0;
  std::optional<std::uint64_t> later_op_id;
  // Completed-operation index of op_id; a suffix starting after it is clear.
  std::size_t index = 0;
  std::string detail;
};

struct VerdictStats {
  std::size_t completed_operations = 0;
  std::size_t suffix_operations = 0;
  std::size_t suffix_writes = 0;
  std::size_t writes_before_stabilization = 0;
  std::size_t epoch_changes = 0;
  std::size_t aborted_reads = 0;
};

/// Completed operations are numbered by response order; aborted reads are
/// counted but take no index and are not checked. atomic_from is the first
/// index from which every read is regular and no two reads invert, or
/// nullopt when fewer than two operations would remain.
struct Verdict {
  std::optional<std::size_t> atomic_from;
  std::vector<Violation> violations;
  VerdictStats stats;
};

/// Write index each completed read maps to: -1 for the initial value, or
/// nullopt when the value was never written. Indexed like History::ops.
std::vector<std::optional<std::int64_t>> read_mapping(const History& history);

/// Every completed read must return the latest write that happened before
/// it, or a write concurrent with it. The initial value counts as write -1.
std::vector<Violation> check_regularity(const History& history);

/// For reads r1 -> r2 (r1 happens before r2), r2 must not map to an earlier
/// write than r1. Reports one partner per offending r1.
std::vector<Violation> check_no_inversion(const History& history);

Verdict find_stabilization(const History& history);

/// JSON document with atomic_from ("never" when absent), violation_count,
/// up to `max_listed` violations, and stats.
std::string verdict_json(const Verdict& verdict, std::size_t max_listed = 1000);

}  // namespace stabreg
