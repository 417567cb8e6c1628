#pragma once

// Test-only reference for the checker: exhaustive linearization search over
// tiny histories, and a generator of small random traces.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "stabreg/checker.hpp"

namespace stabreg::testing {

/// True iff the completed, non-aborted operations of `h` (plus any subset of
/// pending writes) admit a sequential register order that respects real time.
inline bool brute_force_linearizable(const History& h) {
  std::vector<std::size_t> ops;
  std::vector<std::uint8_t> optional_op;
  for (std::size_t i = 0; i < h.ops.size(); ++i) {
    const auto& op = h.ops[i];
    if (op.aborted) continue;
    if (op.completed()) {
      ops.push_back(i);
      optional_op.push_back(0);
    } else if (op.kind == OpKind::kWrite) {
      ops.push_back(i);
      optional_op.push_back(1);
    }
  }
  const std::size_t count = ops.size();
  std::uint32_t required = 0;
  for (std::size_t j = 0; j < count; ++j) {
    if (!optional_op[j]) required |= 1u << j;
  }
  // must_precede[j]: operations that responded before j was invoked.
  std::vector<std::uint32_t> must_precede(count, 0);
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = 0; b < count; ++b) {
      if (h.ops[ops[a]].precedes(h.ops[ops[b]])) must_precede[b] |= 1u << a;
    }
  }
  // Register contents: index into ops of the last write, or count for initial.
  std::map<std::pair<std::uint32_t, std::size_t>, bool> memo;
  auto search = [&](auto&& self, std::uint32_t done, std::size_t current) -> bool {
    if ((done & required) == required) return true;
    auto key = std::make_pair(done, current);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool ok = false;
    for (std::size_t j = 0; j < count && !ok; ++j) {
      if (done & (1u << j)) continue;
      if ((must_precede[j] & done) != must_precede[j]) continue;
      const auto& op = h.ops[ops[j]];
      if (op.kind == OpKind::kWrite) {
        ok = self(self, done | (1u << j), j);
      } else {
        const Value& held = current == count ? h.initial_value : *h.ops[ops[current]].value;
        if (held == *op.value) ok = self(self, done | (1u << j), current);
      }
    }
    memo[key] = ok;
    return ok;
  };
  return search(search, 0, count);
}

/// Random well-formed trace with at most `max_ops` operations: processor 0
/// writes v#1, v#2, ...; processors 1..readers read values that are often
/// plausible and sometimes not.
inline std::vector<TraceEvent> random_small_trace(std::mt19937_64& rng, std::size_t max_ops = 8,
                                                  std::size_t readers = 3) {
  std::vector<TraceEvent> events;
  const std::size_t procs = readers + 1;
  std::vector<std::int64_t> open(procs, -1);
  std::vector<EventKind> open_kind(procs);
  std::size_t invoked = 0;
  std::size_t writes = 0;
  std::uint64_t op_id = 1;
  std::uint64_t step = 0;
  auto rand = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (std::size_t guard = 0; guard < 200; ++guard) {
    const bool any_open = std::any_of(open.begin(), open.end(), [](auto v) { return v >= 0; });
    if (invoked >= max_ops && !any_open) break;
    const auto p = static_cast<ProcessorId>(rand(procs));
    TraceEvent e;
    e.step = step++;
    e.proc = p;
    if (open[p] < 0) {
      if (invoked >= max_ops) continue;
      e.op_id = op_id++;
      if (p == 0) {
        e.kind = EventKind::kWriteInvoke;
        e.value = "v#" + std::to_string(++writes);
      } else {
        e.kind = EventKind::kReadInvoke;
      }
      open[p] = static_cast<std::int64_t>(e.op_id);
      ++invoked;
    } else {
      // Occasionally leave the last write pending.
      if (p == 0 && invoked >= max_ops && rand(4) == 0) {
        open[p] = -1;
        continue;
      }
      e.op_id = static_cast<std::uint64_t>(open[p]);
      if (p == 0) {
        e.kind = EventKind::kWriteResponse;
      } else {
        e.kind = EventKind::kReadResponse;
        const std::size_t roll = rand(20);
        if (roll == 0) {
          e.aborted = true;
        } else if (roll == 1) {
          e.value = "v#" + std::to_string(writes + 1);
        } else {
          const std::size_t pick = rand(writes + 1);
          e.value = pick == 0 ? std::string("init") : "v#" + std::to_string(pick);
        }
      }
      open[p] = -1;
    }
    events.push_back(std::move(e));
  }
  return events;
}

}  // namespace stabreg::testing
