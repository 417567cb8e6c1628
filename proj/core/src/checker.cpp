#include "stabreg/checker.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "stabreg/error.hpp"
#include "stabreg/timestamp.hpp"

namespace stabreg {
namespace {

std::string where(const TraceEvent& e, std::size_t pos) {
  return "event " + std::to_string(pos) + " (" + std::string(to_string(e.kind)) + ", proc " +
         std::to_string(e.proc) + ", op " + std::to_string(e.op_id) + ")";
}

// Completed-operation index per op (by response position), nullopt for
// pending and aborted operations.
std::vector<std::optional<std::size_t>> completion_index(const History& h) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < h.ops.size(); ++i) {
    if (h.ops[i].completed() && !h.ops[i].aborted) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *h.ops[a].response_pos < *h.ops[b].response_pos;
  });
  std::vector<std::optional<std::size_t>> index(h.ops.size());
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = i;
  return index;
}

bool checked_read(const Operation& op) {
  return op.kind == OpKind::kRead && op.completed() && !op.aborted;
}

}  // namespace

History build_history(const std::vector<TraceEvent>& events, Value initial_value) {
  History h;
  h.initial_value = std::move(initial_value);
  std::unordered_map<ProcessorId, std::size_t> open;
  std::optional<ProcessorId> writer;
  std::unordered_map<Value, std::size_t> written;

  for (std::size_t pos = 0; pos < events.size(); ++pos) {
    const TraceEvent& e = events[pos];
    const bool invoke = e.kind == EventKind::kWriteInvoke || e.kind == EventKind::kReadInvoke;
    const OpKind kind = e.kind == EventKind::kWriteInvoke || e.kind == EventKind::kWriteResponse
                            ? OpKind::kWrite
                            : OpKind::kRead;
    auto it = open.find(e.proc);
    if (invoke) {
      if (it != open.end()) throw MalformedInput(where(e, pos) + ": previous operation still open");
      Operation op;
      op.op_id = e.op_id;
      op.proc = e.proc;
      op.kind = kind;
      op.invoke_pos = pos;
      if (kind == OpKind::kWrite) {
        if (writer && *writer != e.proc) throw MalformedInput(where(e, pos) + ": second writer");
        writer = e.proc;
        if (!e.value) throw MalformedInput(where(e, pos) + ": write without value");
        if (!written.emplace(*e.value, h.ops.size()).second) {
          throw MalformedInput(where(e, pos) + ": value '" + *e.value + "' written twice");
        }
        op.value = e.value;
        h.writes.push_back(h.ops.size());
      }
      open.emplace(e.proc, h.ops.size());
      h.ops.push_back(std::move(op));
      continue;
    }
    if (it == open.end()) throw MalformedInput(where(e, pos) + ": response without invoke");
    Operation& op = h.ops[it->second];
    if (op.kind != kind || op.op_id != e.op_id) {
      throw MalformedInput(where(e, pos) + ": response does not match open operation");
    }
    op.response_pos = pos;
    op.timestamp = e.timestamp;
    if (kind == OpKind::kRead) {
      op.aborted = e.aborted;
      if (!e.aborted) {
        if (!e.value) throw MalformedInput(where(e, pos) + ": read response without value");
        op.value = e.value;
      }
    }
    open.erase(it);
  }
  return h;
}

History build_history(const Trace& trace) {
  auto it = trace.header.find("initial_value");
  return build_history(trace.events, it == trace.header.end() ? Value{"init"} : it->second);
}

std::string_view to_string(ViolationKind kind) {
  return kind == ViolationKind::kRegularity ? "regularity" : "inversion";
}

std::vector<std::optional<std::int64_t>> read_mapping(const History& h) {
  std::unordered_map<std::string_view, std::int64_t> by_value;
  for (std::size_t w = 0; w < h.writes.size(); ++w) {
    by_value.emplace(*h.ops[h.writes[w]].value, static_cast<std::int64_t>(w));
  }
  std::vector<std::optional<std::int64_t>> map(h.ops.size());
  for (std::size_t i = 0; i < h.ops.size(); ++i) {
    const Operation& op = h.ops[i];
    if (!checked_read(op)) continue;
    if (auto it = by_value.find(*op.value); it != by_value.end()) {
      map[i] = it->second;
    } else if (*op.value == h.initial_value) {
      map[i] = -1;
    }
  }
  return map;
}

std::vector<Violation> check_regularity(const History& h) {
  const auto map = read_mapping(h);
  const auto index = completion_index(h);
  std::vector<Violation> out;
  // Writes are sequential, so response positions of completed writes
  // increase with writer order.
  std::vector<std::size_t> write_responses;
  for (std::size_t w : h.writes) {
    if (!h.ops[w].completed()) break;
    write_responses.push_back(*h.ops[w].response_pos);
  }
  for (std::size_t i = 0; i < h.ops.size(); ++i) {
    const Operation& r = h.ops[i];
    if (!checked_read(r)) continue;
    // Latest write that happened before r, -1 if none.
    const auto latest = static_cast<std::int64_t>(
        std::lower_bound(write_responses.begin(), write_responses.end(), r.invoke_pos) -
        write_responses.begin()) - 1;
    Violation v;
    v.op_id = r.op_id;
    v.index = *index[i];
    if (!map[i]) {
      v.detail = "returned '" + *r.value + "', which was never written";
      out.push_back(std::move(v));
      continue;
    }
    const std::int64_t got = *map[i];
    if (got == latest) continue;
    if (got > latest) {
      // Must be concurrent: invoked before r responded.
      if (h.ops[h.writes[static_cast<std::size_t>(got)]].invoke_pos < *r.response_pos) continue;
      v.detail = "returned '" + *r.value + "' before it was written";
    } else {
      v.detail = "returned '" + *r.value + "' although a later write completed before the read";
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Violation> check_no_inversion(const History& h) {
  const auto map = read_mapping(h);
  const auto index = completion_index(h);
  std::vector<std::size_t> reads;
  for (std::size_t i = 0; i < h.ops.size(); ++i) {
    if (checked_read(h.ops[i]) && map[i]) reads.push_back(i);
  }
  // Sorted by invoke position; suffix minimum of the mapped write index.
  std::sort(reads.begin(), reads.end(),
            [&](std::size_t a, std::size_t b) { return h.ops[a].invoke_pos < h.ops[b].invoke_pos; });
  std::vector<std::size_t> suffix_min(reads.size() + 1, 0);
  for (std::size_t j = reads.size(); j-- > 0;) {
    suffix_min[j] = reads[j];
    if (j + 1 < reads.size() && *map[suffix_min[j + 1]] < *map[reads[j]]) {
      suffix_min[j] = suffix_min[j + 1];
    }
  }
  std::vector<Violation> out;
  for (std::size_t r1 : reads) {
    const std::size_t resp = *h.ops[r1].response_pos;
    const auto j = static_cast<std::size_t>(
        std::upper_bound(reads.begin(), reads.end(), resp,
                         [&](std::size_t pos, std::size_t op) { return pos < h.ops[op].invoke_pos; }) -
        reads.begin());
    if (j >= reads.size()) continue;
    const std::size_t r2 = suffix_min[j];
    if (*map[r2] >= *map[r1]) continue;
    Violation v;
    v.kind = ViolationKind::kInversion;
    v.op_id = h.ops[r1].op_id;
    v.later_op_id = h.ops[r2].op_id;
    v.index = *index[r1];
    v.detail = "read returned '" + *h.ops[r1].value + "', a later read returned older '" +
               *h.ops[r2].value + "'";
    out.push_back(std::move(v));
  }
  return out;
}

Verdict find_stabilization(const History& h) {
  Verdict verdict;
  verdict.violations = check_regularity(h);
  auto inversions = check_no_inversion(h);
  verdict.violations.insert(verdict.violations.end(), std::make_move_iterator(inversions.begin()),
                            std::make_move_iterator(inversions.end()));
  std::sort(verdict.violations.begin(), verdict.violations.end(),
            [](const Violation& a, const Violation& b) {
              return a.index != b.index ? a.index < b.index : a.kind < b.kind;
            });

  const auto index = completion_index(h);
  auto& st = verdict.stats;
  for (std::size_t i = 0; i < h.ops.size(); ++i) {
    if (index[i]) ++st.completed_operations;
    if (h.ops[i].aborted) ++st.aborted_reads;
  }
  std::size_t from = 0;
  for (const auto& v : verdict.violations) from = std::max(from, v.index + 1);

  for (std::size_t i = 0; i < h.ops.size(); ++i) {
    if (!index[i]) continue;
    const bool write = h.ops[i].kind == OpKind::kWrite;
    if (*index[i] >= from) {
      ++st.suffix_operations;
      if (write) ++st.suffix_writes;
    } else if (write) {
      ++st.writes_before_stabilization;
    }
  }
  if (st.suffix_operations >= 2) verdict.atomic_from = from;

  // Epoch changes visible in the timestamps of completed writes.
  std::optional<Label> epoch;
  for (std::size_t w : h.writes) {
    const auto& ts = h.ops[w].timestamp;
    if (!ts) continue;
    MaybeTimestamp parsed;
    try {
      parsed = parse_timestamp(*ts);
    } catch (const std::exception&) {
      break;  // not a bounded timestamp
    }
    if (!parsed) continue;
    if (epoch && !(*epoch == parsed->epoch)) ++st.epoch_changes;
    epoch = parsed->epoch;
  }
  return verdict;
}

std::string verdict_json(const Verdict& verdict, std::size_t max_listed) {
  using json = nlohmann::json;
  json j;
  if (verdict.atomic_from) {
    j["atomic_from"] = *verdict.atomic_from;
  } else {
    j["atomic_from"] = "never";
  }
  j["violation_count"] = verdict.violations.size();
  json list = json::array();
  for (std::size_t i = 0; i < verdict.violations.size() && i < max_listed; ++i) {
    const auto& v = verdict.violations[i];
    json item{{"kind", to_string(v.kind)}, {"index", v.index}, {"detail", v.detail}};
    item["ops"] = v.later_op_id ? json::array({v.op_id, *v.later_op_id}) : json::array({v.op_id});
    list.push_back(std::move(item));
  }
  j["violations"] = std::move(list);
  const auto& s = verdict.stats;
  j["stats"] = {{"completed_operations", s.completed_operations},
                {"suffix_operations", s.suffix_operations},
                {"suffix_writes", s.suffix_writes},
                {"writes_before_stabilization", s.writes_before_stabilization},
                {"epoch_changes", s.epoch_changes},
                {"aborted_reads", s.aborted_reads}};
  return j.dump(2);
}

}  // namespace stabreg
