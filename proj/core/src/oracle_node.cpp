#include "stabreg/oracle_node.hpp"

#include <algorithm>

namespace stabreg {

OracleNode::OracleNode(ProcessorId id, std::size_t n, std::uint64_t max_seq, Value value,
                       RetransmitPolicy policy)
    : Base(id, n, policy), max_seq_(max_seq), value_(std::move(value)) {}

void OracleNode::begin_write(Value value) {
  if (!is_writer()) throw InvalidInput("only processor 0 writes");
  if (!idle()) throw InvalidInput("write started while another operation is running");
  op_value_ = std::move(value);
  start_query(Stage::kWriteQuery);
}

void OracleNode::begin_read() {
  if (is_writer()) throw InvalidInput("the writer does not read");
  if (!idle()) throw InvalidInput("read started while another operation is running");
  start_query(Stage::kReadQuery);
}

void OracleNode::apply_update(const std::uint64_t& seq, const Value& value) {
  if (seq <= max_seq_) return;
  if (is_writer()) ++observed_larger_;
  max_seq_ = seq;
  value_ = value;
}

void OracleNode::collect_sequence_numbers(std::vector<std::uint64_t>& out) const {
  out.push_back(max_seq_);
  if (const auto& p = phase()) {
    for (const auto& r : p->replies) out.push_back(r.snapshot);
  }
  if (const auto& s = pending_update_stamp()) out.push_back(*s);
  for (const auto& m : outbox()) {
    if (m.snapshot) out.push_back(*m.snapshot);
    if (m.stamp) out.push_back(*m.stamp);
  }
}

std::optional<Completion<std::uint64_t>> OracleNode::on_query_done(Stage stage,
                                                                   std::vector<Reply> replies) {
  // Highest sequence number; ties go to the earliest reply.
  std::size_t best = 0;
  for (std::size_t i = 1; i < replies.size(); ++i) {
    if (replies[i].snapshot > replies[best].snapshot) best = i;
  }
  if (stage == Stage::kWriteQuery) {
    if (replies[best].snapshot > max_seq_) ++observed_larger_;
    max_seq_ = std::max(max_seq_, replies[best].snapshot) + 1;
    value_ = op_value_;
    op_seq_ = max_seq_;
    start_update(Stage::kWriteUpdate, op_seq_, op_value_);
    return std::nullopt;
  }
  op_seq_ = replies[best].snapshot;
  op_value_ = replies[best].value;
  start_update(Stage::kReadUpdate, op_seq_, op_value_);
  return std::nullopt;
}

std::optional<Completion<std::uint64_t>> OracleNode::on_update_done(Stage stage) {
  if (stage == Stage::kWriteUpdate) {
    return Completion<std::uint64_t>{OpKind::kWrite, false, op_value_, op_seq_};
  }
  if (op_seq_ >= max_seq_) {
    max_seq_ = op_seq_;
    value_ = op_value_;
  }
  return Completion<std::uint64_t>{OpKind::kRead, false, op_value_, op_seq_};
}

}  // namespace stabreg
