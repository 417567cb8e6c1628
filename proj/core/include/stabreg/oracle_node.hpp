#pragma once

#include <cstdint>
#include <vector>

#include "stabreg/message.hpp"
#include "stabreg/quorum_node.hpp"

namespace stabreg {

/// Reference register with unbounded integer sequence numbers. Same quorum
/// structure as RegisterNode; never aborts.
class OracleNode : public QuorumNode<OracleNode, std::uint64_t, std::uint64_t> {
 public:
  using Base = QuorumNode<OracleNode, std::uint64_t, std::uint64_t>;
  using Base::Reply;

  OracleNode(ProcessorId id, std::size_t n, std::uint64_t max_seq, Value value,
             RetransmitPolicy policy = {});

  bool is_writer() const { return id() == 0; }

  void begin_write(Value value);
  void begin_read();

  std::uint64_t snapshot() const { return max_seq_; }
  std::uint64_t max_seq() const { return max_seq_; }
  const Value& value() const { return value_; }

  /// Times the writer learned of a sequence number above its own.
  std::uint64_t observed_larger() const { return observed_larger_; }

  void corrupt(std::uint64_t max_seq, Value value) {
    max_seq_ = max_seq;
    value_ = std::move(value);
  }

  void apply_update(const std::uint64_t& seq, const Value& value);

  /// Appends every sequence number held in this processor's state, pending
  /// quorum data and outbox.
  void collect_sequence_numbers(std::vector<std::uint64_t>& out) const;

 private:
  friend Base;

  std::optional<Completion<std::uint64_t>> on_query_done(Stage stage, std::vector<Reply> replies);
  std::optional<Completion<std::uint64_t>> on_update_done(Stage stage);

  std::uint64_t max_seq_;
  Value value_;
  std::uint64_t observed_larger_ = 0;
  Value op_value_;
  std::uint64_t op_seq_ = 0;
};

}  // namespace stabreg
