#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "stabreg/label.hpp"
#include "stabreg/message.hpp"
#include "stabreg/quorum_node.hpp"
#include "stabreg/timestamp.hpp"

namespace stabreg {

/// System-wide protocol parameters.
struct ProtocolParams {
  std::size_t n = 3;
  std::size_t c = 1;
  std::uint64_t r = 64;
  LabelParams labels;
  std::size_t queue_capacity = 2;

  /// Upper bound m on the epochs a configuration can hold: two per processor
  /// plus two per message over 2(n^2-n) links of capacity c. The writer's
  /// queue holds 2m labels and labels have 2m antistings. A k override
  /// shrinks both to k. Throws InvalidInput on n < 3, c < 1, r < 1.
  static ProtocolParams derive(std::size_t n, std::size_t c, std::uint64_t r,
                               std::optional<std::size_t> k_override = std::nullopt);

  std::size_t hidden_epoch_bound() const { return 2 * n + 4 * c * n * (n - 1); }
  std::size_t majority() const { return n / 2 + 1; }
};

struct WriterStats {
  std::uint64_t epoch_changes = 0;
  // Epoch changes forced by a competing timestamp rather than by sequence
  // numbers running out.
  std::uint64_t forced_epoch_changes = 0;
};

/// One processor of the bounded-timestamp register. Processor 0 is the
/// writer; everybody else is a reader. All processors are quorum members.
class RegisterNode : public QuorumNode<RegisterNode, MaxTs, Timestamp> {
 public:
  using Base = QuorumNode<RegisterNode, MaxTs, Timestamp>;
  using Base::Reply;

  RegisterNode(ProcessorId id, std::shared_ptr<const ProtocolParams> params, MaxTs max_ts,
               Value value, RetransmitPolicy policy = {});

  bool is_writer() const { return id() == 0; }

  /// Writer only; throws InvalidInput otherwise or if an operation is running.
  void begin_write(Value value);
  /// Readers only; throws InvalidInput otherwise or if an operation is running.
  void begin_read();

  MaxTs snapshot() const { return max_ts_; }
  const MaxTs& max_ts() const { return max_ts_; }
  const Value& value() const { return value_; }
  const std::optional<EpochsQueue>& epochs() const { return epochs_; }
  const WriterStats& writer_stats() const { return stats_; }
  const ProtocolParams& params() const { return *params_; }

  // Raw state access for building arbitrary initial configurations.
  void corrupt(MaxTs max_ts, Value value) {
    max_ts_ = std::move(max_ts);
    value_ = std::move(value);
  }
  void corrupt_epochs(EpochsQueue queue);

  // Quorum member handler for QW_REQ, also applied to the processor's own
  // updates.
  void apply_update(const Timestamp& stamp, const Value& value);

 private:
  friend Base;

  std::optional<Completion<Timestamp>> on_query_done(Stage stage, std::vector<Reply> replies);
  std::optional<Completion<Timestamp>> on_update_done(Stage stage);
  void adopt_or_keep(const Timestamp& stamp, const Value& value);

  std::shared_ptr<const ProtocolParams> params_;
  MaxTs max_ts_;
  Value value_;
  std::optional<EpochsQueue> epochs_;
  WriterStats stats_;
  Value op_value_;
  std::optional<Timestamp> op_stamp_;
};

/// Index of the reply whose ml is at least every ml and every non-bottom cl
/// among `replies`, or nullopt when no reply qualifies.
std::optional<std::size_t> find_dominant(const std::vector<RegisterNode::Reply>& replies);

}  // namespace stabreg
