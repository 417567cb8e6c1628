#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stabreg/label.hpp"

namespace stabreg {

/// An epoch label together with a sequence number in [0, r].
struct Timestamp {
  Label epoch;
  std::uint64_t seq = 0;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// A timestamp or bottom (std::nullopt). Bottom orders below every timestamp.
using MaybeTimestamp = std::optional<Timestamp>;

/// Timestamp order: epochs ordered by precedes_b, equal epochs by sequence
/// number. Bottom precedes everything except bottom.
bool precedes_e(const MaybeTimestamp& a, const MaybeTimestamp& b);

/// a == b or precedes_e(a, b).
bool precedes_or_equal_e(const MaybeTimestamp& a, const MaybeTimestamp& b);

/// Epoch-only comparison, with bottom below every timestamp.
bool epoch_precedes(const MaybeTimestamp& a, const MaybeTimestamp& b);

/// `(<label>;<seq>)`, or `_` for bottom.
std::string to_string(const MaybeTimestamp& ts);
std::string to_string(const Timestamp& ts);
MaybeTimestamp parse_timestamp(std::string_view text);

/// Bounded move-to-front queue of recently seen epochs, newest first.
class EpochsQueue {
 public:
  explicit EpochsQueue(std::size_t capacity);

  /// Moves `label` to the head, dropping the oldest entry on overflow.
  void enqueue(const Label& label);

  std::span<const Label> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool contains(const Label& label) const;

  friend bool operator==(const EpochsQueue&, const EpochsQueue&) = default;

 private:
  std::size_t capacity_;
  std::vector<Label> entries_;
};

/// Value-returning form of EpochsQueue::enqueue.
EpochsQueue enqueued(EpochsQueue queue, const Label& label);

/// The writer's successor timestamp. Increments the sequence number while it
/// is below `max_seq`; otherwise pushes the current epoch into `queue` and
/// opens a fresh epoch above everything the queue holds.
Timestamp next_e(const Timestamp& current, EpochsQueue& queue, std::uint64_t max_seq,
                 const LabelParams& params);

}  // namespace stabreg
