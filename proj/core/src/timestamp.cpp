#include "stabreg/timestamp.hpp"

#include <algorithm>
#include <charconv>

namespace stabreg {

bool precedes_e(const MaybeTimestamp& a, const MaybeTimestamp& b) {
  if (!b) return false;
  if (!a) return true;
  if (a->epoch == b->epoch) return a->seq < b->seq;
  return precedes_b(a->epoch, b->epoch);
}

bool precedes_or_equal_e(const MaybeTimestamp& a, const MaybeTimestamp& b) {
  return a == b || precedes_e(a, b);
}

bool epoch_precedes(const MaybeTimestamp& a, const MaybeTimestamp& b) {
  if (!b) return false;
  if (!a) return true;
  return precedes_b(a->epoch, b->epoch);
}

std::string to_string(const Timestamp& ts) {
  return "(" + ts.epoch.to_string() + ";" + std::to_string(ts.seq) + ")";
}

std::string to_string(const MaybeTimestamp& ts) { return ts ? to_string(*ts) : "_"; }

MaybeTimestamp parse_timestamp(std::string_view text) {
  if (text == "_") return std::nullopt;
  const auto semi = text.rfind(';');
  if (text.size() < 4 || text.front() != '(' || text.back() != ')' ||
      semi == std::string_view::npos) {
    throw InvalidInput("timestamp must look like (<label>;<seq>): '" + std::string(text) + "'");
  }
  const auto seq_text = text.substr(semi + 1, text.size() - semi - 2);
  std::uint64_t seq = 0;
  auto [ptr, ec] = std::from_chars(seq_text.data(), seq_text.data() + seq_text.size(), seq);
  if (ec != std::errc{} || ptr != seq_text.data() + seq_text.size() || seq_text.empty()) {
    throw InvalidInput("bad sequence number in '" + std::string(text) + "'");
  }
  return Timestamp{Label::parse(text.substr(1, semi - 1)), seq};
}

EpochsQueue::EpochsQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidInput("epochs queue capacity must be positive");
  entries_.reserve(capacity);
}

void EpochsQueue::enqueue(const Label& label) {
  auto it = std::find(entries_.begin(), entries_.end(), label);
  if (it != entries_.end()) {
    std::rotate(entries_.begin(), it, it + 1);
    return;
  }
  if (entries_.size() == capacity_) entries_.pop_back();
  entries_.insert(entries_.begin(), label);
}

bool EpochsQueue::contains(const Label& label) const {
  return std::find(entries_.begin(), entries_.end(), label) != entries_.end();
}

EpochsQueue enqueued(EpochsQueue queue, const Label& label) {
  queue.enqueue(label);
  return queue;
}

Timestamp next_e(const Timestamp& current, EpochsQueue& queue, std::uint64_t max_seq,
                 const LabelParams& params) {
  if (current.seq < max_seq) return Timestamp{current.epoch, current.seq + 1};
  queue.enqueue(current.epoch);
  return Timestamp{next_b(queue.entries(), params), 0};
}

}  // namespace stabreg
