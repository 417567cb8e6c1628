#include "stabreg/register_node.hpp"

#include <algorithm>

namespace stabreg {

ProtocolParams ProtocolParams::derive(std::size_t n, std::size_t c, std::uint64_t r,
                                      std::optional<std::size_t> k_override) {
  if (n < 3) throw InvalidInput("need at least 3 processors");
  if (c < 1) throw InvalidInput("link capacity must be at least 1");
  if (r < 1) throw InvalidInput("sequence bound r must be at least 1");
  ProtocolParams p;
  p.n = n;
  p.c = c;
  p.r = r;
  const std::size_t k = k_override ? *k_override : 2 * p.hidden_epoch_bound();
  p.labels = LabelParams::for_k(k);
  p.queue_capacity = k;
  return p;
}

RegisterNode::RegisterNode(ProcessorId id, std::shared_ptr<const ProtocolParams> params,
                           MaxTs max_ts, Value value, RetransmitPolicy policy)
    : Base(id, params->n, policy),
      params_(std::move(params)),
      max_ts_(std::move(max_ts)),
      value_(std::move(value)) {
  if (is_writer()) epochs_.emplace(params_->queue_capacity);
}

void RegisterNode::corrupt_epochs(EpochsQueue queue) {
  if (!is_writer()) throw InvalidInput("only the writer keeps an epochs queue");
  if (queue.capacity() != params_->queue_capacity) {
    throw InvalidInput("epochs queue capacity does not match protocol parameters");
  }
  epochs_ = std::move(queue);
}

void RegisterNode::begin_write(Value value) {
  if (!is_writer()) throw InvalidInput("only processor 0 writes");
  if (!idle()) throw InvalidInput("write started while another operation is running");
  op_value_ = std::move(value);
  start_query(Stage::kWriteQuery);
}

void RegisterNode::begin_read() {
  if (is_writer()) throw InvalidInput("the writer does not read");
  if (!idle()) throw InvalidInput("read started while another operation is running");
  start_query(Stage::kReadQuery);
}

void RegisterNode::apply_update(const Timestamp& stamp, const Value& value) {
  if (is_writer()) {
    if (stamp.epoch != max_ts_.ml.epoch) epochs_->enqueue(stamp.epoch);
    return;
  }
  if (precedes_e(max_ts_.ml, stamp) && precedes_e(max_ts_.cl, stamp)) {
    max_ts_ = MaxTs{stamp, std::nullopt};
    value_ = value;
  } else if (!precedes_or_equal_e(stamp, max_ts_.ml)) {
    // Evidence: not below ml. Same-epoch stale stamps and ml itself carry no
    // information and would overwrite a useful canceling stamp.
    max_ts_.cl = stamp;
  }
}

std::optional<std::size_t> find_dominant(const std::vector<RegisterNode::Reply>& replies) {
  for (std::size_t m = 0; m < replies.size(); ++m) {
    const Timestamp& top = replies[m].snapshot.ml;
    const bool dominates = std::all_of(replies.begin(), replies.end(), [&](const auto& r) {
      return precedes_or_equal_e(r.snapshot.ml, top) &&
             (!r.snapshot.cl || precedes_or_equal_e(r.snapshot.cl, top));
    });
    if (dominates) return m;
  }
  return std::nullopt;
}

std::optional<Completion<Timestamp>> RegisterNode::on_query_done(Stage stage,
                                                                 std::vector<Reply> replies) {
  if (stage == Stage::kWriteQuery) {
    const Timestamp current = max_ts_.ml;
    bool dominated = true;
    for (const auto& r : replies) {
      for (const MaybeTimestamp& seen : {MaybeTimestamp(r.snapshot.ml), r.snapshot.cl}) {
        if (!seen) continue;
        if (seen->epoch != current.epoch) epochs_->enqueue(seen->epoch);
        if (!precedes_or_equal_e(seen, current)) dominated = false;
      }
    }
    Timestamp next = current;
    if (dominated) {
      next = next_e(current, *epochs_, params_->r, params_->labels);
    } else {
      epochs_->enqueue(current.epoch);
      next = Timestamp{next_b(epochs_->entries(), params_->labels), 0};
      ++stats_.forced_epoch_changes;
    }
    if (next.epoch != current.epoch) ++stats_.epoch_changes;
    max_ts_ = MaxTs{next, std::nullopt};
    value_ = op_value_;
    start_update(Stage::kWriteUpdate, std::move(next), op_value_);
    return std::nullopt;
  }

  const auto chosen = find_dominant(replies);
  if (!chosen) return Completion<Timestamp>{OpKind::kRead, true, {}, std::nullopt};
  op_stamp_ = replies[*chosen].snapshot.ml;
  op_value_ = replies[*chosen].value;
  start_update(Stage::kReadUpdate, *op_stamp_, op_value_);
  return std::nullopt;
}

void RegisterNode::adopt_or_keep(const Timestamp& stamp, const Value& value) {
  // A newer stamp or fresh evidence may have arrived during the write-back;
  // going back to `stamp` then would regress this processor.
  if (precedes_or_equal_e(max_ts_.ml, stamp) && precedes_or_equal_e(max_ts_.cl, stamp)) {
    max_ts_ = MaxTs{stamp, std::nullopt};
    value_ = value;
  }
}

std::optional<Completion<Timestamp>> RegisterNode::on_update_done(Stage stage) {
  if (stage == Stage::kWriteUpdate) {
    return Completion<Timestamp>{OpKind::kWrite, false, op_value_, max_ts_.ml};
  }
  adopt_or_keep(*op_stamp_, op_value_);
  return Completion<Timestamp>{OpKind::kRead, false, op_value_, op_stamp_};
}

}  // namespace stabreg
