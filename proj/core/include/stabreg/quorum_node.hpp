#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "stabreg/error.hpp"
#include "stabreg/message.hpp"

namespace stabreg {

enum class OpKind : std::uint8_t { kWrite, kRead };

/// Result of a client operation, reported when its last quorum phase ends.
template <class Stamp>
struct Completion {
  OpKind kind = OpKind::kWrite;
  bool aborted = false;
  Value value;
  std::optional<Stamp> stamp;
};

enum class Stage : std::uint8_t { kWriteQuery, kWriteUpdate, kReadQuery, kReadUpdate };

inline bool is_query(Stage s) { return s == Stage::kWriteQuery || s == Stage::kReadQuery; }

/// Retransmission schedule for unanswered quorum requests, counted in the
/// owning processor's own steps.
struct RetransmitPolicy {
  std::uint32_t initial_timeout = 64;
  std::uint32_t max_timeout = 1024;
};

/// QuorumRead / QuorumWrite machinery shared by the bounded register and the
/// unbounded reference protocol.
///
/// Derived must provide:
///   Snapshot snapshot() const;  const Value& value() const;
///   void apply_update(const Stamp&, const Value&);
///   std::optional<Completion<Stamp>> on_query_done(Stage, std::vector<Reply>);
///   std::optional<Completion<Stamp>> on_update_done(Stage);
///
/// A processor counts itself as a quorum member: its own snapshot answers its
/// queries and its own handler applies its updates, without using a link.
template <class Derived, class Snapshot, class Stamp>
class QuorumNode {
 public:
  using Msg = BasicMessage<Snapshot, Stamp>;
  using StampT = Stamp;

  struct Reply {
    ProcessorId from = 0;
    Snapshot snapshot;
    Value value;
  };

  struct Phase {
    Stage stage = Stage::kWriteQuery;
    std::uint64_t nonce = 0;
    std::vector<std::uint8_t> answered;
    std::vector<Reply> replies;
    std::uint32_t idle_ticks = 0;
    std::uint32_t timeout = 0;
  };

  QuorumNode(ProcessorId id, std::size_t n, RetransmitPolicy policy)
      : id_(id), n_(n), policy_(policy) {
    if (id >= n) throw InvalidInput("processor id out of range");
  }

  ProcessorId id() const { return id_; }
  std::size_t n() const { return n_; }
  std::size_t majority() const { return n_ / 2 + 1; }
  bool idle() const { return !phase_.has_value(); }
  const std::optional<Phase>& phase() const { return phase_; }

  std::deque<Msg>& outbox() { return outbox_; }
  const std::deque<Msg>& outbox() const { return outbox_; }

  /// Stamp being written by the current update phase, if one is running.
  const std::optional<Stamp>& pending_update_stamp() const {
    static const std::optional<Stamp> none;
    return phase_ && !is_query(phase_->stage) ? update_stamp_ : none;
  }

  std::uint64_t next_nonce() const { return next_nonce_; }
  void set_next_nonce(std::uint64_t nonce) { next_nonce_ = nonce; }

  /// Handles one received message. Replies are appended to the outbox.
  std::optional<Completion<Stamp>> deliver(const Msg& msg) {
    if (msg.destination != id_ || msg.sender >= n_ || msg.sender == id_) return std::nullopt;
    switch (msg.kind) {
      case MessageKind::kQrReq: {
        Msg reply{MessageKind::kQrResp, msg.nonce, id_, msg.sender, self().snapshot(),
                  std::nullopt, self().value()};
        outbox_.push_back(std::move(reply));
        return std::nullopt;
      }
      case MessageKind::kQwReq: {
        if (!msg.stamp) return std::nullopt;
        self().apply_update(*msg.stamp, msg.value);
        outbox_.push_back(Msg{MessageKind::kQwAck, msg.nonce, id_, msg.sender, std::nullopt,
                              std::nullopt, {}});
        return std::nullopt;
      }
      case MessageKind::kQrResp: {
        if (!accepts(msg, true) || !msg.snapshot) return std::nullopt;
        record(msg.sender, Reply{msg.sender, *msg.snapshot, msg.value});
        return maybe_finish();
      }
      case MessageKind::kQwAck: {
        if (!accepts(msg, false)) return std::nullopt;
        record(msg.sender, std::nullopt);
        return maybe_finish();
      }
    }
    return std::nullopt;
  }

  /// Called once per step of this processor; re-sends requests that have
  /// gone unanswered for the current timeout.
  void tick() {
    if (!phase_) return;
    if (++phase_->idle_ticks < phase_->timeout) return;
    phase_->idle_ticks = 0;
    phase_->timeout = std::min(phase_->timeout * 2, policy_.max_timeout);
    for (ProcessorId p = 0; p < n_; ++p) {
      if (phase_->answered[p]) continue;
      const bool queued = std::any_of(outbox_.begin(), outbox_.end(), [&](const Msg& m) {
        return m.destination == p && m.nonce == phase_->nonce && is_request(m.kind);
      });
      if (!queued) outbox_.push_back(request_for(p));
    }
  }

 protected:
  void start_query(Stage stage) {
    begin_phase(stage);
    record(id_, Reply{id_, self().snapshot(), self().value()});
    broadcast();
  }

  void start_update(Stage stage, Stamp stamp, Value value) {
    begin_phase(stage);
    update_stamp_ = std::move(stamp);
    update_value_ = std::move(value);
    self().apply_update(*update_stamp_, update_value_);
    record(id_, std::nullopt);
    broadcast();
  }

 private:
  Derived& self() { return static_cast<Derived&>(*this); }
  const Derived& self() const { return static_cast<const Derived&>(*this); }

  void begin_phase(Stage stage) {
    Phase p;
    p.stage = stage;
    p.nonce = next_nonce_++;
    p.answered.assign(n_, 0);
    p.timeout = policy_.initial_timeout;
    phase_ = std::move(p);
  }

  bool accepts(const Msg& msg, bool query) const {
    return phase_ && is_query(phase_->stage) == query && msg.nonce == phase_->nonce &&
           !phase_->answered[msg.sender];
  }

  void record(ProcessorId from, std::optional<Reply> reply) {
    phase_->answered[from] = 1;
    if (reply) phase_->replies.push_back(std::move(*reply));
  }

  std::optional<Completion<Stamp>> maybe_finish() {
    const auto count = std::count(phase_->answered.begin(), phase_->answered.end(), 1);
    if (static_cast<std::size_t>(count) < majority()) return std::nullopt;
    Phase done = std::move(*phase_);
    phase_.reset();
    if (is_query(done.stage)) return self().on_query_done(done.stage, std::move(done.replies));
    return self().on_update_done(done.stage);
  }

  Msg request_for(ProcessorId dest) const {
    if (is_query(phase_->stage)) {
      return Msg{MessageKind::kQrReq, phase_->nonce, id_, dest, std::nullopt, std::nullopt, {}};
    }
    return Msg{MessageKind::kQwReq, phase_->nonce, id_, dest, std::nullopt, update_stamp_,
               update_value_};
  }

  void broadcast() {
    for (ProcessorId p = 0; p < n_; ++p) {
      if (p != id_) outbox_.push_back(request_for(p));
    }
  }

  ProcessorId id_;
  std::size_t n_;
  RetransmitPolicy policy_;
  std::uint64_t next_nonce_ = 1;
  std::optional<Phase> phase_;
  std::optional<Stamp> update_stamp_;
  Value update_value_;
  std::deque<Msg> outbox_;
};

}  // namespace stabreg
