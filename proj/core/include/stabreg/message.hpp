#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "stabreg/timestamp.hpp"

namespace stabreg {

using ProcessorId = std::uint32_t;
using Value = std::string;

enum class MessageKind : std::uint8_t { kQrReq, kQrResp, kQwReq, kQwAck };

std::string_view to_string(MessageKind kind);
MessageKind parse_message_kind(std::string_view text);

inline bool is_request(MessageKind kind) {
  return kind == MessageKind::kQrReq || kind == MessageKind::kQwReq;
}

/// Main and canceling timestamps held by every processor.
struct MaxTs {
  Timestamp ml;
  MaybeTimestamp cl;

  friend bool operator==(const MaxTs&, const MaxTs&) = default;
};

/// Quorum protocol message. QR_RESP carries `snapshot` and `value`; QW_REQ
/// carries `stamp` and `value`; the other kinds carry only the nonce.
template <class Snapshot, class Stamp>
struct BasicMessage {
  MessageKind kind = MessageKind::kQrReq;
  std::uint64_t nonce = 0;
  ProcessorId sender = 0;
  ProcessorId destination = 0;
  std::optional<Snapshot> snapshot;
  std::optional<Stamp> stamp;
  Value value;

  friend bool operator==(const BasicMessage&, const BasicMessage&) = default;
};

using Message = BasicMessage<MaxTs, Timestamp>;
using OracleMessage = BasicMessage<std::uint64_t, std::uint64_t>;

/// One JSON object per message:
/// {"kind":"QW_REQ","nonce":7,"from":1,"to":2,"stamp":"((3|1,2);4)","value":"v#3"}
/// QR_RESP uses "ml" and "cl" fields for the bounded protocol and "seq" for
/// the unbounded one.
std::string format_message(const Message& msg);
std::string format_message(const OracleMessage& msg);
Message parse_message(std::string_view line);
OracleMessage parse_oracle_message(std::string_view line);

}  // namespace stabreg
