#include "stabreg/message.hpp"

#include <json.hpp>

namespace stabreg {
namespace {

using nlohmann::json;

json common_fields(MessageKind kind, std::uint64_t nonce, ProcessorId from, ProcessorId to) {
  json j;
  j["kind"] = std::string(to_string(kind));
  j["nonce"] = nonce;
  j["from"] = from;
  j["to"] = to;
  return j;
}

json parse_json(std::string_view line) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("message is not JSON: ") + e.what());
  }
}

template <class Msg>
Msg parse_common(const json& j) {
  Msg msg;
  try {
    msg.kind = parse_message_kind(j.at("kind").get<std::string>());
    msg.nonce = j.at("nonce").get<std::uint64_t>();
    msg.sender = j.at("from").get<ProcessorId>();
    msg.destination = j.at("to").get<ProcessorId>();
    if (j.contains("value")) msg.value = j.at("value").get<std::string>();
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("bad message field: ") + e.what());
  }
  return msg;
}

}  // namespace

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kQrReq: return "QR_REQ";
    case MessageKind::kQrResp: return "QR_RESP";
    case MessageKind::kQwReq: return "QW_REQ";
    case MessageKind::kQwAck: return "QW_ACK";
  }
  return "?";
}

MessageKind parse_message_kind(std::string_view text) {
  if (text == "QR_REQ") return MessageKind::kQrReq;
  if (text == "QR_RESP") return MessageKind::kQrResp;
  if (text == "QW_REQ") return MessageKind::kQwReq;
  if (text == "QW_ACK") return MessageKind::kQwAck;
  throw MalformedInput("unknown message kind '" + std::string(text) + "'");
}

std::string format_message(const Message& msg) {
  json j = common_fields(msg.kind, msg.nonce, msg.sender, msg.destination);
  if (msg.snapshot) {
    j["ml"] = to_string(msg.snapshot->ml);
    j["cl"] = to_string(msg.snapshot->cl);
  }
  if (msg.stamp) j["stamp"] = to_string(*msg.stamp);
  if (msg.snapshot || msg.stamp) j["value"] = msg.value;
  return j.dump();
}

std::string format_message(const OracleMessage& msg) {
  json j = common_fields(msg.kind, msg.nonce, msg.sender, msg.destination);
  if (msg.snapshot) j["seq"] = *msg.snapshot;
  if (msg.stamp) j["stamp"] = *msg.stamp;
  if (msg.snapshot || msg.stamp) j["value"] = msg.value;
  return j.dump();
}

Message parse_message(std::string_view line) {
  const json j = parse_json(line);
  auto msg = parse_common<Message>(j);
  try {
    if (j.contains("ml")) {
      const auto ml = parse_timestamp(j.at("ml").get<std::string>());
      if (!ml) throw MalformedInput("ml cannot be bottom");
      msg.snapshot = MaxTs{*ml, parse_timestamp(j.value("cl", std::string("_")))};
    }
    if (j.contains("stamp")) {
      const auto stamp = parse_timestamp(j.at("stamp").get<std::string>());
      if (!stamp) throw MalformedInput("stamp cannot be bottom");
      msg.stamp = *stamp;
    }
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("bad message field: ") + e.what());
  } catch (const InvalidInput& e) {
    throw MalformedInput(e.what());
  }
  return msg;
}

OracleMessage parse_oracle_message(std::string_view line) {
  const json j = parse_json(line);
  auto msg = parse_common<OracleMessage>(j);
  try {
    if (j.contains("seq")) msg.snapshot = j.at("seq").get<std::uint64_t>();
    if (j.contains("stamp")) msg.stamp = j.at("stamp").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("bad message field: ") + e.what());
  }
  return msg;
}

}  // namespace stabreg
