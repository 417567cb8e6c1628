#include "stabreg/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "stabreg/error.hpp"

namespace stabreg {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T out{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw MalformedInput("config key '" + std::string(key) + "': bad number '" +
                         std::string(text) + "'");
  }
  return out;
}

double parse_probability(std::string_view key, std::string_view text) {
  // from_chars for double is missing from older libstdc++.
  std::istringstream in{std::string(text)};
  double v = 0;
  in >> v;
  if (!in || !in.eof()) {
    throw MalformedInput("config key '" + std::string(key) + "': bad number '" +
                         std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw MalformedInput("config key '" + std::string(key) + "': expected true or false");
}

std::vector<CrashEvent> parse_crashes(std::string_view text) {
  std::vector<CrashEvent> out;
  text = trim(text);
  if (text.empty() || text == "none") return out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    const auto at = item.find('@');
    if (at == std::string_view::npos) {
      throw MalformedInput("config key 'crashes': expected proc@step, got '" +
                           std::string(item) + "'");
    }
    out.push_back(CrashEvent{parse_number<ProcessorId>("crashes", trim(item.substr(0, at))),
                             parse_number<std::uint64_t>("crashes", trim(item.substr(at + 1)))});
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

}  // namespace

std::string_view to_string(CorruptionMode mode) {
  switch (mode) {
    case CorruptionMode::kNone: return "none";
    case CorruptionMode::kNearWrap: return "near-wrap";
    case CorruptionMode::kHiddenEpoch: return "hidden-epoch";
    case CorruptionMode::kRandom: return "random";
  }
  return "?";
}

CorruptionMode parse_corruption_mode(std::string_view text) {
  if (text == "none") return CorruptionMode::kNone;
  if (text == "near-wrap") return CorruptionMode::kNearWrap;
  if (text == "hidden-epoch") return CorruptionMode::kHiddenEpoch;
  if (text == "random") return CorruptionMode::kRandom;
  throw MalformedInput("config key 'corruption': unknown mode '" + std::string(text) + "'");
}

std::string_view to_string(ProtocolKind kind) {
  return kind == ProtocolKind::kBounded ? "bounded" : "oracle";
}

ProtocolKind parse_protocol_kind(std::string_view text) {
  if (text == "bounded") return ProtocolKind::kBounded;
  if (text == "oracle") return ProtocolKind::kOracle;
  throw MalformedInput("config key 'protocol': unknown protocol '" + std::string(text) + "'");
}

void Scenario::validate() const {
  if (n < 3) throw InvalidInput("n must be at least 3");
  if (c < 1) throw InvalidInput("c must be at least 1");
  if (r < 1) throw InvalidInput("r must be at least 1");
  if (k_override && *k_override < 2) throw InvalidInput("k_override must be at least 2");
  if (!(loss_prob >= 0.0 && loss_prob < 1.0)) {
    throw InvalidInput("loss_prob must lie in [0, 1)");
  }
  if (!(null_receive_prob >= 0.0 && null_receive_prob < 1.0)) {
    throw InvalidInput("null_receive_prob must lie in [0, 1)");
  }
  if (retransmit.initial_timeout == 0 || retransmit.max_timeout < retransmit.initial_timeout) {
    throw InvalidInput("retransmit timeouts must satisfy 0 < initial <= max");
  }
  if (fairness_window != 0 && fairness_window < 2 * n) {
    throw InvalidInput("fairness_window must be 0 (automatic) or at least 2n");
  }
  std::set<ProcessorId> crashed;
  for (const auto& c : crashes) {
    if (c.processor >= n) {
      throw InvalidInput("crash of processor " + std::to_string(c.processor) +
                         " but n = " + std::to_string(n));
    }
    crashed.insert(c.processor);
  }
  const std::size_t minority_limit = (n + 1) / 2;  // crashes must stay below ceil(n/2)
  if (crashed.size() >= minority_limit) {
    throw InvalidInput(std::to_string(crashed.size()) + " crashes of " + std::to_string(n) +
                       " processors leaves no live majority");
  }
  if (track_potential && protocol != ProtocolKind::kOracle) {
    throw InvalidInput("track_potential applies to the oracle protocol only");
  }
}

std::map<std::string, std::string> Scenario::resolved() const {
  std::map<std::string, std::string> out;
  out["protocol"] = std::string(to_string(protocol));
  out["n"] = std::to_string(n);
  out["c"] = std::to_string(c);
  out["r"] = std::to_string(r);
  out["k_override"] = k_override ? std::to_string(*k_override) : "none";
  out["seed"] = std::to_string(seed);
  out["steps"] = std::to_string(max_steps);
  out["writes"] = std::to_string(writes);
  std::ostringstream lp;
  lp << loss_prob;
  out["loss_prob"] = lp.str();
  std::ostringstream np;
  np << null_receive_prob;
  out["null_receive_prob"] = np.str();
  std::string crash_text;
  for (const auto& c : crashes) {
    if (!crash_text.empty()) crash_text += ",";
    crash_text += std::to_string(c.processor) + "@" + std::to_string(c.step);
  }
  out["crashes"] = crash_text.empty() ? "none" : crash_text;
  out["corruption"] = std::string(to_string(corruption));
  out["fairness_window"] = std::to_string(effective_fairness_window());
  out["reader_think_max"] = std::to_string(reader_think_max);
  out["abort_backoff"] = std::to_string(abort_backoff);
  out["max_read_retries"] = std::to_string(max_read_retries);
  out["retransmit_initial"] = std::to_string(retransmit.initial_timeout);
  out["retransmit_max"] = std::to_string(retransmit.max_timeout);
  out["track_potential"] = track_potential ? "true" : "false";
  out["initial_value"] = initial_value;
  if (!trace_path.empty()) out["trace"] = trace_path;
  if (!metrics_path.empty()) out["metrics"] = metrics_path;
  return out;
}

Scenario parse_scenario(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find_first_of("=:");
    if (eq == std::string_view::npos) {
      throw MalformedInput("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (kv.count(key)) throw MalformedInput("config key '" + key + "' given twice");
    kv[key] = std::string(trim(line.substr(eq + 1)));
  }

  for (const char* required : {"n", "c", "r", "seed", "steps", "writes"}) {
    if (!kv.count(required)) {
      throw MalformedInput("missing config key '" + std::string(required) + "'");
    }
  }

  Scenario s;
  for (const auto& [key, value] : kv) {
    if (key == "n") s.n = parse_number<std::size_t>(key, value);
    else if (key == "c") s.c = parse_number<std::size_t>(key, value);
    else if (key == "r") s.r = parse_number<std::uint64_t>(key, value);
    else if (key == "k_override") {
      if (value != "none") s.k_override = parse_number<std::size_t>(key, value);
    } else if (key == "seed") s.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "steps") s.max_steps = parse_number<std::uint64_t>(key, value);
    else if (key == "writes") s.writes = parse_number<std::uint64_t>(key, value);
    else if (key == "loss_prob") s.loss_prob = parse_probability(key, value);
    else if (key == "null_receive_prob") s.null_receive_prob = parse_probability(key, value);
    else if (key == "crashes") s.crashes = parse_crashes(value);
    else if (key == "corruption") s.corruption = parse_corruption_mode(value);
    else if (key == "protocol") s.protocol = parse_protocol_kind(value);
    else if (key == "fairness_window") s.fairness_window = parse_number<std::uint32_t>(key, value);
    else if (key == "reader_think_max") s.reader_think_max = parse_number<std::uint32_t>(key, value);
    else if (key == "abort_backoff") s.abort_backoff = parse_number<std::uint32_t>(key, value);
    else if (key == "max_read_retries") s.max_read_retries = parse_number<std::uint32_t>(key, value);
    else if (key == "retransmit_initial") {
      s.retransmit.initial_timeout = parse_number<std::uint32_t>(key, value);
    } else if (key == "retransmit_max") {
      s.retransmit.max_timeout = parse_number<std::uint32_t>(key, value);
    } else if (key == "track_potential") s.track_potential = parse_bool(key, value);
    else if (key == "initial_value") s.initial_value = value;
    else if (key == "trace") s.trace_path = value;
    else if (key == "metrics") s.metrics_path = value;
    else throw MalformedInput("unknown config key '" + key + "'");
  }
  return s;
}

}  // namespace stabreg
