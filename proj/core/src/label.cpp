#include "stabreg/label.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>

namespace stabreg {
namespace {

std::uint32_t parse_uint(std::string_view text, std::string_view what) {
  std::uint32_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidInput("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return out;
}

}  // namespace

LabelParams LabelParams::for_k(std::uint64_t k) {
  if (k < 2) throw InvalidInput("label parameter k must be at least 2");
  // k*k+1 must fit in 32 bits.
  if (k > 65535) throw InvalidInput("label parameter k too large");
  return LabelParams{static_cast<std::uint32_t>(k)};
}

std::uint64_t label_domain_size(const LabelParams& params) {
  const std::uint64_t universe = params.universe();
  // C(K, k) computed incrementally; each partial product is itself binomial,
  // and dividing out the gcd first keeps the product exact.
  std::uint64_t binom = 1;
  std::uint64_t total = 0;
  for (std::uint64_t i = 1; i <= params.k; ++i) {
    const std::uint64_t g = std::gcd(binom, i);
    const std::uint64_t factor = (universe - params.k + i) / (i / g);
    if (__builtin_mul_overflow(binom / g, factor, &binom)) {
      throw InvalidInput("label domain size overflows 64 bits");
    }
  }
  if (__builtin_mul_overflow(binom, universe, &total)) {
    throw InvalidInput("label domain size overflows 64 bits");
  }
  return total;
}

Label::Label(std::uint32_t sting, std::vector<std::uint32_t> antistings) : sting_(sting) {
  if (antistings.empty()) throw InvalidInput("label needs at least one antisting");
  std::sort(antistings.begin(), antistings.end());
  if (std::adjacent_find(antistings.begin(), antistings.end()) != antistings.end()) {
    throw InvalidInput("label antistings must be distinct");
  }
  if (sting == 0 || antistings.front() == 0) {
    throw InvalidInput("label elements start at 1");
  }
  antistings_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(antistings));
}

bool Label::has_antisting(std::uint32_t x) const {
  return std::binary_search(antistings_->begin(), antistings_->end(), x);
}

void Label::validate(const LabelParams& params) const {
  if (k() != params.k) {
    throw InvalidInput("label " + to_string() + " has " + std::to_string(k()) +
                       " antistings, expected " + std::to_string(params.k));
  }
  if (sting_ > params.universe() || antistings_->back() > params.universe()) {
    throw InvalidInput("label " + to_string() + " leaves the universe 1.." +
                       std::to_string(params.universe()));
  }
}

std::string Label::to_string() const {
  std::string out = "(" + std::to_string(sting_) + "|";
  for (std::size_t i = 0; i < antistings_->size(); ++i) {
    if (i != 0) out += ',';
    out += std::to_string((*antistings_)[i]);
  }
  out += ')';
  return out;
}

Label Label::parse(std::string_view text) {
  if (text.size() < 5 || text.front() != '(' || text.back() != ')') {
    throw InvalidInput("label must look like (s|a1,...,ak): '" + std::string(text) + "'");
  }
  text = text.substr(1, text.size() - 2);
  const auto bar = text.find('|');
  if (bar == std::string_view::npos) {
    throw InvalidInput("label is missing '|': '" + std::string(text) + "'");
  }
  const std::uint32_t sting = parse_uint(text.substr(0, bar), "sting");
  std::vector<std::uint32_t> anti;
  std::string_view rest = text.substr(bar + 1);
  while (true) {
    const auto comma = rest.find(',');
    anti.push_back(parse_uint(rest.substr(0, comma), "antisting"));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return Label(sting, std::move(anti));
}

std::size_t Label::hash() const {
  // FNV-1a over the canonical form.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ULL;
    }
  };
  mix(sting_);
  for (auto a : *antistings_) mix(a);
  return static_cast<std::size_t>(h);
}

bool operator==(const Label& a, const Label& b) {
  if (a.sting_ != b.sting_) return false;
  if (a.antistings_ == b.antistings_) return true;
  return *a.antistings_ == *b.antistings_;
}

bool precedes_b(const Label& a, const Label& b) {
  if (a.k() != b.k()) {
    throw InvalidInput("cannot compare labels of different sizes: " + a.to_string() + " vs " +
                       b.to_string());
  }
  return b.has_antisting(a.sting()) && !a.has_antisting(b.sting());
}

std::uint32_t pick(std::span<const std::uint32_t> candidates) {
  if (candidates.empty()) throw InternalError("pick from an empty candidate set");
  return *std::min_element(candidates.begin(), candidates.end());
}

Label next_b(std::span<const Label> labels, const LabelParams& params) {
  std::vector<const Label*> distinct;
  distinct.reserve(labels.size());
  for (const auto& l : labels) {
    l.validate(params);
    const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                  [&](const Label* d) { return *d == l; });
    if (!seen) distinct.push_back(&l);
  }
  if (distinct.size() > params.k) {
    throw InvalidInput("next_b given " + std::to_string(distinct.size()) +
                       " labels, at most " + std::to_string(params.k) + " allowed");
  }

  const std::uint32_t universe = params.universe();
  // 1: sting of an input; 2: excluded antisting of an input.
  std::vector<std::uint8_t> in_a(universe + 1, 0);
  std::vector<std::uint8_t> excluded(universe + 1, 0);

  std::vector<std::uint32_t> a;
  a.reserve(params.k);
  for (const Label* l : distinct) {
    if (!in_a[l->sting()]) {
      in_a[l->sting()] = 1;
      a.push_back(l->sting());
    }
    for (auto x : l->antistings()) excluded[x] = 1;
  }
  for (std::uint32_t x = 1; a.size() < params.k && x <= universe; ++x) {
    if (!in_a[x]) {
      in_a[x] = 1;
      a.push_back(x);
    }
  }

  std::vector<std::uint32_t> outside_both;
  std::vector<std::uint32_t> outside_inputs;
  for (std::uint32_t x = 1; x <= universe; ++x) {
    if (excluded[x]) continue;
    if (outside_inputs.empty()) outside_inputs.push_back(x);
    if (!in_a[x]) {
      outside_both.push_back(x);
      break;
    }
  }
  if (outside_inputs.empty()) {
    throw InternalError("antistings of the inputs cover the whole universe");
  }
  const std::uint32_t sting = outside_both.empty() ? pick(outside_inputs) : pick(outside_both);
  return Label(sting, std::move(a));
}

}  // namespace stabreg

namespace stabreg {

Label random_label(const LabelParams& params, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> element(1, params.universe());
  std::vector<std::uint32_t> anti;
  anti.reserve(params.k);
  while (anti.size() < params.k) {
    const auto x = element(rng);
    if (std::find(anti.begin(), anti.end(), x) == anti.end()) anti.push_back(x);
  }
  return Label(element(rng), std::move(anti));
}

std::vector<Label> incomparable_family(std::size_t count, const LabelParams& params,
                                       std::mt19937_64& rng, std::span<const Label> others) {
  if (count == 0) return {};
  for (const auto& o : others) o.validate(params);
  if (count - 1 + others.size() > params.k) {
    throw InvalidInput("incomparable family of " + std::to_string(count) +
                       " does not fit in k=" + std::to_string(params.k));
  }

  // Stings must sit in every other label's antistings.
  std::vector<std::uint32_t> pool;
  for (std::uint32_t x = 1; x <= params.universe(); ++x) {
    const bool ok = std::all_of(others.begin(), others.end(),
                                [x](const Label& o) { return o.has_antisting(x); });
    if (ok) pool.push_back(x);
  }
  if (pool.size() < count) {
    throw InvalidInput("not enough shared antistings to build an incomparable family");
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(count);

  std::vector<Label> family;
  family.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::uint32_t> anti;
    anti.reserve(params.k);
    auto add = [&anti](std::uint32_t x) {
      if (std::find(anti.begin(), anti.end(), x) == anti.end()) anti.push_back(x);
    };
    for (std::size_t j = 0; j < count; ++j) {
      if (j != i) add(pool[j]);
    }
    for (const auto& o : others) add(o.sting());
    for (std::uint32_t x = 1; anti.size() < params.k; ++x) add(x);
    family.emplace_back(pool[i], std::move(anti));
  }
  return family;
}

}  // namespace stabreg
