#include "stabreg/guessing_game.hpp"

#include <algorithm>
#include <unordered_set>

#include <json.hpp>

namespace stabreg {
namespace {

std::vector<Label> distinct_random_labels(std::size_t count, const LabelParams& params,
                                          std::mt19937_64& rng) {
  std::vector<Label> out;
  while (out.size() < count) {
    Label l = random_label(params, rng);
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(std::move(l));
  }
  return out;
}

std::size_t pick_index(const std::vector<std::size_t>& options, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, options.size() - 1);
  return options[d(rng)];
}

class EmptyHider final : public HiderStrategy {
 public:
  using HiderStrategy::HiderStrategy;
  std::string_view name() const override { return "empty"; }
  std::optional<Label> respond(const Label&, std::mt19937_64&) override { return std::nullopt; }
};

// Holds m random labels and never changes them.
class StaticHider final : public HiderStrategy {
 public:
  StaticHider(std::size_t m, LabelParams params, std::mt19937_64& rng)
      : HiderStrategy(m, params) {
    hidden_ = distinct_random_labels(m, params, rng);
  }
  std::string_view name() const override { return "static"; }
  std::optional<Label> respond(const Label& finder_label, std::mt19937_64& rng) override {
    const auto open = undominated(finder_label);
    if (open.empty()) return std::nullopt;
    return hidden_[pick_index(open, rng)];
  }
};

// Exposes a random label, then half the time swaps a random held label for
// the finder's label.
class RandomReplaceHider final : public HiderStrategy {
 public:
  RandomReplaceHider(std::size_t m, LabelParams params, std::mt19937_64& rng)
      : HiderStrategy(m, params) {
    hidden_ = distinct_random_labels(m, params, rng);
  }
  std::string_view name() const override { return "random-replace"; }
  std::optional<Label> respond(const Label& finder_label, std::mt19937_64& rng) override {
    const auto open = undominated(finder_label);
    if (open.empty()) return std::nullopt;
    Label exposed = hidden_[pick_index(open, rng)];
    if (std::bernoulli_distribution(0.5)(rng)) {
      std::uniform_int_distribution<std::size_t> d(0, hidden_.size() - 1);
      hidden_[d(rng)] = finder_label;
    }
    return exposed;
  }
};

// Replaces every exposed label with the finder's label that exposed it, so
// the hider keeps recycling the finder's own history.
class ExposeInsertHider final : public HiderStrategy {
 public:
  ExposeInsertHider(std::size_t m, LabelParams params, std::mt19937_64& rng)
      : HiderStrategy(m, params) {
    hidden_ = distinct_random_labels(m, params, rng);
  }
  std::string_view name() const override { return "expose-insert"; }
  std::optional<Label> respond(const Label& finder_label, std::mt19937_64&) override {
    const auto open = undominated(finder_label);
    if (open.empty()) return std::nullopt;
    Label exposed = hidden_[open.front()];
    hidden_[open.front()] = finder_label;
    return exposed;
  }
};

// m pairwise incomparable labels whose antistings cover the small elements
// next_b prefers for its stings.
class IncomparableHider final : public HiderStrategy {
 public:
  IncomparableHider(std::size_t m, LabelParams params, std::mt19937_64& rng)
      : HiderStrategy(m, params) {
    hidden_ = incomparable_family(m, params, rng);
  }
  std::string_view name() const override { return "incomparable"; }
  std::optional<Label> respond(const Label& finder_label, std::mt19937_64& rng) override {
    const auto open = undominated(finder_label);
    if (open.empty()) return std::nullopt;
    return hidden_[pick_index(open, rng)];
  }
};

}  // namespace

LabelParams game_label_params(std::size_t m) {
  if (m == 0) throw InvalidInput("game needs m >= 1");
  return LabelParams::for_k(2 * m);
}

std::vector<std::size_t> HiderStrategy::undominated(const Label& finder_label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < hidden_.size(); ++i) {
    if (!precedes_b(hidden_[i], finder_label)) out.push_back(i);
  }
  return out;
}

std::vector<std::string> hider_strategy_names() {
  return {"empty", "static", "random-replace", "expose-insert", "incomparable"};
}

std::unique_ptr<HiderStrategy> make_hider(std::string_view name, std::size_t m,
                                          std::mt19937_64& rng) {
  const LabelParams params = game_label_params(m);
  if (name == "empty") return std::make_unique<EmptyHider>(m, params);
  if (name == "static") return std::make_unique<StaticHider>(m, params, rng);
  if (name == "random-replace") return std::make_unique<RandomReplaceHider>(m, params, rng);
  if (name == "expose-insert") return std::make_unique<ExposeInsertHider>(m, params, rng);
  if (name == "incomparable") return std::make_unique<IncomparableHider>(m, params, rng);
  throw InvalidInput("unknown hider strategy '" + std::string(name) + "'");
}

FinderStep finder_step(EpochsQueue queue, const std::optional<Label>& previous,
                       const std::optional<Label>& response, const LabelParams& params) {
  if (previous) queue.enqueue(*previous);
  if (response) queue.enqueue(*response);
  Label next = next_b(queue.entries(), params);
  return FinderStep{std::move(next), std::move(queue)};
}

GameResult play(HiderStrategy& hider, const GameOptions& options) {
  const std::size_t m = options.m;
  const LabelParams params = game_label_params(m);
  const std::size_t capacity = options.queue_capacity ? options.queue_capacity : 2 * m;
  const std::size_t max_rounds = options.max_rounds ? options.max_rounds : 4 * (m + 1);
  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);

  GameResult result;
  GameState state{EpochsQueue(capacity), 0, {}};
  std::optional<Label> previous;
  std::optional<Label> response;
  // Every label the finder has chosen or been shown so far.
  std::vector<Label> seen;

  while (state.round < max_rounds) {
    ++state.round;
    FinderStep step = finder_step(std::move(state.finder_queue), previous, response, params);
    state.finder_queue = std::move(step.queue);

    if (seen.size() <= capacity) {
      const auto front = state.finder_queue.entries().first(
          std::min(seen.size(), state.finder_queue.size()));
      const bool matches =
          front.size() == seen.size() &&
          std::all_of(seen.begin(), seen.end(), [&](const Label& l) {
            return std::find(front.begin(), front.end(), l) != front.end();
          });
      if (!matches) {
        result.violations.push_back("round " + std::to_string(state.round) +
                                    ": queue front does not hold the game history");
      }
    }

    std::optional<Label> reply = hider.respond(step.label, rng);
    if (reply && precedes_b(*reply, step.label)) {
      result.violations.push_back("round " + std::to_string(state.round) + ": hider exposed " +
                                  reply->to_string() + " which the finder's label dominates");
    }
    if (hider.hidden().size() > m) {
      result.violations.push_back("round " + std::to_string(state.round) +
                                  ": hider holds more than m labels");
    }
    state.history.push_back(GameRound{state.round, step.label, reply});

    if (!reply) {
      result.finder_won = true;
      result.winning_round = state.round;
      break;
    }
    for (const Label* l : {&step.label, &*reply}) {
      if (std::find(seen.begin(), seen.end(), *l) == seen.end()) seen.push_back(*l);
    }
    previous = std::move(step.label);
    response = std::move(reply);
  }
  result.transcript = std::move(state.history);
  return result;
}

GameResult play(std::string_view strategy, const GameOptions& options) {
  std::mt19937_64 rng(options.seed);
  auto hider = make_hider(strategy, options.m, rng);
  return play(*hider, options);
}

std::string transcript_jsonl(const GameResult& result) {
  std::string out;
  for (const auto& r : result.transcript) {
    nlohmann::json line;
    line["round"] = r.round;
    line["finder"] = r.finder_label.to_string();
    line["response"] = r.response ? nlohmann::json(r.response->to_string()) : nlohmann::json();
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace stabreg
