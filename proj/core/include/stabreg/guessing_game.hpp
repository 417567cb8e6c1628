#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "stabreg/label.hpp"
#include "stabreg/timestamp.hpp"

namespace stabreg {

/// Label parameters used by the game for a hider bound of m: the finder's
/// queue holds 2m labels, so labels have 2m antistings.
LabelParams game_label_params(std::size_t m);

/// Adversary holding at most m labels the finder cannot see.
class HiderStrategy {
 public:
  HiderStrategy(std::size_t m, LabelParams params) : m_(m), params_(params) {}
  virtual ~HiderStrategy() = default;

  virtual std::string_view name() const = 0;

  /// Either exposes a held label the finder's label does not dominate, or
  /// returns nullopt when every held label is dominated. May rearrange the
  /// held set afterwards, keeping it at most m labels.
  virtual std::optional<Label> respond(const Label& finder_label, std::mt19937_64& rng) = 0;

  const std::vector<Label>& hidden() const { return hidden_; }
  std::size_t m() const { return m_; }

 protected:
  std::vector<std::size_t> undominated(const Label& finder_label) const;

  std::size_t m_;
  LabelParams params_;
  std::vector<Label> hidden_;
};

/// Known strategies: empty, static, random-replace, expose-insert, incomparable.
std::vector<std::string> hider_strategy_names();

/// Throws InvalidInput for an unknown name.
std::unique_ptr<HiderStrategy> make_hider(std::string_view name, std::size_t m,
                                          std::mt19937_64& rng);

struct FinderStep {
  Label label;
  EpochsQueue queue;
};

/// Enqueues the previous choice, then the hider's response, and picks the
/// next label above everything left in the queue.
FinderStep finder_step(EpochsQueue queue, const std::optional<Label>& previous,
                       const std::optional<Label>& response, const LabelParams& params);

struct GameRound {
  std::size_t round = 0;
  Label finder_label;
  std::optional<Label> response;
};

struct GameOptions {
  std::size_t m = 1;
  std::size_t max_rounds = 0;      // 0: 4(m+1)
  std::size_t queue_capacity = 0;  // 0: 2m; smaller values weaken the finder
  std::uint64_t seed = 0;
};

struct GameState {
  EpochsQueue finder_queue;
  std::size_t round = 0;
  std::vector<GameRound> history;
};

struct GameResult {
  bool finder_won = false;
  std::size_t winning_round = 0;
  std::vector<GameRound> transcript;
  // Exposure-validity and queue-front violations found while playing.
  std::vector<std::string> violations;
};

/// Plays until the hider has nothing left to expose or max_rounds elapse.
GameResult play(HiderStrategy& hider, const GameOptions& options);

/// Builds the named hider from the options' seed and plays one game.
GameResult play(std::string_view strategy, const GameOptions& options);

/// One JSON object per round: {"round":..,"finder":"(..)","response":..}.
std::string transcript_jsonl(const GameResult& result);

}  // namespace stabreg
