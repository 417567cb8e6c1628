#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "stabreg/checker.hpp"
#include "stabreg/error.hpp"
#include "stabreg/guessing_game.hpp"
#include "stabreg/label.hpp"
#include "stabreg/simulation.hpp"

namespace stabreg::cli {
namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << text;
}

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  Scenario s;
  try {
    s = parse_scenario(read_file(a.config));
    if (a.seed) {
      s.seed = *a.seed;
    } else if (const char* e = env("STABREG_SEED")) {
      s.seed = std::stoull(e);
    }
    s.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  std::string dir = a.out_dir;
  if (dir.empty()) dir = env("STABREG_OUT_DIR") ? env("STABREG_OUT_DIR") : ".";
  const fs::path trace_path = s.trace_path.empty() ? fs::path(dir) / "trace.jsonl" : fs::path(s.trace_path);
  const fs::path metrics_path =
      s.metrics_path.empty() ? fs::path(dir) / "metrics.json" : fs::path(s.metrics_path);

  const Trace trace = run_scenario(s);
  try {
    write_file(trace_path, to_jsonl(trace));
    write_file(metrics_path, metrics_json(trace.metrics) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  const auto& m = trace.metrics;
  out << "steps " << m.steps << ", writes " << m.writes_completed << ", reads "
      << m.reads_completed << " (" << m.reads_aborted << " aborted), epoch changes "
      << m.epoch_changes << "\n"
      << "trace   " << trace_path.string() << "\n"
      << "metrics " << metrics_path.string() << "\n";
  return kOk;
}

int cmd_check(const std::string& path, std::ostream& out, std::ostream& err) {
  Verdict v;
  try {
    v = find_stabilization(build_history(parse_trace_jsonl(read_file(path))));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  out << verdict_json(v) << "\n";
  return v.atomic_from ? kOk : kFailed;
}

struct GameArgs {
  std::size_t m = 1;
  std::string strategy = "static";
  std::size_t seeds = 1;
  std::uint64_t first_seed = 0;
  bool weak_finder = false;
  std::string transcript;
};

int cmd_game(const GameArgs& a, std::ostream& out, std::ostream& err) {
  const auto names = hider_strategy_names();
  if (std::find(names.begin(), names.end(), a.strategy) == names.end()) {
    err << "error: unknown strategy '" << a.strategy << "'\n";
    return kBadInput;
  }
  if (a.m < 1) {
    err << "error: m must be at least 1\n";
    return kBadInput;
  }
  GameOptions opts;
  opts.m = a.m;
  if (a.weak_finder) opts.queue_capacity = a.m;
  std::size_t max_round = 0;
  std::size_t late = 0;
  std::size_t lost = 0;
  std::string transcripts;
  for (std::size_t i = 0; i < a.seeds; ++i) {
    opts.seed = a.first_seed + i;
    const GameResult r = play(a.strategy, opts);
    if (!r.finder_won) {
      ++lost;
    } else {
      max_round = std::max(max_round, r.winning_round);
      if (r.winning_round > a.m + 1) ++late;
    }
    if (!a.transcript.empty()) transcripts += transcript_jsonl(r);
  }
  if (!a.transcript.empty()) {
    try {
      write_file(a.transcript, transcripts);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kBadInput;
    }
  }
  out << "strategy " << a.strategy << ", m " << a.m << ", games " << a.seeds
      << ", finder queue " << (a.weak_finder ? a.m : 2 * a.m) << "\n"
      << "max winning round " << max_round << " (bound " << a.m + 1 << ")\n"
      << "late wins " << late << ", unfinished " << lost << "\n";
  return late == 0 && lost == 0 ? kOk : kFailed;
}

std::vector<Label> parse_labels(const std::vector<std::string>& texts) {
  std::vector<Label> out;
  for (const auto& t : texts) out.push_back(Label::parse(t));
  return out;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-stabilizing bounded-timestamp register simulator", "stabreg"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write trace.jsonl and metrics.json");
  run_cmd->add_option("--config", run.config, "Scenario file (key = value lines)")->required();
  run_cmd->add_option("--seed", run.seed, "Override the config seed (env STABREG_SEED)");
  run_cmd->add_option("--out", run.out_dir, "Output directory (env STABREG_OUT_DIR, default .)");

  std::string trace_path;
  auto* check_cmd = app.add_subcommand("check", "Check a trace for atomicity; print the verdict");
  check_cmd->add_option("trace", trace_path, "JSONL trace")->required();

  GameArgs game;
  auto* game_cmd = app.add_subcommand("game", "Play the finder/hider epoch game");
  game_cmd->add_option("--m", game.m, "Hidden label budget")->required();
  game_cmd->add_option("--strategy", game.strategy, "Hider strategy")->capture_default_str();
  game_cmd->add_option("--seeds", game.seeds, "Number of games")->capture_default_str();
  game_cmd->add_option("--first-seed", game.first_seed, "Seed of the first game");
  game_cmd->add_flag("--weak-finder", game.weak_finder, "Give the finder a queue of m, not 2m");
  game_cmd->add_option("--transcript", game.transcript, "Write per-round JSONL here");

  auto* labels_cmd = app.add_subcommand("labels", "Bounded label utilities");
  labels_cmd->require_subcommand(1);
  std::vector<std::string> pair;
  auto* prec_cmd = labels_cmd->add_subcommand("precedes", "Compare two labels, e.g. '(3|1,2)'");
  prec_cmd->add_option("a", pair)->expected(2)->required();
  std::uint64_t k = 2;
  std::vector<std::string> inputs;
  auto* next_cmd = labels_cmd->add_subcommand("next", "Label every input precedes");
  next_cmd->add_option("--k", k, "Antisting count")->capture_default_str();
  next_cmd->add_option("labels", inputs);

  std::vector<std::string> argv_rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_rest.begin(), argv_rest.end());
  try {
    app.parse(argv_rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }

  try {
    if (*run_cmd) return cmd_run(run, out, err);
    if (*check_cmd) return cmd_check(trace_path, out, err);
    if (*game_cmd) return cmd_game(game, out, err);
    if (*prec_cmd) {
      const Label a = Label::parse(pair[0]);
      const Label b = Label::parse(pair[1]);
      out << (precedes_b(a, b) ? "a<b" : precedes_b(b, a) ? "b<a" : a == b ? "equal" : "incomparable")
          << "\n";
      return kOk;
    }
    if (*next_cmd) {
      const auto params = LabelParams::for_k(k);
      const auto labels = parse_labels(inputs);
      out << next_b(labels, params).to_string() << "\n";
      return kOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}

}  // namespace stabreg::cli
