#pragma once

#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "autgrowth/egg_search.hpp"
#include "autgrowth/weight_opt.hpp"

namespace autgrowth {

/// Machine, generators and cover group bundled so searches can point into them.
struct Problem {
  Problem(MealyMachine machine, std::string machine_ref, std::string blocks);
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  MealyMachine machine;
  std::string machine_ref;
  std::string blocks;
  GeneratorTable gens;
  AuxiliaryGroup aux;
};

/// Builtin name or automaton file, with the builtin partition when `blocks` is empty.
std::shared_ptr<Problem> load_problem(const std::string& machine_ref, const std::string& blocks = "");

enum class StrategyKind { rec, opt, ovi, loop };
std::string to_string(StrategyKind k);

struct RoundRecord {
  double target = 0.0;
  std::vector<double> weights_in;
  std::vector<double> weights_out;
  SearchStatus status = SearchStatus::running;
  /// eta_max of the egg under the search weights.
  double search_eta = 0.0;
  /// eta of the egg under weights_out; equals search_eta when no final optimization ran.
  double eta = 0.0;
  std::optional<double> alpha;
  std::size_t radius = 0;
  std::size_t egg_size = 0;
  std::size_t reweights = 0;
  std::vector<std::size_t> per_level_sizes;
  /// Search state at the end of the round.
  nlohmann::json checkpoint;
};

struct StrategyRun {
  StrategyKind kind = StrategyKind::rec;
  std::vector<RoundRecord> rounds;

  /// Last round that ended with an egg.
  const RoundRecord* best() const;
  nlohmann::json to_json() const;
};

/// Reported after each optimization inside a search.
struct ReweightEvent {
  std::size_t level = 0;
  std::size_t rows = 0;
  double eta_before = 0.0;
  double eta_after = 0.0;
};

struct StrategyOptions {
  SearchConfig search;
  OptOptions opt;
  /// Optimize over shell and yolk before every level divisible by this; 0 never.
  std::size_t update = 0;
  std::function<void(const LevelEvent&)> on_level;
  std::function<void(const ReweightEvent&)> on_reweight;
};

/// One target search with optional reweighting every `update` levels.
/// Returns the finished search so callers can inspect it.
EggSearch search_with_updates(const Problem& p, const WeightVector& pi, const StrategyOptions& options,
                              std::size_t* reweights = nullptr);

/// Rounds of search followed by optimization over the egg. Round k+1 starts
/// from the weights of round k with the k+1-th target. Stops after the last
/// target or the first round without an egg. A start outside the triangular
/// polytope is projected onto it first.
StrategyRun run_opt(const Problem& p, const WeightVector& start, const std::vector<double>& targets,
                    const StrategyOptions& options);

/// A single search that reweights over shell and yolk every `update` levels.
StrategyRun run_ovi(const Problem& p, const WeightVector& start, double target, const StrategyOptions& options);

/// Selects words of shell and yolk.
struct Selector {
  enum class Kind { all, eta, level, regex, shell, yolk };
  Kind kind = Kind::all;
  double lo = 0.0;
  double hi = 0.0;
  std::string pattern;

  /// {"kind": "all"|"shell"|"yolk"} or {"kind":"eta","min","max"} or
  /// {"kind":"level","min","max"} or {"kind":"regex","pattern"}. Throws CommandError.
  static Selector from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

class CommandError : public Error {
 public:
  enum class Code { invalid, stopped };
  CommandError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

inline constexpr std::size_t kHistogramBins = 50;
inline constexpr double kHistogramMax = 2.0;

/// Interactive strategy. Commands are JSON objects with an "op" field:
///   expand {filter?}, optimize {subset?, restarts?, iterations?, seed?},
///   set_target {target}, checkpoint, rollback {id}, stop.
/// Snapshots contain no timings, so equal command sequences give equal bytes.
class Session {
 public:
  Session(std::shared_ptr<const Problem> problem, WeightVector start, SearchConfig config);

  nlohmann::json apply(const nlohmann::json& command);
  nlohmann::json snapshot() const;

  bool stopped() const { return stopped_; }
  const EggSearch& search() const { return *search_; }
  const Problem& problem() const { return *problem_; }
  /// Progress of the last expand, for event streams.
  const std::optional<LevelEvent>& last_event() const { return last_event_; }

 private:
  struct Saved {
    nlohmann::json search;
    nlohmann::json history;
  };

  void expand(const nlohmann::json& cmd);
  void optimize(const nlohmann::json& cmd);
  void record();

  std::shared_ptr<const Problem> problem_;
  std::shared_ptr<ElementTable> table_;
  std::unique_ptr<EggSearch> search_;
  bool stopped_ = false;
  nlohmann::json history_ = nlohmann::json::array();
  std::vector<Saved> checkpoints_;
  std::optional<LevelEvent> last_event_;
};

/// Counts of frontier eta values in kHistogramBins equal bins on [0, kHistogramMax];
/// values at or above the top go to "overflow".
nlohmann::json eta_histogram(const EggSearch& s);

}  // namespace autgrowth
