#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "autgrowth/element_table.hpp"
#include "autgrowth/mealy.hpp"
#include "autgrowth/words.hpp"

namespace autgrowth {

/// Occurrence counts of a word: letters[s] = N_s(w) and
/// sections[s] = sum over x of N_s(w_x), sections reduced in the cover and
/// identity sections left out.
struct WordStats {
  std::vector<std::uint32_t> letters;
  std::vector<std::uint32_t> sections;

  bool operator==(const WordStats&) const = default;
};

/// (sum_s sections[s] pi_s) / (sum_s letters[s] pi_s), both sums in generator order.
double eta_from_stats(const WordStats& stats, const WeightVector& pi);

/// Counts for a nonempty reduced word. Identity sections are detected with
/// `table` when given, with the section-closure test otherwise.
WordStats word_stats(const Word& w, const GeneratorTable& gens, const AuxiliaryGroup& aux,
                     ElementTable* table = nullptr);

/// Contraction ratio of a word. Throws for the empty word.
double eta_of(const Word& w, const WeightVector& pi, const GeneratorTable& gens, const AuxiliaryGroup& aux,
              ElementTable* table = nullptr);

/// log d / (log d - log eta). Throws unless 0 < eta <= 1 and d >= 2.
double alpha_from(double eta, std::size_t d);

/// Rounds up at the fourth decimal, the way bounds are reported.
double round_up4(double x);

struct EggWord {
  Word word;
  WordStats stats;
  std::size_t level = 0;
};

struct FrontierWord {
  Word word;
  Perm perm;
  std::vector<Word> sections;  // reduced
  WordStats stats;
};

enum class SearchStatus { running, found, radius_exceeded, aborted };

std::string to_string(SearchStatus s);
SearchStatus search_status_from_string(const std::string& s);

struct KeyHasher {
  std::size_t operator()(const std::vector<std::uint32_t>& k) const noexcept;
};

struct SearchConfig {
  double target = 0.99;
  std::size_t radius_cap = 256;
  unsigned workers = 1;
  /// Also drop candidates equal to any word enqueued on an earlier level.
  bool global_dedup = false;
  /// Yolk size at which the search gives up with status aborted.
  std::size_t max_frontier = 20'000'000;
  TableCaps caps;
};

struct LevelEvent {
  std::size_t level = 0;  // length of the words just processed
  std::size_t processed = 0;
  std::size_t accepted = 0;
  std::size_t yolk = 0;
  std::size_t shell = 0;
  double eta_max = 0.0;
  double seconds = 0.0;
};

struct SearchStats {
  std::uint64_t candidates = 0;
  std::uint64_t merged = 0;
  std::uint64_t unknown_ids = 0;
  double seconds = 0.0;
};

struct SearchResult {
  SearchStatus status = SearchStatus::running;
  std::vector<EggWord> egg;
  WeightVector weights;
  double target = 0.0;
  double eta_max = 0.0;
  /// Set only when the search ended with an egg and eta_max < 1.
  std::optional<double> alpha;
  std::size_t radius = 0;
  std::size_t egg_size = 0;
  /// Yolk size after each processed level, and shell size.
  std::vector<std::size_t> per_level_sizes;
  std::vector<std::size_t> per_level_shell;
  SearchStats stats;
};

/// The target semi-algorithm as a steppable object.
///
/// The yolk starts as S. Each step takes the selected yolk words (all words
/// of the shortest length by default), accepts those with eta <= target into
/// the shell and replaces the others by their reduced one-letter extensions.
/// Extensions equal in G to an earlier extension of the same step are
/// dropped, so the first one in lexicographic order represents its element.
class EggSearch {
 public:
  using Filter = std::function<bool(const FrontierWord&, double eta)>;

  EggSearch(const GeneratorTable& gens, const AuxiliaryGroup& aux, WeightVector pi, SearchConfig config,
            std::shared_ptr<ElementTable> table = nullptr);

  /// Processes the yolk words of the shortest length that pass `filter`.
  LevelEvent step(const Filter& filter = {});

  /// Steps until the search leaves the running state.
  SearchResult run(const std::function<void(const LevelEvent&)>& on_level = {});

  /// Switches weights and re-verifies the shell; words above target go back to the yolk.
  void set_weights(WeightVector pi);
  void set_target(double target);
  void abort();

  SearchStatus status() const { return status_; }
  bool done() const { return status_ != SearchStatus::running; }
  /// Length of the next level, 0 when the yolk is empty.
  std::size_t next_level() const;

  const std::vector<EggWord>& shell() const { return shell_; }
  const std::vector<FrontierWord>& yolk() const { return yolk_; }
  const WeightVector& weights() const { return pi_; }
  const SearchConfig& config() const { return config_; }
  double eta(const WordStats& stats) const { return eta_from_stats(stats, pi_); }
  double eta_max() const;
  std::size_t radius() const { return radius_; }
  const SearchStats& stats() const { return stats_; }
  const GeneratorTable& generators() const { return *gens_; }
  const AuxiliaryGroup& aux() const { return *aux_; }
  ElementTable& table() const { return *table_; }

  SearchResult result() const;

  /// Full state: words of shell and yolk, weights, target, counters.
  nlohmann::json checkpoint() const;
  static EggSearch restore(const GeneratorTable& gens, const AuxiliaryGroup& aux, const nlohmann::json& state,
                           std::shared_ptr<ElementTable> table = nullptr);

  /// Frontier record of a reduced word, computed from scratch.
  FrontierWord make_frontier(const Word& w) const;

 private:
  struct Candidate {
    FrontierWord word;
    std::vector<std::uint32_t> key;  // empty when some section id is unknown
  };

  void extend(const FrontierWord& w, std::vector<Candidate>& out) const;
  std::vector<std::uint32_t> fill_counts(FrontierWord& w) const;
  void refresh_status();
  void sort_yolk();

  const GeneratorTable* gens_;
  const AuxiliaryGroup* aux_;
  WeightVector pi_;
  SearchConfig config_;
  std::shared_ptr<ElementTable> table_;
  std::vector<EggWord> shell_;
  std::vector<FrontierWord> yolk_;
  std::size_t radius_ = 0;
  SearchStatus status_ = SearchStatus::running;
  std::vector<std::size_t> per_level_sizes_;
  std::vector<std::size_t> per_level_shell_;
  SearchStats stats_;
  std::unordered_set<std::vector<std::uint32_t>, KeyHasher> seen_;
};

/// One-shot search.
SearchResult search_egg(const GeneratorTable& gens, const AuxiliaryGroup& aux, const WeightVector& pi,
                        const SearchConfig& config, const std::function<void(const LevelEvent&)>& on_level = {});

/// Weights must have one entry per generator and satisfy the triangular
/// inequalities (equality allowed). Throws Error otherwise.
void require_search_weights(const WeightVector& pi, const AuxiliaryGroup& aux);

}  // namespace autgrowth
