#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autgrowth/mealy.hpp"
#include "autgrowth/types.hpp"

namespace autgrowth {

enum class AuxMode { free_group, free_product };

/// The cover group used for free reduction: either a free group on S (with a
/// partial inverse map) or a free product of finite factors, one per block.
class AuxiliaryGroup {
 public:
  /// Free group on S. inverse[s] is the generator equal to s^-1 or kNoGen.
  static AuxiliaryGroup free_group(std::vector<Gen> inverse);

  /// Free group whose inverse pairs are detected in G.
  static AuxiliaryGroup free_group(const GeneratorTable& gens);

  /// Free product with declared block tables. table[i] is |B_i| x |B_i| in
  /// block-local order, entries are generators or kNoGen for the identity.
  /// No verification happens here; see verify_factors.
  static AuxiliaryGroup free_product(std::size_t generator_count, std::vector<std::vector<Gen>> blocks,
                                     std::vector<std::vector<Gen>> tables);

  /// Free product whose tables are computed in G. Throws when a block
  /// together with the identity is not closed under multiplication.
  static AuxiliaryGroup free_product(const GeneratorTable& gens, std::vector<std::vector<Gen>> blocks);

  AuxMode mode() const { return mode_; }
  std::size_t generator_count() const { return block_of_.size(); }
  const std::vector<std::vector<Gen>>& blocks() const { return blocks_; }
  int block_of(Gen s) const { return block_of_[s]; }

  /// s*t inside a factor; kNoGen for the identity. Only for same-block pairs.
  Gen product(Gen s, Gen t) const { return product_[s * block_of_.size() + t]; }

  /// Inverse of s in the cover, kNoGen when unknown (free group only).
  Gen inverse(Gen s) const { return inverse_[s]; }

  /// True when appending t to a reduced word ending in s stays reduced.
  bool joins_reduced(Gen s, Gen t) const {
    if (mode_ == AuxMode::free_group) return inverse_[s] != t;
    return block_of_[s] != block_of_[t];
  }

  /// Appends t to a reduced word, keeping it reduced.
  void push_reduced(Word& w, Gen t) const;

  /// Blocks as text, e.g. "a|b,c,d", or "free" in free-group mode.
  std::string describe(const GeneratorTable& gens) const;

 private:
  AuxMode mode_ = AuxMode::free_group;
  std::vector<std::vector<Gen>> blocks_;
  std::vector<int> block_of_;
  std::vector<Gen> product_;
  std::vector<Gen> inverse_;
};

/// Parses "a|b,c,d" into blocks of generators.
std::vector<std::vector<Gen>> parse_blocks(std::string_view text, const GeneratorTable& gens);

/// "free" for the free group on S, otherwise block text as for parse_blocks
/// with tables computed in G.
AuxiliaryGroup make_aux(const GeneratorTable& gens, std::string_view blocks);

/// Free reduction in the cover group.
Word reduce(const Word& w, const AuxiliaryGroup& aux);

bool is_reduced(const Word& w, const AuxiliaryGroup& aux);

/// Positive weight function on S with a floor.
class WeightVector {
 public:
  static constexpr double kDefaultEpsilon = 1e-4;

  WeightVector() = default;
  /// Throws when a value is below epsilon or not finite.
  explicit WeightVector(std::vector<double> values, double epsilon = kDefaultEpsilon);

  static WeightVector uniform(std::size_t n, double epsilon = kDefaultEpsilon);

  /// Clamps values below epsilon (zero allowed in input) and rescales to sum 1.
  static WeightVector normalized(std::vector<double> raw, double epsilon = kDefaultEpsilon);

  std::size_t size() const { return values_.size(); }
  double operator[](Gen s) const { return values_[s]; }
  const std::vector<double>& values() const { return values_; }
  double epsilon() const { return epsilon_; }

  bool operator==(const WeightVector&) const = default;

 private:
  std::vector<double> values_;
  double epsilon_ = kDefaultEpsilon;
};

/// Letter counts N_s(w).
std::vector<std::uint32_t> letter_counts(const Word& w, std::size_t generator_count);

/// Sum_s counts[s] * pi(s), accumulated in generator order.
double weighted_length(std::span<const std::uint32_t> counts, const WeightVector& pi);

struct AuxLength {
  std::size_t syllables = 0;
  double weighted = 0.0;
};

/// Syllable count and weighted length of a reduced word.
AuxLength aux_length(const Word& w, const WeightVector& pi);

/// Triangular constraints pi(st) <= pi(s) + pi(t) - margin for same-block
/// pairs whose product is a generator.
struct TriangularConstraint {
  Gen product;
  Gen left;
  Gen right;
};

std::vector<TriangularConstraint> triangular_constraints(const AuxiliaryGroup& aux);

/// Smallest slack pi(s)+pi(t)-pi(st) over all constraints (+inf when none).
double min_triangular_slack(const WeightVector& pi, const AuxiliaryGroup& aux);

bool is_triangular(const WeightVector& pi, const AuxiliaryGroup& aux, double margin = 0.0);

/// Decides w = e in G: the root permutation of every word reachable by
/// taking sections must be trivial. Sections are reduced in `aux` when given.
/// Always terminates; the closure is finite because sections never get longer.
bool is_identity(const Word& w, const GeneratorTable& gens, const AuxiliaryGroup* aux = nullptr);

/// Decides u = v in G by a coinductive walk over pairs of sections.
bool equal_elements(const Word& u, const Word& v, const GeneratorTable& gens, const AuxiliaryGroup* aux = nullptr);

/// inverse[s] = t when s t = e in G, preferring t = s for involutions.
std::vector<Gen> inverse_map(const GeneratorTable& gens);

struct FactorError {
  Gen left = kNoGen;
  Gen right = kNoGen;
  std::string message;
};

struct FactorReport {
  std::vector<FactorError> errors;
  bool ok() const { return errors.empty(); }
  std::string summary(const GeneratorTable& gens) const;
};

/// Checks that the blocks partition S, that every table is a group table
/// on block + {e}, and that every entry holds in G.
FactorReport verify_factors(const AuxiliaryGroup& aux, const GeneratorTable& gens);

}  // namespace autgrowth
