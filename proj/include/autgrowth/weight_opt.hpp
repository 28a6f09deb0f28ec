#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "autgrowth/egg_search.hpp"
#include "autgrowth/words.hpp"

namespace autgrowth {

/// Feasible set: sum 1, floors pi_s >= epsilon, pi_st <= pi_s + pi_t - margin
/// inside each block, and pi_s = pi_{s^-1} for distinct inverse pairs.
struct WeightConstraints {
  std::size_t size = 0;
  double epsilon = WeightVector::kDefaultEpsilon;
  double margin = 1e-6;
  std::vector<TriangularConstraint> triangles;
  std::vector<std::pair<Gen, Gen>> pairs;

  static WeightConstraints from_aux(const AuxiliaryGroup& aux, double epsilon = WeightVector::kDefaultEpsilon,
                                    double margin = 1e-6);

  /// Most negative constraint residual (0 when feasible), including sum and floors.
  double violation(const std::vector<double>& pi) const;
  bool feasible(const std::vector<double>& pi, double tol = 1e-12) const;
  /// Slack of every triangular constraint, pi_s + pi_t - pi_st - margin.
  std::vector<double> slacks(const std::vector<double>& pi) const;
};

/// max over words of (sum_s C[w][s] pi_s) / (sum_s N[w][s] pi_s). Rows with
/// identical counts are stored once.
class MinimaxProblem {
 public:
  MinimaxProblem(const std::vector<WordStats>& rows, WeightConstraints constraints);

  std::size_t words() const { return word_count_; }
  std::size_t distinct_rows() const { return first_index_.size(); }
  std::size_t size() const { return constraints_.size; }
  const WeightConstraints& constraints() const { return constraints_; }

  struct Value {
    double value = 0.0;
    std::size_t argmax = 0;  // index into the original rows
  };
  /// Ties within 1e-12 of the max go to the lowest word index.
  Value objective(const std::vector<double>& pi) const;

  /// Gradient of the ratio of word `index` at pi.
  std::vector<double> ratio_gradient(std::size_t index, const std::vector<double>& pi) const;
  double ratio(std::size_t index, const std::vector<double>& pi) const;

 private:
  std::size_t row_of(std::size_t word) const { return row_of_word_[word]; }

  WeightConstraints constraints_;
  std::size_t word_count_ = 0;
  std::vector<double> n_;  // distinct rows, row-major
  std::vector<double> c_;
  std::vector<std::size_t> first_index_;
  std::vector<std::size_t> row_of_word_;
};

struct OptOptions {
  unsigned restarts = 16;
  unsigned iterations = 2000;
  double step = 0.05;
  double decay = 0.999;
  double inertia = 0.9;
  double tolerance = 1e-7;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Average the gradients of all ratios within 1e-12 of the max instead of
  /// taking the lowest-index one.
  bool average_active = false;
};

struct OptResult {
  std::vector<double> weights;
  double eta = 0.0;
  std::size_t argmax = 0;
  /// Objective at the last iterate of the winning run.
  double final_eta = 0.0;
  /// Best objective among the starting points.
  double start_eta = 0.0;
  std::size_t iterations = 0;
  unsigned restarts_used = 0;
  std::vector<double> slacks;
};

/// Euclidean projection onto the feasible set (Dykstra on simplex, halfspaces
/// and pair equalities), finished by blending toward uniform until exactly
/// feasible. Returns the input unchanged when it is already feasible.
/// Throws Error when the set is empty.
std::vector<double> project_feasible(const std::vector<double>& raw, const WeightConstraints& constraints);

/// Multi-start projected subgradient with heavy-ball momentum. `start`, when
/// given, is tried first. Deterministic for a fixed seed and any worker count.
OptResult optimize(const MinimaxProblem& problem, const OptOptions& options,
                   const std::optional<std::vector<double>>& start = std::nullopt);

}  // namespace autgrowth
