#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "autgrowth/mealy.hpp"

namespace autgrowth {

struct GrowthSeries {
  /// gamma[l] = number of elements of word length at most l.
  std::vector<std::uint64_t> gamma;
  /// True when the ball cap stopped the count; gamma is then a valid prefix.
  bool truncated = false;
  /// Words compared pairwise because the element table gave up on them.
  std::uint64_t fallback_comparisons = 0;
};

struct GrowthOptions {
  std::size_t max_ball = 1'000'000;
  /// Add formal inverses first (symmetrize), so S = S^-1.
  bool symmetric = false;
};

/// Exact ball sizes for uniform weights by breadth-first search over elements.
GrowthSeries growth(const MealyMachine& m, std::size_t max_len, const GrowthOptions& options = {});

nlohmann::json to_json(const GrowthSeries& g);
std::string to_csv(const GrowthSeries& g);

}  // namespace autgrowth
