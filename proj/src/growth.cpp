#include "autgrowth/growth.hpp"

#include <sstream>
#include <unordered_set>

#include "autgrowth/element_table.hpp"
#include "autgrowth/words.hpp"

namespace autgrowth {

GrowthSeries growth(const MealyMachine& machine, std::size_t max_len, const GrowthOptions& options) {
  const MealyMachine m = options.symmetric ? symmetrize(machine) : machine;
  GeneratorTable gens(m);
  auto aux = AuxiliaryGroup::free_group(gens);
  ElementTable table(gens, &aux);

  GrowthSeries out;
  out.gamma.push_back(1);
  std::unordered_set<ElementId> seen{0};
  // representatives of elements the table could not name, compared directly
  std::vector<Word> unnamed;
  std::vector<Word> all_words{Word{}};
  std::vector<Word> sphere{Word{}};

  auto known_elsewhere = [&](const Word& w) {
    for (const auto& v : all_words) {
      ++out.fallback_comparisons;
      if (equal_elements(w, v, gens, &aux)) return true;
    }
    return false;
  };

  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const auto& w : sphere) {
      for (Gen s = 0; s < gens.size(); ++s) {
        Word v = w;
        v.push_back(s);
        if (auto id = table.canonical_id(v)) {
          if (!seen.insert(*id).second) continue;
          // an unnamed element found earlier may be this one
          bool dup = false;
          for (const auto& u : unnamed) {
            ++out.fallback_comparisons;
            if (equal_elements(u, v, gens, &aux)) {
              dup = true;
              break;
            }
          }
          if (dup) continue;
        } else {
          if (known_elsewhere(v)) continue;
          unnamed.push_back(v);
        }
        next.push_back(v);
        all_words.push_back(std::move(v));
        if (all_words.size() > options.max_ball) {
          out.truncated = true;
          return out;
        }
      }
    }
    out.gamma.push_back(out.gamma.back() + next.size());
    sphere = std::move(next);
  }
  return out;
}

nlohmann::json to_json(const GrowthSeries& g) {
  return {{"gamma", g.gamma}, {"truncated", g.truncated}, {"fallback_comparisons", g.fallback_comparisons}};
}

std::string to_csv(const GrowthSeries& g) {
  std::ostringstream out;
  out << "length,gamma\n";
  for (std::size_t l = 0; l < g.gamma.size(); ++l) out << l << ',' << g.gamma[l] << '\n';
  return out.str();
}

}  // namespace autgrowth
