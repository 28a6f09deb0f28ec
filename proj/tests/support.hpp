#pragma once

#include <random>
#include <vector>

#include "autgrowth/mealy.hpp"
#include "autgrowth/words.hpp"

namespace testsupport {

using namespace autgrowth;

inline Word random_word(std::mt19937& rng, std::size_t n_gens, std::size_t len) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(n_gens) - 1);
  Word w(len);
  for (auto& s : w) s = static_cast<Gen>(pick(rng));
  return w;
}

/// All letter words of length n, lexicographic.
inline std::vector<std::vector<Letter>> all_letter_words(std::size_t d, std::size_t n) {
  std::vector<std::vector<Letter>> out{{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::vector<Letter>> next;
    for (const auto& u : out)
      for (std::size_t x = 0; x < d; ++x) {
        auto v = u;
        v.push_back(static_cast<Letter>(x));
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

/// True when w fixes every letter word of length `depth`.
inline bool acts_trivially(const Word& w, const GeneratorTable& gens, std::size_t depth) {
  for (const auto& u : all_letter_words(gens.degree(), depth))
    if (apply(w, u, gens) != u) return false;
  return true;
}

inline bool same_action(const Word& v, const Word& w, const GeneratorTable& gens, std::size_t depth) {
  for (const auto& u : all_letter_words(gens.degree(), depth))
    if (apply(v, u, gens) != apply(w, u, gens)) return false;
  return true;
}

/// All words of length n over n_gens generators, lexicographic.
inline std::vector<Word> all_words(std::size_t n_gens, std::size_t n) {
  std::vector<Word> out{{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Word> next;
    for (const auto& u : out)
      for (std::size_t s = 0; s < n_gens; ++s) {
        auto v = u;
        v.push_back(static_cast<Gen>(s));
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

inline const std::vector<double>& bartholdi_weights() {
  static const std::vector<double> w{.305061, .34747, .223839, .123631};
  return w;
}

}  // namespace testsupport
