#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace autgrowth {

/// A letter of the alphabet, 0-based.
using Letter = std::uint16_t;
/// A state of a Mealy machine.
using StateId = std::uint16_t;
/// A generator, i.e. a non-identity state, numbered 0..|S|-1.
using Gen = std::uint16_t;

inline constexpr Gen kNoGen = std::numeric_limits<Gen>::max();
inline constexpr StateId kNoState = std::numeric_limits<StateId>::max();

/// A word over the generators S. Letters are applied left to right.
using Word = std::vector<Gen>;

/// perm[x] is the image of letter x.
using Perm = std::vector<Letter>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ w.size();
    for (Gen g : w) {
      h ^= g;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

inline Perm identity_perm(std::size_t d) {
  Perm p(d);
  for (std::size_t i = 0; i < d; ++i) p[i] = static_cast<Letter>(i);
  return p;
}

inline bool is_identity_perm(std::span<const Letter> p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != i) return false;
  return true;
}

inline Perm inverse_perm(std::span<const Letter> p) {
  Perm inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<Letter>(i);
  return inv;
}

}  // namespace autgrowth
