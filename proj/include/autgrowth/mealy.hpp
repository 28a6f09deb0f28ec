#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autgrowth/types.hpp"

namespace autgrowth {

/// Complete invertible letter-to-letter transducer (Q, Sigma, delta, rho).
///
/// transitions[q][x] is the state reached from q on reading x, outputs[q][x]
/// the letter written. The identity state, when designated, is excluded from
/// the generating set S.
struct MealyMachine {
  std::vector<std::string> states;
  std::vector<std::string> letters;  // surface names, "1".."d" by default
  std::vector<std::vector<StateId>> transitions;
  std::vector<std::vector<Letter>> outputs;
  std::optional<StateId> identity_state;

  std::size_t alphabet_size() const { return letters.size(); }
  std::size_t state_count() const { return states.size(); }

  std::optional<StateId> find_state(std::string_view name) const;

  bool operator==(const MealyMachine&) const = default;
};

/// Default 1-based letter names.
std::vector<std::string> default_letters(std::size_t d);

enum class ValidationErrorKind { missing_transition, bad_state, bad_letter, non_bijective, bad_identity };

struct ValidationError {
  ValidationErrorKind kind;
  StateId state = kNoState;
  Letter letter = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationError> errors;
  bool ok() const { return errors.empty(); }
  std::string summary() const;
};

ValidationReport validate(const MealyMachine& m);

/// Throws Error listing the problems when `m` is not a valid machine.
void require_valid(const MealyMachine& m);

/// Flat view of a valid machine indexed by generator (non-identity state).
class GeneratorTable {
 public:
  explicit GeneratorTable(const MealyMachine& m);

  std::size_t size() const { return names_.size(); }
  std::size_t degree() const { return degree_; }

  Letter act(Gen s, Letter x) const { return perm_[s * degree_ + x]; }
  /// kNoGen when the section is the identity state.
  Gen section(Gen s, Letter x) const { return section_[s * degree_ + x]; }
  std::span<const Letter> perm(Gen s) const { return {perm_.data() + s * degree_, degree_}; }
  StateId state(Gen s) const { return state_of_[s]; }
  const std::string& name(Gen s) const { return names_[s]; }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<Gen> find(std::string_view name) const;

  /// Reads a word by greedy longest match of generator names; whitespace,
  /// '*' and '.' separate tokens. "e" and "1" alone denote the empty word.
  Word parse_word(std::string_view text) const;
  std::string format_word(const Word& w) const;

 private:
  std::size_t degree_ = 0;
  std::vector<std::string> names_;
  std::vector<StateId> state_of_;
  std::vector<Letter> perm_;
  std::vector<Gen> section_;
};

/// Image of a word in the wreath product: root permutation and one section
/// word per letter.
struct WreathImage {
  Perm perm;
  std::vector<Word> sections;

  bool operator==(const WreathImage&) const = default;
};

/// rho_w(u). Words act left to right: the first generator acts first.
std::vector<Letter> apply(const Word& w, std::span<const Letter> u, const GeneratorTable& gens);

/// Root permutation of a word, x -> s_n(...s_1(x)).
Perm word_perm(const Word& w, const GeneratorTable& gens);

/// Sections (s_1...s_n)_x = (s_1)_x (s_2)_{s_1(x)} ..., identity states dropped.
WreathImage wreath(const Word& w, const GeneratorTable& gens);

/// Product law in the wreath product for the left-to-right action:
/// (vw)_x = v_x w_{perm_v(x)} and perm_{vw} = perm_w o perm_v.
WreathImage wreath_product(const WreathImage& v, const WreathImage& w);

/// Adds an inverse state q^-1 for every state whose map is not an involution
/// and that has no inverse among the existing states. With dedup disabled
/// every non-identity state receives a fresh inverse.
MealyMachine symmetrize(const MealyMachine& m, bool dedup = true);

/// Exchanges states and letters: q --x|y--> p becomes x --q|p--> y.
MealyMachine dual(const MealyMachine& m);

/// Same states acting on Sigma^k, words ordered lexicographically with the
/// first letter most significant.
MealyMachine level_power(const MealyMachine& m, unsigned k);

/// Index of a word in Sigma^k under the lexicographic order of level_power.
std::size_t level_index(std::span<const Letter> u, std::size_t d);

}  // namespace autgrowth
