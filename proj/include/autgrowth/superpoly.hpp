#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "autgrowth/egg_search.hpp"
#include "autgrowth/element_table.hpp"
#include "autgrowth/words.hpp"

namespace autgrowth {

enum class CheckOutcome { pass, fail, counterexample, inconclusive };
std::string to_string(CheckOutcome o);

struct PartitionCheck {
  CheckOutcome outcome = CheckOutcome::fail;
  /// |A_i| = block size + 1 when the block closes up to a group.
  std::vector<std::size_t> orders;
  std::vector<std::string> problems;
};

/// Finite subgroups with trivial pairwise intersections: every block plus e
/// must be a group in G, and either k >= 3 or k = 2 with the two groups not
/// both of order 2. Throws Error unless the blocks partition S.
PartitionCheck check_partition(const GeneratorTable& gens, const std::string& blocks);

struct SectionContractionCheck {
  CheckOutcome outcome = CheckOutcome::inconclusive;
  std::size_t max_len = 0;
  std::size_t words_checked = 0;
  /// Set for a counterexample: |w_x|_S > (|w| + 1) / 2 with |w| the word length,
  /// which bounds |w|_S from above, so the violation is certain.
  std::optional<Word> word;
  std::optional<Letter> letter;
  std::optional<Word> section;
  /// Words whose section could not be identified within the table caps.
  std::size_t unknown = 0;
};

/// Scans every reduced word of length at most max_len and every letter x for
/// |w_x|_S <= (|w|_S + 1) / 2. A pass is bounded evidence only.
SectionContractionCheck check_section_contraction(const GeneratorTable& gens, const AuxiliaryGroup& aux,
                                                  std::size_t max_len, ElementTable* table = nullptr);

struct SurjectivityCheck {
  CheckOutcome outcome = CheckOutcome::inconclusive;
  std::size_t max_len = 0;
  /// witness[s] is a word fixing the first letter whose section there equals s.
  std::vector<std::optional<Word>> witness;
};

/// Looks for every generator among the first sections of words of length at
/// most max_len that fix the first letter. Pass certifies surjectivity.
SurjectivityCheck check_first_section_surjective(const GeneratorTable& gens, const AuxiliaryGroup& aux,
                                                 std::size_t max_len, ElementTable* table = nullptr);

/// Conditional statement about intermediate growth. `intermediate` holds only
/// when the partition and surjectivity checks pass, the contraction scan found
/// nothing, and an egg with eta < 1 exists. The contraction part stays evidence.
struct SuperpolyVerdict {
  PartitionCheck partition;
  SectionContractionCheck contraction;
  SurjectivityCheck surjectivity;
  std::optional<double> eta;
  bool superpolynomial = false;
  bool intermediate = false;
  std::string summary;
};

SuperpolyVerdict superpoly_verdict(const GeneratorTable& gens, const std::string& blocks, std::size_t max_len,
                                   std::optional<double> egg_eta = std::nullopt);

nlohmann::json to_json(const SuperpolyVerdict& v, const GeneratorTable& gens);

}  // namespace autgrowth
