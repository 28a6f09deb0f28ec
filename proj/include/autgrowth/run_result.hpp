#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "autgrowth/egg_search.hpp"

namespace autgrowth {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kRunSchemaVersion = 1;

/// Run-result record:
///   machine          builtin name or file path
///   aux              block text, or "free"
///   weights          weights used by the search (normalized)
///   target           eta target
///   status           running | found | radius-exceeded | aborted
///   eta              max eta over the egg under `weights`
///   alpha            growth exponent bound, null unless found with eta < 1
///   radius           length of the longest processed word
///   egg_size         number of shell words
///   per_level_sizes  yolk size after each level
///   count_matrix_ref file holding the count matrix, or null
///   seed             optimizer seed, or null when no optimizer ran
///   versions         {"autgrowth": ..., "schema": ...}
/// Producers may add fields; readers ignore what they do not know.
struct RunMeta {
  std::string machine;
  std::string aux;
  std::optional<std::string> count_matrix_ref;
  std::optional<std::uint64_t> seed;
};

nlohmann::json run_result_json(const SearchResult& r, const RunMeta& meta);

/// Problems with a run-result record; empty when it matches the schema.
std::vector<std::string> validate_run_result(const nlohmann::json& j);

/// Letter counts N and section counts C of every egg word, rows in egg order.
nlohmann::json count_matrix_json(const SearchResult& r, const GeneratorTable& gens);

}  // namespace autgrowth
