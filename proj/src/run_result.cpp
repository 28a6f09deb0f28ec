#include "autgrowth/run_result.hpp"

namespace autgrowth {

using nlohmann::json;

json run_result_json(const SearchResult& r, const RunMeta& meta) {
  return {
      {"machine", meta.machine},
      {"aux", meta.aux},
      {"weights", r.weights.values()},
      {"target", r.target},
      {"status", to_string(r.status)},
      {"eta", r.eta_max},
      {"alpha", r.alpha ? json(*r.alpha) : json(nullptr)},
      {"radius", r.radius},
      {"egg_size", r.egg_size},
      {"per_level_sizes", r.per_level_sizes},
      {"count_matrix_ref", meta.count_matrix_ref ? json(*meta.count_matrix_ref) : json(nullptr)},
      {"seed", meta.seed ? json(*meta.seed) : json(nullptr)},
      {"versions", {{"autgrowth", kVersion}, {"schema", kRunSchemaVersion}}},
  };
}

std::vector<std::string> validate_run_result(const json& j) {
  std::vector<std::string> problems;
  if (!j.is_object()) return {"record is not an object"};
  auto need = [&](const char* key, auto&& ok, const char* what) {
    if (!j.contains(key))
      problems.push_back(std::string("missing ") + key);
    else if (!ok(j.at(key)))
      problems.push_back(std::string(key) + " must be " + what);
  };
  auto is_string = [](const json& v) { return v.is_string(); };
  auto is_number = [](const json& v) { return v.is_number(); };
  auto is_count = [](const json& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0); };
  need("machine", is_string, "a string");
  need("aux", is_string, "a string");
  need("weights", [](const json& v) {
    if (!v.is_array() || v.empty()) return false;
    for (const auto& x : v)
      if (!x.is_number() || x.get<double>() <= 0.0) return false;
    return true;
  }, "a non-empty array of positive numbers");
  need("target", is_number, "a number");
  need("status", [](const json& v) {
    if (!v.is_string()) return false;
    try {
      search_status_from_string(v.get<std::string>());
      return true;
    } catch (const Error&) {
      return false;
    }
  }, "a search status");
  need("eta", is_number, "a number");
  need("alpha", [](const json& v) { return v.is_null() || v.is_number(); }, "a number or null");
  need("radius", is_count, "a count");
  need("egg_size", is_count, "a count");
  need("per_level_sizes", [&](const json& v) {
    if (!v.is_array()) return false;
    for (const auto& x : v)
      if (!is_count(x)) return false;
    return true;
  }, "an array of counts");
  need("count_matrix_ref", [](const json& v) { return v.is_null() || v.is_string(); }, "a string or null");
  need("seed", [&](const json& v) { return v.is_null() || is_count(v); }, "a count or null");
  need("versions", [](const json& v) {
    return v.is_object() && v.contains("autgrowth") && v.at("autgrowth").is_string() && v.contains("schema") &&
           v.at("schema").is_number_integer();
  }, "an object with autgrowth and schema");
  if (problems.empty() && j.at("status") == "found" && j.at("alpha").is_null() && j.at("eta").get<double>() < 1.0)
    problems.push_back("alpha is missing for a found run");
  return problems;
}

json count_matrix_json(const SearchResult& r, const GeneratorTable& gens) {
  json words = json::array(), n = json::array(), c = json::array();
  for (const auto& e : r.egg) {
    words.push_back(gens.format_word(e.word));
    n.push_back(e.stats.letters);
    c.push_back(e.stats.sections);
  }
  return {{"generators", gens.names()}, {"words", words}, {"N", n}, {"C", c}};
}

}  // namespace autgrowth
