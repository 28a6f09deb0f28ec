#include "autgrowth/superpoly.hpp"

#include <map>
#include <memory>
#include <unordered_map>

namespace autgrowth {

std::string to_string(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::pass: return "pass";
    case CheckOutcome::fail: return "fail";
    case CheckOutcome::counterexample: return "counterexample";
    case CheckOutcome::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

PartitionCheck check_partition(const GeneratorTable& gens, const std::string& blocks) {
  auto parsed = parse_blocks(blocks, gens);
  std::vector<int> seen(gens.size(), 0);
  for (const auto& b : parsed)
    for (Gen s : b) ++seen[s];
  for (Gen s = 0; s < gens.size(); ++s)
    if (seen[s] != 1) throw Error("blocks do not partition S at generator " + gens.name(s));

  PartitionCheck out;
  for (const auto& b : parsed) out.orders.push_back(b.size() + 1);
  try {
    auto aux = AuxiliaryGroup::free_product(gens, parsed);
    auto report = verify_factors(aux, gens);
    if (!report.ok()) out.problems.push_back(report.summary(gens));
  } catch (const Error& e) {
    out.problems.push_back(e.what());
  }
  const std::size_t k = parsed.size();
  if (k < 2)
    out.problems.push_back("need at least two blocks");
  else if (k == 2 && out.orders[0] == 2 && out.orders[1] == 2)
    out.problems.push_back("two blocks that are both groups of order 2");
  out.outcome = out.problems.empty() ? CheckOutcome::pass : CheckOutcome::fail;
  return out;
}

namespace {

/// Calls f on every reduced word of length 1..max_len in shortlex order.
/// f returns false to stop early.
template <class F>
void for_reduced_words(const AuxiliaryGroup& aux, std::size_t max_len, F&& f) {
  std::vector<Word> level;
  for (Gen s = 0; s < aux.generator_count(); ++s) level.push_back(Word{s});
  for (std::size_t len = 1; len <= max_len && !level.empty(); ++len) {
    for (const auto& w : level)
      if (!f(w)) return;
    if (len == max_len) break;
    std::vector<Word> next;
    for (const auto& w : level)
      for (Gen s = 0; s < aux.generator_count(); ++s) {
        if (!is_reduced(Word{w.back(), s}, aux)) continue;
        Word v = w;
        v.push_back(s);
        next.push_back(std::move(v));
      }
    level = std::move(next);
  }
}

Word section_at(const Word& w, Letter x, const GeneratorTable& gens) {
  Word out;
  for (Gen s : w) {
    const Gen t = gens.section(s, x);
    if (t != kNoGen) out.push_back(t);
    x = gens.act(s, x);
  }
  return out;
}

Letter image_of(const Word& w, Letter x, const GeneratorTable& gens) {
  for (Gen s : w) x = gens.act(s, x);
  return x;
}

struct TableHolder {
  TableHolder(const GeneratorTable& gens, const AuxiliaryGroup& aux, ElementTable* given)
      : owned(given ? nullptr : std::make_unique<ElementTable>(gens, &aux)), table(given ? given : owned.get()) {}
  std::unique_ptr<ElementTable> owned;
  ElementTable* table;
};

}  // namespace

SectionContractionCheck check_section_contraction(const GeneratorTable& gens, const AuxiliaryGroup& aux,
                                                  std::size_t max_len, ElementTable* given) {
  if (max_len < 1) throw Error("max_len must be at least 1");
  TableHolder holder(gens, aux, given);
  auto& table = *holder.table;
  SectionContractionCheck out;
  out.max_len = max_len;

  // shortest length of every element of norm at most (max_len + 1) / 2
  const std::size_t radius = (max_len + 1) / 2;
  std::unordered_map<ElementId, std::size_t> norm;
  norm.emplace(0, 0);
  std::size_t ball_unknown = 0;
  for_reduced_words(aux, radius, [&](const Word& w) {
    if (auto id = table.canonical_id_reduced(w))
      norm.emplace(*id, w.size());
    else
      ++ball_unknown;
    return true;
  });

  for_reduced_words(aux, max_len, [&](const Word& w) {
    ++out.words_checked;
    const std::size_t bound = (w.size() + 1) / 2;
    for (Letter x = 0; x < gens.degree(); ++x) {
      const Word sec = reduce(section_at(w, x, gens), aux);
      if (sec.size() <= bound) continue;
      auto id = table.canonical_id_reduced(sec);
      if (!id) {
        ++out.unknown;
        continue;
      }
      auto it = norm.find(*id);
      if (it != norm.end() && it->second <= bound) continue;
      if (it == norm.end() && ball_unknown > 0) {
        ++out.unknown;
        continue;
      }
      out.word = w;
      out.letter = x;
      out.section = sec;
      return false;
    }
    return true;
  });
  if (out.word)
    out.outcome = CheckOutcome::counterexample;
  else
    out.outcome = out.unknown == 0 ? CheckOutcome::pass : CheckOutcome::inconclusive;
  return out;
}

SurjectivityCheck check_first_section_surjective(const GeneratorTable& gens, const AuxiliaryGroup& aux,
                                                 std::size_t max_len, ElementTable* given) {
  TableHolder holder(gens, aux, given);
  auto& table = *holder.table;
  SurjectivityCheck out;
  out.max_len = max_len;
  out.witness.assign(gens.size(), std::nullopt);
  std::multimap<ElementId, Gen> wanted;
  for (Gen s = 0; s < gens.size(); ++s)
    if (auto id = table.canonical_id_reduced(Word{s})) wanted.emplace(*id, s);
  std::size_t missing = gens.size();
  if (max_len > 0)
    for_reduced_words(aux, max_len, [&](const Word& w) {
      if (image_of(w, 0, gens) != 0) return true;
      const Word sec = reduce(section_at(w, 0, gens), aux);
      if (sec.empty()) return true;
      auto id = table.canonical_id_reduced(sec);
      if (!id) return true;
      auto [lo, hi] = wanted.equal_range(*id);
      for (auto it = lo; it != hi; ++it) {
        if (out.witness[it->second]) continue;
        // ids are sound, the direct check keeps the certificate independent of the table
        if (!equal_elements(sec, Word{it->second}, gens, &aux)) continue;
        out.witness[it->second] = w;
        --missing;
      }
      return missing > 0;
    });
  out.outcome = missing == 0 ? CheckOutcome::pass : CheckOutcome::inconclusive;
  return out;
}

SuperpolyVerdict superpoly_verdict(const GeneratorTable& gens, const std::string& blocks, std::size_t max_len,
                                   std::optional<double> egg_eta) {
  SuperpolyVerdict v;
  v.partition = check_partition(gens, blocks);
  v.eta = egg_eta;
  if (v.partition.outcome == CheckOutcome::pass) {
    auto aux = make_aux(gens, blocks);
    ElementTable table(gens, &aux);
    v.contraction = check_section_contraction(gens, aux, max_len, &table);
    v.surjectivity = check_first_section_surjective(gens, aux, max_len, &table);
  }
  v.superpolynomial = v.partition.outcome == CheckOutcome::pass && v.contraction.outcome == CheckOutcome::pass &&
                      v.surjectivity.outcome == CheckOutcome::pass;
  v.intermediate = v.superpolynomial && egg_eta && *egg_eta < 1.0;
  if (v.partition.outcome != CheckOutcome::pass)
    v.summary = "block partition fails";
  else if (v.contraction.outcome == CheckOutcome::counterexample)
    v.summary = "section contraction fails";
  else if (!v.superpolynomial)
    v.summary = "inconclusive up to length " + std::to_string(max_len);
  else if (v.intermediate)
    v.summary = "intermediate growth, provided section contraction holds beyond length " + std::to_string(max_len);
  else
    v.summary = "super-polynomial growth, provided section contraction holds beyond length " + std::to_string(max_len);
  return v;
}

nlohmann::json to_json(const SuperpolyVerdict& v, const GeneratorTable& gens) {
  using nlohmann::json;
  auto word = [&](const std::optional<Word>& w) { return w ? json(gens.format_word(*w)) : json(nullptr); };
  json witnesses = json::object();
  for (Gen s = 0; s < v.surjectivity.witness.size(); ++s) witnesses[gens.name(s)] = word(v.surjectivity.witness[s]);
  return {
      {"partition", {{"outcome", to_string(v.partition.outcome)}, {"orders", v.partition.orders}, {"problems", v.partition.problems}}},
      {"section_contraction",
       {{"outcome", to_string(v.contraction.outcome)},
        {"max_len", v.contraction.max_len},
        {"words_checked", v.contraction.words_checked},
        {"unknown", v.contraction.unknown},
        {"word", word(v.contraction.word)},
        {"letter", v.contraction.letter ? json(*v.contraction.letter + 1) : json(nullptr)},
        {"section", word(v.contraction.section)},
        {"evidence_only", true}}},
      {"first_section",
       {{"outcome", to_string(v.surjectivity.outcome)}, {"max_len", v.surjectivity.max_len}, {"witness", witnesses}}},
      {"eta", v.eta ? json(*v.eta) : json(nullptr)},
      {"superpolynomial", v.superpolynomial},
      {"intermediate", v.intermediate},
      {"summary", v.summary},
  };
}

}  // namespace autgrowth
