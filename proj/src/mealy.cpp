#include "autgrowth/mealy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "autgrowth/words.hpp"

namespace autgrowth {

std::optional<StateId> MealyMachine::find_state(std::string_view name) const {
  for (std::size_t q = 0; q < states.size(); ++q)
    if (states[q] == name) return static_cast<StateId>(q);
  return std::nullopt;
}

std::vector<std::string> default_letters(std::size_t d) {
  std::vector<std::string> out;
  out.reserve(d);
  for (std::size_t x = 0; x < d; ++x) out.push_back(std::to_string(x + 1));
  return out;
}

std::string ValidationReport::summary() const {
  if (errors.empty()) return "valid";
  std::ostringstream os;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i) os << "; ";
    os << errors[i].message;
  }
  return os.str();
}

ValidationReport validate(const MealyMachine& m) {
  ValidationReport report;
  const std::size_t n = m.states.size();
  const std::size_t d = m.letters.size();
  auto add = [&](ValidationErrorKind kind, std::size_t q, std::size_t x, std::string msg) {
    report.errors.push_back({kind, static_cast<StateId>(q), static_cast<Letter>(x), std::move(msg)});
  };
  if (d == 0) add(ValidationErrorKind::bad_letter, kNoState, 0, "empty alphabet");
  if (m.transitions.size() != n || m.outputs.size() != n) {
    add(ValidationErrorKind::missing_transition, kNoState, 0, "transition or output table does not cover every state");
    return report;
  }
  for (std::size_t q = 0; q < n; ++q) {
    const auto& name = m.states[q];
    if (m.transitions[q].size() != d || m.outputs[q].size() != d) {
      for (std::size_t x = std::min(m.transitions[q].size(), m.outputs[q].size()); x < d; ++x)
        add(ValidationErrorKind::missing_transition, q, x,
            "state " + name + ": no transition on letter " + m.letters[x]);
      continue;
    }
    std::vector<bool> hit(d, false);
    bool bijective = true;
    for (std::size_t x = 0; x < d; ++x) {
      if (m.transitions[q][x] >= n)
        add(ValidationErrorKind::bad_state, q, x, "state " + name + ": transition to unknown state");
      const Letter y = m.outputs[q][x];
      if (y >= d) {
        add(ValidationErrorKind::bad_letter, q, x, "state " + name + ": output letter out of range");
        bijective = false;
        continue;
      }
      if (hit[y]) bijective = false;
      hit[y] = true;
    }
    if (!bijective)
      add(ValidationErrorKind::non_bijective, q, 0, "state " + name + ": output map is not a permutation");
  }
  if (m.identity_state) {
    const std::size_t e = *m.identity_state;
    if (e >= n) {
      add(ValidationErrorKind::bad_identity, e, 0, "identity state out of range");
    } else if (m.transitions[e].size() == d && m.outputs[e].size() == d) {
      for (std::size_t x = 0; x < d; ++x) {
        if (m.outputs[e][x] != x || m.transitions[e][x] != e) {
          add(ValidationErrorKind::bad_identity, e, x, "identity state " + m.states[e] + " does not act trivially");
          break;
        }
      }
    }
  }
  return report;
}

void require_valid(const MealyMachine& m) {
  auto report = validate(m);
  if (!report.ok()) throw Error("invalid machine: " + report.summary());
}

GeneratorTable::GeneratorTable(const MealyMachine& m) : degree_(m.alphabet_size()) {
  require_valid(m);
  std::vector<Gen> gen_of(m.state_count(), kNoGen);
  for (std::size_t q = 0; q < m.state_count(); ++q) {
    if (m.identity_state && *m.identity_state == q) continue;
    gen_of[q] = static_cast<Gen>(names_.size());
    names_.push_back(m.states[q]);
    state_of_.push_back(static_cast<StateId>(q));
  }
  perm_.resize(names_.size() * degree_);
  section_.resize(names_.size() * degree_);
  for (Gen s = 0; s < names_.size(); ++s) {
    const StateId q = state_of_[s];
    for (std::size_t x = 0; x < degree_; ++x) {
      perm_[s * degree_ + x] = m.outputs[q][x];
      section_[s * degree_ + x] = gen_of[m.transitions[q][x]];
    }
  }
}

std::optional<Gen> GeneratorTable::find(std::string_view name) const {
  for (std::size_t s = 0; s < names_.size(); ++s)
    if (names_[s] == name) return static_cast<Gen>(s);
  return std::nullopt;
}

Word GeneratorTable::parse_word(std::string_view text) const {
  Word w;
  std::size_t i = 0;
  auto is_sep = [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '.'; };
  {
    std::string trimmed;
    for (char c : text)
      if (!is_sep(c)) trimmed.push_back(c);
    if (trimmed.empty() || ((trimmed == "e" || trimmed == "1") && !find(trimmed))) return w;
  }
  while (i < text.size()) {
    if (is_sep(text[i])) {
      ++i;
      continue;
    }
    std::size_t best_len = 0;
    Gen best = kNoGen;
    for (Gen s = 0; s < names_.size(); ++s) {
      const auto& nm = names_[s];
      if (nm.size() > best_len && text.substr(i, nm.size()) == nm) {
        best_len = nm.size();
        best = s;
      }
    }
    if (best == kNoGen)
      throw Error("unknown generator at position " + std::to_string(i) + " in word '" + std::string(text) + "'");
    w.push_back(best);
    i += best_len;
  }
  return w;
}

std::string GeneratorTable::format_word(const Word& w) const {
  if (w.empty()) return "e";
  const bool spaced = std::any_of(names_.begin(), names_.end(), [](const auto& n) { return n.size() != 1; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (spaced && i) out.push_back(' ');
    out += names_.at(w[i]);
  }
  return out;
}

std::vector<Letter> apply(const Word& w, std::span<const Letter> u, const GeneratorTable& gens) {
  std::vector<Letter> out(u.begin(), u.end());
  for (Letter x : out)
    if (x >= gens.degree()) throw Error("letter out of alphabet range");
  for (Gen s : w) {
    if (s >= gens.size()) throw Error("generator out of range");
    Gen q = s;
    for (auto& x : out) {
      if (q == kNoGen) break;
      const Letter y = gens.act(q, x);
      q = gens.section(q, x);
      x = y;
    }
  }
  return out;
}

Perm word_perm(const Word& w, const GeneratorTable& gens) {
  Perm p = identity_perm(gens.degree());
  for (Gen s : w)
    for (auto& y : p) y = gens.act(s, y);
  return p;
}

WreathImage wreath(const Word& w, const GeneratorTable& gens) {
  const std::size_t d = gens.degree();
  WreathImage img{identity_perm(d), std::vector<Word>(d)};
  // cur[x] is the image of x under the prefix read so far
  Perm cur = identity_perm(d);
  for (Gen s : w) {
    if (s >= gens.size()) throw Error("generator out of range");
    for (std::size_t x = 0; x < d; ++x) {
      const Gen t = gens.section(s, cur[x]);
      if (t != kNoGen) img.sections[x].push_back(t);
      cur[x] = gens.act(s, cur[x]);
    }
  }
  img.perm = std::move(cur);
  return img;
}

WreathImage wreath_product(const WreathImage& v, const WreathImage& w) {
  const std::size_t d = v.perm.size();
  WreathImage out{Perm(d), std::vector<Word>(d)};
  for (std::size_t x = 0; x < d; ++x) {
    out.perm[x] = w.perm[v.perm[x]];
    out.sections[x] = v.sections[x];
    const auto& tail = w.sections[v.perm[x]];
    out.sections[x].insert(out.sections[x].end(), tail.begin(), tail.end());
  }
  return out;
}

MealyMachine symmetrize(const MealyMachine& m, bool dedup) {
  require_valid(m);
  const GeneratorTable gens(m);
  const std::size_t d = m.alphabet_size();
  MealyMachine out = m;
  // inverse state of each original state
  std::vector<StateId> inv(m.state_count(), kNoState);
  if (m.identity_state) inv[*m.identity_state] = *m.identity_state;
  if (dedup) {
    const auto inverses = inverse_map(gens);
    for (Gen s = 0; s < gens.size(); ++s)
      if (inverses[s] != kNoGen) inv[gens.state(s)] = gens.state(inverses[s]);
  }
  for (Gen s = 0; s < gens.size(); ++s) {
    const StateId q = gens.state(s);
    if (inv[q] != kNoState) continue;
    inv[q] = static_cast<StateId>(out.states.size());
    out.states.push_back(m.states[q] + "^-1");
    out.transitions.emplace_back(d);
    out.outputs.emplace_back(d);
  }
  for (Gen s = 0; s < gens.size(); ++s) {
    const StateId q = gens.state(s);
    const StateId qi = inv[q];
    if (qi < m.state_count()) continue;
    // q^-1 maps rho_q(x) to x and has section (q_x)^-1 there
    for (std::size_t x = 0; x < d; ++x) {
      const Letter y = m.outputs[q][x];
      out.outputs[qi][y] = static_cast<Letter>(x);
      out.transitions[qi][y] = inv[m.transitions[q][x]];
    }
  }
  return out;
}

MealyMachine dual(const MealyMachine& m) {
  MealyMachine out;
  out.states = m.letters;
  out.letters = m.states;
  const std::size_t n = m.state_count();
  const std::size_t d = m.alphabet_size();
  out.transitions.assign(d, std::vector<StateId>(n));
  out.outputs.assign(d, std::vector<Letter>(n));
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t x = 0; x < std::min(d, m.outputs[q].size()); ++x) {
      out.transitions[x][q] = m.outputs[q][x];
      out.outputs[x][q] = static_cast<Letter>(m.transitions[q][x]);
    }
  }
  if (auto e = out.find_state("e")) {
    bool trivial = true;
    for (std::size_t q = 0; q < out.alphabet_size(); ++q)
      trivial = trivial && out.outputs[*e][q] == q && out.transitions[*e][q] == *e;
    if (trivial) out.identity_state = *e;
  }
  return out;
}

std::size_t level_index(std::span<const Letter> u, std::size_t d) {
  std::size_t idx = 0;
  for (Letter x : u) idx = idx * d + x;
  return idx;
}

MealyMachine level_power(const MealyMachine& m, unsigned k) {
  if (k == 0) throw Error("level must be positive");
  require_valid(m);
  if (k == 1) return m;
  const std::size_t d = m.alphabet_size();
  std::size_t dk = 1;
  for (unsigned i = 0; i < k; ++i) {
    dk *= d;
    if (dk > std::numeric_limits<Letter>::max()) throw Error("level alphabet too large");
  }
  MealyMachine out;
  out.states = m.states;
  out.identity_state = m.identity_state;
  out.letters.resize(dk);
  out.transitions.assign(m.state_count(), std::vector<StateId>(dk));
  out.outputs.assign(m.state_count(), std::vector<Letter>(dk));
  std::vector<Letter> u(k), v(k);
  for (std::size_t idx = 0; idx < dk; ++idx) {
    std::size_t r = idx;
    for (unsigned i = k; i-- > 0;) {
      u[i] = static_cast<Letter>(r % d);
      r /= d;
    }
    std::string name;
    for (Letter x : u) name += m.letters[x];
    out.letters[idx] = name;
    for (std::size_t q = 0; q < m.state_count(); ++q) {
      StateId p = static_cast<StateId>(q);
      for (unsigned i = 0; i < k; ++i) {
        v[i] = m.outputs[p][u[i]];
        p = m.transitions[p][u[i]];
      }
      out.outputs[q][idx] = static_cast<Letter>(level_index(v, d));
      out.transitions[q][idx] = p;
    }
  }
  return out;
}

}  // namespace autgrowth
