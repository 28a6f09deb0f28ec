#include "autgrowth/formats.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace autgrowth {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct Cursor {
  std::string_view text;
  std::size_t line;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line, pos + 1, what); }
  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() {
    skip_space();
    return pos >= text.size();
  }
  bool accept(char c) {
    skip_space();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string name() {
    skip_space();
    const std::size_t start = pos;
    while (pos < text.size()) {
      const char c = text[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '=' || c == '<' || c == '>' || c == ',' || c == '(' ||
          c == ')' || c == ':')
        break;
      ++pos;
    }
    if (pos == start) fail("expected a name");
    return std::string(text.substr(start, pos - start));
  }
};

struct StateLine {
  std::string name;
  std::size_t line;
  std::vector<std::pair<std::string, std::size_t>> sections;  // name, column
  std::vector<std::vector<std::pair<std::string, std::size_t>>> cycles;
};

std::string cycles_text(const MealyMachine& m, std::size_t q) {
  const auto& p = m.outputs[q];
  std::vector<bool> seen(p.size(), false);
  std::string out;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (seen[x] || p[x] == x) continue;
    out += "(";
    std::size_t y = x;
    bool first = true;
    while (!seen[y]) {
      seen[y] = true;
      if (!first) out += ",";
      out += m.letters[y];
      first = false;
      y = p[y];
    }
    out += ")";
  }
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

MealyMachine parse_automaton(std::string_view text) {
  std::vector<std::string> letters;
  std::size_t letters_line = 0;
  std::vector<StateLine> lines;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++lineno;
    start = end + 1;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Cursor c{raw, lineno};
    if (c.done()) continue;
    std::string head = c.name();
    if (head == "letters" && c.accept(':')) {
      if (!lines.empty() || !letters.empty()) c.fail("letters must come first");
      while (!c.done()) letters.push_back(c.name());
      letters_line = lineno;
      continue;
    }
    StateLine sl{head, lineno, {}, {}};
    c.expect('=');
    c.expect('<');
    do {
      c.skip_space();
      const std::size_t col = c.pos + 1;
      sl.sections.emplace_back(c.name(), col);
    } while (c.accept(','));
    c.expect('>');
    while (c.accept('(')) {
      std::vector<std::pair<std::string, std::size_t>> cycle;
      if (!c.accept(')')) {
        do {
          c.skip_space();
          const std::size_t col = c.pos + 1;
          cycle.emplace_back(c.name(), col);
        } while (c.accept(','));
        c.expect(')');
      }
      if (!cycle.empty()) sl.cycles.push_back(std::move(cycle));
    }
    if (!c.done()) c.fail("unexpected trailing text");
    lines.push_back(std::move(sl));
  }
  if (lines.empty()) throw ParseError(lineno, 1, "no states defined");

  const std::size_t d = lines.front().sections.size();
  if (letters.empty()) letters = default_letters(d);
  if (letters.size() != d) throw ParseError(letters_line, 1, "letters line does not match the section count");

  MealyMachine m;
  m.letters = letters;
  std::map<std::string, StateId> index;
  for (const auto& sl : lines) {
    if (index.count(sl.name)) throw ParseError(sl.line, 1, "state " + sl.name + " defined twice");
    index.emplace(sl.name, static_cast<StateId>(m.states.size()));
    m.states.push_back(sl.name);
  }
  bool implicit_e = false;
  for (const auto& sl : lines)
    for (const auto& [nm, col] : sl.sections)
      if (nm == "e" && !index.count("e")) implicit_e = true;
  if (implicit_e) {
    index.emplace("e", static_cast<StateId>(m.states.size()));
    m.states.push_back("e");
  }
  std::map<std::string, Letter> letter_index;
  for (std::size_t x = 0; x < d; ++x) letter_index.emplace(letters[x], static_cast<Letter>(x));

  m.transitions.assign(m.states.size(), std::vector<StateId>(d));
  m.outputs.assign(m.states.size(), identity_perm(d));
  for (const auto& sl : lines) {
    const StateId q = index.at(sl.name);
    if (sl.sections.size() != d)
      throw ParseError(sl.line, 1, "state " + sl.name + " has " + std::to_string(sl.sections.size()) +
                                       " sections, expected " + std::to_string(d));
    for (std::size_t x = 0; x < d; ++x) {
      const auto& [nm, col] = sl.sections[x];
      auto it = index.find(nm);
      if (it == index.end()) throw ParseError(sl.line, col, "undefined state " + nm);
      m.transitions[q][x] = it->second;
    }
    std::vector<bool> used(d, false);
    for (const auto& cycle : sl.cycles) {
      std::vector<Letter> xs;
      for (const auto& [nm, col] : cycle) {
        auto it = letter_index.find(nm);
        if (it == letter_index.end()) throw ParseError(sl.line, col, "letter " + nm + " out of range");
        if (used[it->second]) throw ParseError(sl.line, col, "letter " + nm + " repeated in cycles");
        used[it->second] = true;
        xs.push_back(it->second);
      }
      for (std::size_t i = 0; i < xs.size(); ++i) m.outputs[q][xs[i]] = xs[(i + 1) % xs.size()];
    }
  }
  if (implicit_e) {
    const StateId e = index.at("e");
    m.transitions[e].assign(d, e);
  }
  if (auto it = index.find("e"); it != index.end()) {
    const StateId e = it->second;
    const bool trivial = is_identity_perm(m.outputs[e]) &&
                         std::all_of(m.transitions[e].begin(), m.transitions[e].end(), [&](StateId p) { return p == e; });
    if (!trivial) {
      std::size_t line = 1;
      for (const auto& sl : lines)
        if (sl.name == "e") line = sl.line;
      throw ParseError(line, 1, "state e is reserved for the identity");
    }
    m.identity_state = e;
  }
  require_valid(m);
  return m;
}

std::string print_automaton(const MealyMachine& m) {
  std::ostringstream os;
  if (m.letters != default_letters(m.alphabet_size())) {
    os << "letters:";
    for (const auto& l : m.letters) os << ' ' << l;
    os << '\n';
  }
  for (std::size_t q = 0; q < m.state_count(); ++q) {
    os << m.states[q] << " = <";
    for (std::size_t x = 0; x < m.alphabet_size(); ++x) {
      if (x) os << ',';
      os << m.states[m.transitions[q][x]];
    }
    os << '>';
    const auto cyc = cycles_text(m, q);
    if (!cyc.empty()) os << ' ' << cyc;
    os << '\n';
  }
  return os.str();
}

namespace {

struct ZooEntry {
  BuiltinMachine info;
  const char* text;  // nullptr for level powers of grigorchuk
  unsigned level;
};

const std::vector<ZooEntry>& zoo() {
  static const std::vector<ZooEntry> entries = {
      {{"grigorchuk", "first Grigorchuk group on 2 letters", "a|b,c,d"},
       "a = <e,e> (1,2)\n"
       "b = <a,c>\n"
       "c = <a,d>\n"
       "d = <e,b>\n",
       1},
      {{"grigorchuk-l2", "first Grigorchuk group acting on the second level", "a|b,c,d"}, nullptr, 2},
      {{"grigorchuk-l3", "first Grigorchuk group acting on the third level", "a|b,c,d"}, nullptr, 3},
      {{"t1-6letters", "relative of the Grigorchuk group on 6 letters", "a|b,c,d"},
       "a = <e,e,e,e,e,e> (1,2)(3,4)(5,6)\n"
       "b = <e,e,e,e,e,b> (2,3)(4,5)\n"
       "c = <a,e,e,e,e,c> (2,3)\n"
       "d = <a,e,e,e,e,d> (4,5)\n",
       1},
      {{"mnote-8letters", "involution and element of order 3 on 8 letters", "a|b,b^-1"},
       "a = <a,e,e,e,e,e,e,e> (3,4)(5,8)(6,7)\n"
       "b = <e,e,e,e,e,e,b,b^-1> (1,2,3)(4,5,6)\n"
       "b^-1 = <e,e,e,e,e,e,b^-1,b> (1,3,2)(4,6,5)\n",
       1},
      {{"y-7letters", "three involutions on 7 letters", "a|b|c"},
       "a = <a,a,e,e,e,e,e> (3,4)(6,7)\n"
       "b = <e,e,e,e,b,e,e> (1,2)(3,6)\n"
       "c = <e,e,e,e,e,e,c> (2,3)(4,5)\n",
       1},
      {{"xshape-17letters", "9 states on 17 letters with an X-shaped Schreier graph", "a|b,c,d|a'|b',c',d'"},
       "a = <e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,e> (1,2)(6,7)(12,13)(15,16)\n"
       "b = <e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,b> (4,5)(7,8)(1,10)(14,15)\n"
       "c = <e,e,e,e,e,e,e,e,a,e,e,e,e,e,e,e,c> (4,5)(14,15)\n"
       "d = <e,e,e,e,e,e,e,e,a,e,e,e,e,e,e,e,d> (7,8)(1,10)\n"
       "a' = <e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,e,b> (3,4)(8,9)(10,11)(1,14)\n"
       "b' = <e,e,e,e,b',e,e,e,e,e,e,e,e,e,e,e,e> (2,3)(1,6)(11,12)(16,17)\n"
       "c' = <e,e,e,e,c',e,e,e,e,e,e,e,a',e,e,e,e> (2,3)(16,17)\n"
       "d' = <e,e,e,e,d',e,e,e,e,e,e,e,a',e,e,e,e> (1,6)(11,12)\n",
       1},
      {{"adding-machine", "binary odometer generating Z", "free"}, "a = <e,a> (1,2)\n", 1},
      {{"infinite-dihedral", "infinite dihedral group", "a|b"},
       "a = <e,e> (1,2)\n"
       "b = <a,b>\n",
       1},
      {{"lamplighter", "lamplighter group on 2 letters", "free"},
       "a = <a,b> (1,2)\n"
       "b = <a,b>\n",
       1},
  };
  return entries;
}

const ZooEntry& zoo_entry(std::string_view name) {
  for (const auto& z : zoo())
    if (z.info.name == name) return z;
  throw Error("unknown builtin machine '" + std::string(name) + "'");
}

}  // namespace

const std::vector<BuiltinMachine>& builtin_catalog() {
  static const std::vector<BuiltinMachine> catalog = [] {
    std::vector<BuiltinMachine> out;
    for (const auto& z : zoo()) out.push_back(z.info);
    return out;
  }();
  return catalog;
}

MealyMachine builtin(std::string_view name) {
  const auto& z = zoo_entry(name);
  if (!z.text) return level_power(builtin("grigorchuk"), z.level);
  return parse_automaton(z.text);
}

std::string builtin_blocks(std::string_view name) { return zoo_entry(name).info.blocks; }

MealyMachine load_machine(std::string_view name_or_path) {
  for (const auto& z : zoo())
    if (z.info.name == name_or_path) return builtin(name_or_path);
  std::ifstream in{std::string(name_or_path)};
  if (!in) throw Error("no builtin or readable file named '" + std::string(name_or_path) + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_automaton(buf.str());
}

std::string export_diagram_dot(const MealyMachine& m) {
  std::ostringstream os;
  os << "digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (const auto& s : m.states) os << "  " << quote(s) << ";\n";
  for (std::size_t q = 0; q < m.state_count(); ++q)
    for (std::size_t x = 0; x < m.alphabet_size(); ++x)
      os << "  " << quote(m.states[q]) << " -> " << quote(m.states[m.transitions[q][x]])
         << " [label=" << quote(m.letters[x] + "|" + m.letters[m.outputs[q][x]]) << "];\n";
  os << "}\n";
  return os.str();
}

std::string export_schreier_dot(const MealyMachine& m) {
  std::ostringstream os;
  os << "digraph schreier {\n  node [shape=circle];\n";
  for (const auto& l : m.letters) os << "  " << quote(l) << ";\n";
  for (std::size_t q = 0; q < m.state_count(); ++q) {
    if (m.identity_state && *m.identity_state == q) continue;
    for (std::size_t x = 0; x < m.alphabet_size(); ++x)
      os << "  " << quote(m.letters[x]) << " -> " << quote(m.letters[m.outputs[q][x]])
         << " [label=" << quote(m.states[q]) << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace autgrowth
