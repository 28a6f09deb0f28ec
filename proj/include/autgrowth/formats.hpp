#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "autgrowth/mealy.hpp"

namespace autgrowth {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Reads the wreath-recursion text format:
///
///     # comment
///     a = <e,e> (1,2)
///     b = <a,c>
///
/// One line per state, `e` is the identity (added when referenced and not
/// defined), cycles use 1-based letter names. An optional first line
/// `letters: 11 12 21 22` renames the alphabet.
MealyMachine parse_automaton(std::string_view text);

/// Inverse of parse_automaton; every state is printed, including `e`.
std::string print_automaton(const MealyMachine& m);

struct BuiltinMachine {
  std::string name;
  std::string description;
  /// Block partition of the generators for the free-product cover, "a|b,c,d".
  std::string blocks;
};

const std::vector<BuiltinMachine>& builtin_catalog();

/// Machine from the zoo. Throws for unknown names.
MealyMachine builtin(std::string_view name);

/// Documented block partition of a zoo machine.
std::string builtin_blocks(std::string_view name);

/// A zoo name or a path to a file in the text format.
MealyMachine load_machine(std::string_view name_or_path);

/// Automaton diagram: one node per state, edges labelled "x|y".
std::string export_diagram_dot(const MealyMachine& m);

/// Schreier graph on the alphabet: edges x -> q(x) labelled q, identity state omitted.
std::string export_schreier_dot(const MealyMachine& m);

}  // namespace autgrowth
