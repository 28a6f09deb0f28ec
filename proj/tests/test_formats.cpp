#include "catch_amalgamated.hpp"

#include <algorithm>

#include "autgrowth/formats.hpp"
#include "autgrowth/words.hpp"

using namespace autgrowth;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("parse the Grigorchuk listing") {
  auto m = parse_automaton("a = <e,e> (1,2)\nb = <a,c>\nc = <a,d>\nd = <e,b>");
  CHECK(m == builtin("grigorchuk"));
  CHECK(m.states == std::vector<std::string>{"a", "b", "c", "d", "e"});
  CHECK(m.outputs[0] == Perm{1, 0});
  CHECK(m.transitions[3] == std::vector<StateId>{4, 1});
}

TEST_CASE("parse the 17-letter listing") {
  auto m = builtin("xshape-17letters");
  CHECK(m.state_count() == 9);
  CHECK(m.alphabet_size() == 17);
  CHECK(validate(m).ok());
}

TEST_CASE("single letter machine") {
  auto m = parse_automaton("a = <a> ()\n");
  CHECK(m.alphabet_size() == 1);
  CHECK(validate(m).ok());
}

TEST_CASE("parse errors carry positions") {
  SECTION("undefined state") {
    try {
      parse_automaton("a = <e,e> (1,2)\nb = <a,z>\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == 8);
    }
  }
  SECTION("cycle out of range") {
    try {
      parse_automaton("a = <e,e> (1,3)\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  SECTION("syntax") { CHECK_THROWS_AS(parse_automaton("a <e,e>\n"), ParseError); }
  SECTION("wrong arity") { CHECK_THROWS_AS(parse_automaton("a = <e,e>\nb = <a>\n"), ParseError); }
  SECTION("repeated letter") { CHECK_THROWS_AS(parse_automaton("a = <e,e,e> (1,2)(2,3)\n"), ParseError); }
  SECTION("non-trivial e") { CHECK_THROWS_AS(parse_automaton("e = <e,e> (1,2)\n"), ParseError); }
}

TEST_CASE("zoo machines round trip and verify with their blocks") {
  for (const auto& entry : builtin_catalog()) {
    INFO(entry.name);
    auto m = builtin(entry.name);
    REQUIRE(validate(m).ok());
    CHECK(parse_automaton(print_automaton(m)) == m);
    const GeneratorTable g(m);
    auto aux = make_aux(g, entry.blocks);
    CHECK(verify_factors(aux, g).ok());
  }
}

TEST_CASE("zoo contents") {
  auto mnote = builtin("mnote-8letters");
  CHECK(mnote.states == std::vector<std::string>{"a", "b", "b^-1", "e"});
  CHECK(mnote.alphabet_size() == 8);
  CHECK(builtin("grigorchuk-l3") == level_power(builtin("grigorchuk"), 3));
  CHECK(builtin("grigorchuk-l2").alphabet_size() == 4);
  CHECK(builtin("t1-6letters").alphabet_size() == 6);
  CHECK(builtin("y-7letters").alphabet_size() == 7);
  CHECK_THROWS_AS(builtin("nope"), Error);
  CHECK(builtin_blocks("grigorchuk") == "a|b,c,d");
}

TEST_CASE("DOT export") {
  auto m = builtin("grigorchuk");
  auto diagram = export_diagram_dot(m);
  CHECK(count(diagram, " -> ") == 10);
  CHECK(count(diagram, "label=\"1|2\"") == 1);
  CHECK(diagram == export_diagram_dot(builtin("grigorchuk")));
  auto schreier = export_schreier_dot(m);
  // two letter nodes
  CHECK(count(schreier, ";\n") - count(schreier, " -> ") == 3);  // node lines plus the node default
  CHECK(count(schreier, " -> ") == 8);
  CHECK(schreier.find("\"e\"") == std::string::npos);
}
