#include "catch_amalgamated.hpp"

#include "autgrowth/formats.hpp"
#include "autgrowth/superpoly.hpp"
#include "support.hpp"

using namespace autgrowth;

namespace {

struct Fixture {
  explicit Fixture(const MealyMachine& machine, const std::string& b) : m(machine), g(m), blocks(b), aux(make_aux(g, b)) {}
  MealyMachine m;
  GeneratorTable g;
  std::string blocks;
  AuxiliaryGroup aux;
};

Fixture zoo(const char* name) { return Fixture(builtin(name), builtin_blocks(name)); }

}  // namespace

TEST_CASE("block partitions") {
  auto G = zoo("grigorchuk");
  auto good = check_partition(G.g, "a|b,c,d");
  CHECK(good.outcome == CheckOutcome::pass);
  CHECK(good.orders == std::vector<std::size_t>{2, 4});

  auto D = zoo("infinite-dihedral");
  auto small = check_partition(D.g, "a|b");
  CHECK(small.outcome == CheckOutcome::fail);
  REQUIRE(small.problems.size() == 1);

  auto Y = zoo("y-7letters");
  CHECK(check_partition(Y.g, "a|b|c").outcome == CheckOutcome::pass);

  // {b, c} with e is not closed, since bc = d
  CHECK(check_partition(G.g, "a|b,c|d").outcome == CheckOutcome::fail);
  CHECK_THROWS_AS(check_partition(G.g, "a|b,c"), Error);
  CHECK_THROWS_AS(check_partition(G.g, "a|b,c,d|a"), Error);
  CHECK_THROWS_AS(check_partition(G.g, "a|b,c,x"), Error);
}

TEST_CASE("every zoo partition passes") {
  for (const auto& entry : builtin_catalog()) {
    if (entry.blocks == "free") continue;
    INFO(entry.name);
    auto F = zoo(entry.name.c_str());
    auto r = check_partition(F.g, entry.blocks);
    if (entry.name == "infinite-dihedral")
      CHECK(r.outcome == CheckOutcome::fail);
    else
      CHECK(r.outcome == CheckOutcome::pass);
  }
}

TEST_CASE("section contraction on Grigorchuk") {
  auto G = zoo("grigorchuk");
  auto r = check_section_contraction(G.g, G.aux, 8);
  CHECK(r.outcome == CheckOutcome::pass);
  CHECK(r.unknown == 0);
  CHECK_FALSE(r.word);
  // reduced words alternate a with one of b, c, d
  std::size_t expected = 0;
  for (std::size_t n = 1; n <= 8; ++n) {
    std::size_t starting_a = 1, starting_bcd = 3;
    for (std::size_t i = 1; i < n; ++i) {
      starting_a *= (i % 2 == 1) ? 3 : 1;
      starting_bcd *= (i % 2 == 1) ? 1 : 3;
    }
    expected += starting_a + starting_bcd;
  }
  CHECK(r.words_checked == expected);
}

TEST_CASE("single letter sections pass at length one") {
  for (const char* name : {"grigorchuk", "t1-6letters", "y-7letters", "adding-machine", "lamplighter"}) {
    auto F = zoo(name);
    INFO(name);
    CHECK(check_section_contraction(F.g, F.aux, 1).outcome == CheckOutcome::pass);
  }
}

TEST_CASE("lamplighter violates section contraction") {
  auto L = zoo("lamplighter");
  auto r = check_section_contraction(L.g, L.aux, 4);
  REQUIRE(r.outcome == CheckOutcome::counterexample);
  CHECK(L.g.format_word(*r.word) == "aa");
  REQUIRE(r.section);
  CHECK(r.section->size() == 2);
  // the section really is longer than any word of length 1
  for (Gen s = 0; s < L.g.size(); ++s) CHECK_FALSE(equal_elements(*r.section, Word{s}, L.g, &L.aux));
  CHECK_FALSE(is_identity(*r.section, L.g, &L.aux));
}

TEST_CASE("contraction scan is monotone downward") {
  auto L = zoo("lamplighter");
  CHECK(check_section_contraction(L.g, L.aux, 1).outcome == CheckOutcome::pass);
  for (std::size_t n = 2; n <= 5; ++n) CHECK(check_section_contraction(L.g, L.aux, n).outcome == CheckOutcome::counterexample);
}

TEST_CASE("first sections generate") {
  auto G = zoo("grigorchuk");
  auto r = check_first_section_surjective(G.g, G.aux, 3);
  CHECK(r.outcome == CheckOutcome::pass);
  for (Gen s = 0; s < G.g.size(); ++s) {
    REQUIRE(r.witness[s]);
    const Word& w = *r.witness[s];
    CHECK(w.size() <= 3);
    // fixes the first letter, and the section there is s, checked on the action
    CHECK(apply(w, std::vector<Letter>{0}, G.g) == std::vector<Letter>{0});
    for (const auto& u : testsupport::all_letter_words(2, 6)) {
      std::vector<Letter> x{0};
      x.insert(x.end(), u.begin(), u.end());
      auto y = apply(w, x, G.g);
      CHECK(std::vector<Letter>(y.begin() + 1, y.end()) == apply(Word{s}, u, G.g));
    }
  }
  CHECK(G.g.format_word(*r.witness[*G.g.find("a")]) == "b");
  CHECK(G.g.format_word(*r.witness[*G.g.find("c")]) == "aba");

  auto short_scan = check_first_section_surjective(G.g, G.aux, 1);
  CHECK(short_scan.outcome == CheckOutcome::inconclusive);
  CHECK(short_scan.witness[*G.g.find("a")]);
  CHECK_FALSE(short_scan.witness[*G.g.find("b")]);
}

TEST_CASE("surjectivity is monotone in the length") {
  auto G = zoo("grigorchuk");
  bool passed = false;
  for (std::size_t n = 0; n <= 6; ++n) {
    auto r = check_first_section_surjective(G.g, G.aux, n);
    if (passed) CHECK(r.outcome == CheckOutcome::pass);
    passed = passed || r.outcome == CheckOutcome::pass;
  }
  CHECK(passed);
}

TEST_CASE("trivial first sections never pass") {
  auto m = parse_automaton("a = <e,e> (1,2)\nb = <e,a>\n");
  Fixture F(m, "free");
  for (std::size_t n : {1, 3, 6}) CHECK(check_first_section_surjective(F.g, F.aux, n).outcome == CheckOutcome::inconclusive);
}

TEST_CASE("verdicts") {
  auto G = zoo("grigorchuk");
  auto v = superpoly_verdict(G.g, "a|b,c,d", 6, .8106);
  CHECK(v.superpolynomial);
  CHECK(v.intermediate);
  auto j = to_json(v, G.g);
  CHECK(j["section_contraction"]["evidence_only"] == true);
  CHECK(j["first_section"]["witness"]["a"] == "b");
  CHECK(j["intermediate"] == true);

  auto no_egg = superpoly_verdict(G.g, "a|b,c,d", 6);
  CHECK(no_egg.superpolynomial);
  CHECK_FALSE(no_egg.intermediate);
  CHECK_FALSE(superpoly_verdict(G.g, "a|b,c,d", 6, 1.0).intermediate);

  auto D = zoo("infinite-dihedral");
  auto d = superpoly_verdict(D.g, "a|b", 6, .5);
  CHECK_FALSE(d.superpolynomial);
  CHECK_FALSE(d.intermediate);
}

TEST_CASE("zoo machines with intermediate growth pass the bounded checks") {
  for (const char* name : {"t1-6letters", "y-7letters", "mnote-8letters", "grigorchuk-l2"}) {
    INFO(name);
    auto F = zoo(name);
    auto v = superpoly_verdict(F.g, F.blocks, 5);
    CHECK(v.partition.outcome == CheckOutcome::pass);
    CHECK(v.contraction.outcome == CheckOutcome::pass);
  }
}
