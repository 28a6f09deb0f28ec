#include "catch_amalgamated.hpp"

#include "autgrowth/egg_search.hpp"
#include "autgrowth/formats.hpp"
#include "support.hpp"

using namespace autgrowth;
using Catch::Approx;

namespace {

struct Setup {
  explicit Setup(const char* name = "grigorchuk")
      : m(builtin(name)), g(m), aux(make_aux(g, builtin_blocks(name))) {}
  MealyMachine m;
  GeneratorTable g;
  AuxiliaryGroup aux;
  Word w(const char* text) const { return g.parse_word(text); }
};

const WeightVector& bartholdi() {
  static const WeightVector pi(testsupport::bartholdi_weights());
  return pi;
}

Word power(const Word& w, std::size_t k) {
  Word out;
  for (std::size_t i = 0; i < k; ++i) out.insert(out.end(), w.begin(), w.end());
  return out;
}

}  // namespace

TEST_CASE("contraction ratio of single words") {
  Setup S;
  const double pa = .305061, pb = .34747, pc = .223839, pd = .123631;
  CHECK(eta_of(S.w("ba"), bartholdi(), S.g, S.aux) == Approx((pa + pc) / (pa + pb)).epsilon(1e-12));
  CHECK(eta_of(S.w("ba"), bartholdi(), S.g, S.aux) == Approx(0.81054).margin(1e-5));
  CHECK(eta_of(S.w("a"), bartholdi(), S.g, S.aux) == 0.0);
  CHECK(eta_of(S.w("d"), bartholdi(), S.g, S.aux) == Approx(pb / pd).epsilon(1e-12));
  CHECK(eta_of(S.w("d"), bartholdi(), S.g, S.aux) == Approx(2.8105).margin(1e-4));
  CHECK_THROWS_AS(eta_of(Word{}, bartholdi(), S.g, S.aux), Error);
}

TEST_CASE("growth exponent formula") {
  CHECK(alpha_from(.8106, 2) == Approx(.7675).margin(1e-4));
  CHECK(alpha_from(.6572, 4) == Approx(.7675).margin(1e-4));
  CHECK(alpha_from(.5327, 8) == Approx(.7675).margin(1e-4));
  CHECK(alpha_from(1.0, 5) == 1.0);
  CHECK(alpha_from(.5, 2) < alpha_from(.6, 2));
  CHECK_THROWS_AS(alpha_from(0.0, 2), Error);
  CHECK_THROWS_AS(alpha_from(1.1, 2), Error);
  CHECK_THROWS_AS(alpha_from(.5, 1), Error);
  CHECK(round_up4(.81054) == Approx(.8106));
  CHECK(round_up4(.8106) == Approx(.8106));
}

TEST_CASE("first level with the optimal weights") {
  Setup S;
  SearchConfig cfg;
  cfg.target = .99;
  auto r = search_egg(S.g, S.aux, bartholdi(), cfg);
  CHECK(r.status == SearchStatus::found);
  CHECK(r.radius == 2);
  CHECK(r.egg_size == 4);
  CHECK(r.eta_max == Approx(.8106).margin(1e-4));
  REQUIRE(r.alpha);
  CHECK(*r.alpha == Approx(.7675).margin(1e-4));
  std::vector<std::string> egg;
  for (const auto& e : r.egg) egg.push_back(S.g.format_word(e.word));
  CHECK(egg == std::vector<std::string>{"a", "ba", "ca", "da"});
}

TEST_CASE("uniform weights never finish and keep (ba)^k") {
  Setup S;
  SearchConfig cfg;
  cfg.target = .99;
  cfg.radius_cap = 12;
  EggSearch s(S.g, S.aux, WeightVector::uniform(4), cfg);
  // a itself is accepted at once, so the non-contracting witness in the yolk
  // is the conjugate (ba)^k of (ab)^k
  const Word ba = S.w("ba");
  while (!s.done()) {
    s.step();
    const std::size_t level = s.next_level();
    if (level % 2 == 0 && level > 0) {
      const Word target = power(ba, level / 2);
      bool present = false;
      for (const auto& f : s.yolk()) present = present || f.word == target;
      INFO("level " << level);
      CHECK(present);
    }
  }
  CHECK(s.status() == SearchStatus::radius_exceeded);
  CHECK(s.radius() == 12);
  CHECK_FALSE(s.result().alpha);
}

TEST_CASE("eta is invariant under scaling the weights") {
  Setup S;
  std::mt19937 rng(1);
  for (int t = 0; t < 200; ++t) {
    auto w = reduce(testsupport::random_word(rng, 4, 1 + t % 12), S.aux);
    if (w.empty()) continue;
    const auto st = word_stats(w, S.g, S.aux);
    std::vector<double> scaled;
    for (double v : bartholdi().values()) scaled.push_back(3.7 * v);
    CHECK(eta_from_stats(st, WeightVector(scaled)) == Approx(eta_from_stats(st, bartholdi())).epsilon(1e-12));
  }
}

TEST_CASE("eta from counts equals eta from words exactly") {
  Setup S("grigorchuk-l2");
  SearchConfig cfg;
  cfg.target = .8;
  auto r = search_egg(S.g, S.aux, bartholdi(), cfg);
  REQUIRE(r.status == SearchStatus::found);
  double worst = 0.0;
  for (const auto& e : r.egg) {
    const double direct = eta_of(e.word, bartholdi(), S.g, S.aux);
    REQUIRE(eta_from_stats(e.stats, bartholdi()) == direct);
    REQUIRE(direct <= cfg.target);
    worst = std::max(worst, direct);
    std::uint32_t syllables = 0;
    for (auto n : e.stats.letters) syllables += n;
    REQUIRE(syllables == e.word.size());
  }
  CHECK(worst == r.eta_max);
}

TEST_CASE("every short reduced word is covered") {
  struct Case {
    const char* machine;
    std::vector<double> weights;
    double target;
    std::size_t cap;
  };
  for (const auto& c : std::vector<Case>{{"grigorchuk", {.25, .25, .25, .25}, .99, 6},
                                         {"grigorchuk", testsupport::bartholdi_weights(), .85, 6},
                                         {"grigorchuk-l2", testsupport::bartholdi_weights(), .8, 5}}) {
    Setup S(c.machine);
    SearchConfig cfg;
    cfg.target = c.target;
    cfg.radius_cap = c.cap;
    EggSearch s(S.g, S.aux, WeightVector(c.weights), cfg);
    auto r = s.run();
    std::vector<Word> egg;
    for (const auto& e : r.egg) egg.push_back(e.word);
    std::vector<Word> yolk;
    for (const auto& f : s.yolk()) yolk.push_back(f.word);

    // reduced words by length, and which of them are merged into a smaller one
    std::vector<std::vector<Word>> reduced(r.radius + 2);
    for (std::size_t len = 1; len <= r.radius + 1; ++len)
      for (auto& w : testsupport::all_words(S.g.size(), len))
        if (is_reduced(w, S.aux)) reduced[len].push_back(w);
    auto equal_to_any = [&](const Word& p, const std::vector<Word>& set) {
      for (const auto& q : set)
        if (q.size() == p.size() && equal_elements(p, q, S.g)) return true;
      return false;
    };
    auto merged = [&](const Word& p) {
      for (const auto& q : reduced[p.size()]) {
        if (!(q < p)) break;
        if (equal_elements(p, q, S.g)) return true;
      }
      return false;
    };
    // shorter words are prefixes of these
    {
      const std::size_t len = r.radius + 1;
      for (const auto& v : reduced[len]) {
        bool covered = false;
        for (std::size_t k = 1; k <= v.size() && !covered; ++k) {
          Word p(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
          covered = equal_to_any(p, egg) || equal_to_any(p, yolk) || merged(p);
        }
        INFO(c.machine << " " << S.g.format_word(v));
        REQUIRE(covered);
      }
    }
  }
}

TEST_CASE("results do not depend on the worker count") {
  Setup S("grigorchuk-l2");
  auto run = [&](unsigned workers) {
    SearchConfig cfg;
    cfg.target = .78;
    cfg.workers = workers;
    return search_egg(S.g, S.aux, bartholdi(), cfg);
  };
  auto a = run(1), b = run(3);
  CHECK(a.status == b.status);
  CHECK(a.eta_max == b.eta_max);
  CHECK(a.radius == b.radius);
  CHECK(a.per_level_sizes == b.per_level_sizes);
  REQUIRE(a.egg.size() == b.egg.size());
  for (std::size_t i = 0; i < a.egg.size(); ++i) CHECK(a.egg[i].word == b.egg[i].word);
}

TEST_CASE("lowering the target never shrinks the radius") {
  Setup S("grigorchuk-l2");
  std::size_t previous = 0;
  for (double target : {.95, .9, .85, .8, .78}) {
    SearchConfig cfg;
    cfg.target = target;
    auto r = search_egg(S.g, S.aux, bartholdi(), cfg);
    REQUIRE(r.status == SearchStatus::found);
    CHECK(r.radius >= previous);
    previous = r.radius;
  }
}

TEST_CASE("global dedup is also sound") {
  Setup S("grigorchuk-l2");
  SearchConfig cfg;
  cfg.target = .8;
  cfg.global_dedup = true;
  auto r = search_egg(S.g, S.aux, bartholdi(), cfg);
  CHECK(r.status == SearchStatus::found);
  for (const auto& e : r.egg) CHECK(eta_of(e.word, bartholdi(), S.g, S.aux) <= .8);
}

TEST_CASE("reweighting re-verifies the shell") {
  Setup S;
  SearchConfig cfg;
  cfg.target = .9;
  EggSearch s(S.g, S.aux, bartholdi(), cfg);
  s.run();
  REQUIRE(s.status() == SearchStatus::found);
  // under uniform weights ba has ratio 1 and must leave the shell
  s.set_weights(WeightVector::uniform(4));
  CHECK(s.status() == SearchStatus::running);
  bool ba_back = false;
  for (const auto& f : s.yolk()) ba_back = ba_back || f.word == S.w("ba");
  CHECK(ba_back);
  for (const auto& e : s.shell()) CHECK(s.eta(e.stats) <= .9);
  CHECK_THROWS_AS(s.set_weights(WeightVector({.5, .05, .05, .4})), Error);
}

TEST_CASE("checkpoints restore the same state") {
  Setup S("grigorchuk-l2");
  SearchConfig cfg;
  cfg.target = .78;
  EggSearch s(S.g, S.aux, bartholdi(), cfg);
  for (int i = 0; i < 5; ++i) s.step();
  auto saved = s.checkpoint();
  auto copy = EggSearch::restore(S.g, S.aux, saved);
  CHECK(copy.checkpoint() == saved);
  auto a = s.run();
  auto b = copy.run();
  CHECK(a.eta_max == b.eta_max);
  CHECK(a.egg_size == b.egg_size);
  CHECK(a.per_level_sizes == b.per_level_sizes);
}

TEST_CASE("filtered steps leave unselected words in the yolk") {
  Setup S;
  SearchConfig cfg;
  EggSearch s(S.g, S.aux, bartholdi(), cfg);
  auto ev = s.step([](const FrontierWord& f, double) { return f.word.front() == 0; });
  CHECK(ev.processed == 1);
  CHECK(s.yolk().size() == 3);
  CHECK(s.shell().size() == 1);
  s.run();
  CHECK(s.status() == SearchStatus::found);
  CHECK(s.shell().size() == 4);
}
