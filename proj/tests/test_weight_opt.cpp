#include "catch_amalgamated.hpp"

#include <random>

#include "autgrowth/formats.hpp"
#include "autgrowth/weight_opt.hpp"
#include "support.hpp"

using namespace autgrowth;
using Catch::Approx;

namespace {

struct Level1 {
  Level1() : m(builtin("grigorchuk")), g(m), aux(make_aux(g, "a|b,c,d")) {
    for (const char* w : {"a", "ba", "ca", "da"}) rows.push_back(word_stats(g.parse_word(w), g, aux));
  }
  MealyMachine m;
  GeneratorTable g;
  AuxiliaryGroup aux;
  std::vector<WordStats> rows;
  MinimaxProblem problem() const { return MinimaxProblem(rows, WeightConstraints::from_aux(aux)); }
};

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

std::vector<double> random_point(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST_CASE("objective on the level one egg") {
  Level1 L;
  auto p = L.problem();
  CHECK(p.words() == 4);
  // ba, ca and da have different counts, a is its own row
  CHECK(p.distinct_rows() == 4);
  auto v = p.objective(testsupport::bartholdi_weights());
  CHECK(v.value == Approx(.8106).margin(1e-4));

  auto u = p.objective({.25, .25, .25, .25});
  CHECK(u.value == Approx(1.0));
  CHECK(u.argmax == 1);  // ba, lowest index among the tied words

  MinimaxProblem only_a({L.rows[0]}, WeightConstraints::from_aux(L.aux));
  CHECK(only_a.objective({.25, .25, .25, .25}).value == 0.0);
}

TEST_CASE("duplicate rows are merged but word indices kept") {
  Level1 L;
  std::vector<WordStats> rows = {L.rows[1], L.rows[0], L.rows[1]};
  MinimaxProblem p(rows, WeightConstraints::from_aux(L.aux));
  CHECK(p.words() == 3);
  CHECK(p.distinct_rows() == 2);
  CHECK(p.objective({.25, .25, .25, .25}).argmax == 0);
  CHECK(p.ratio(2, {.25, .25, .25, .25}) == Approx(1.0));
}

TEST_CASE("constraints from the auxiliary group") {
  Level1 L;
  auto c = WeightConstraints::from_aux(L.aux);
  CHECK(c.size == 4);
  CHECK(c.triangles.size() == 6);  // each of b, c, d as a product, both orders
  CHECK(c.pairs.empty());
  CHECK(c.feasible({.25, .25, .25, .25}));
  CHECK_FALSE(c.feasible({.1, .7, .1, .1}));  // b = cd needs pi_b <= pi_c + pi_d
  CHECK_FALSE(c.feasible({.5, .5, 0, 0}));
  CHECK(c.violation({.25, .25, .25, .25}) == 0.0);
  CHECK(c.violation({.3, .3, .3, .3}) < 0.0);

  // free group over a symmetric generating set pairs each letter with its inverse
  auto m = builtin("adding-machine");
  GeneratorTable g(symmetrize(m));
  auto free = make_aux(g, "free");
  auto fc = WeightConstraints::from_aux(free);
  CHECK(fc.triangles.empty());
  CHECK(fc.pairs.size() == 1);
}

TEST_CASE("projection examples") {
  Level1 L;
  auto c = WeightConstraints::from_aux(L.aux);
  const std::vector<double> inside{.3, .3, .2, .2};
  CHECK(project_feasible(inside, c) == inside);

  auto x = project_feasible({.4, .4, .4, .4}, c);
  for (double v : x) CHECK(v == Approx(.25).margin(1e-9));

  auto y = project_feasible({1, 0, 0, 0}, c);
  CHECK(c.feasible(y));
  CHECK(y[0] > .9);

  CHECK_THROWS_AS(project_feasible({.5, .5}, c), Error);

  WeightConstraints impossible = c;
  impossible.epsilon = 0.3;
  CHECK_THROWS_AS(project_feasible({.4, .2, .2, .2}, impossible), Error);
}

TEST_CASE("projection always lands in the feasible set") {
  Level1 L;
  auto c = WeightConstraints::from_aux(L.aux);
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    auto x = project_feasible(random_point(rng, 4), c);
    INFO(i);
    CHECK(c.feasible(x));
  }
}

TEST_CASE("projection respects inverse pairs") {
  auto m = builtin("lamplighter");
  GeneratorTable g(symmetrize(m));
  auto aux = make_aux(g, "free");
  auto c = WeightConstraints::from_aux(aux);
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto x = project_feasible(random_point(rng, c.size), c);
    CHECK(c.feasible(x));
    for (auto [s, t] : c.pairs) CHECK(x[s] == x[t]);
  }
}

TEST_CASE("ratio gradient matches finite differences") {
  Level1 L;
  auto p = L.problem();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(.1, 1.0);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(4);
    for (auto& v : x) v = u(rng);
    for (std::size_t w = 0; w < p.words(); ++w) {
      auto g = p.ratio_gradient(w, x);
      for (std::size_t s = 0; s < 4; ++s) {
        auto up = x, dn = x;
        up[s] += h;
        dn[s] -= h;
        const double fd = (p.ratio(w, up) - p.ratio(w, dn)) / (2 * h);
        CHECK(g[s] == Approx(fd).margin(1e-6));
      }
    }
  }
}

TEST_CASE("level one optimum near the published weights") {
  Level1 L;
  auto p = L.problem();
  auto r = optimize(p, OptOptions{}, std::vector<double>{.25, .25, .25, .25});
  CHECK(p.constraints().feasible(r.weights));
  CHECK(r.eta <= .812);
  CHECK(l1(r.weights, {.3052, .3475, .2243, .1232}) <= .05);
  CHECK(r.slacks.size() == 6);
  CHECK(r.eta <= r.start_eta);
  CHECK(r.restarts_used == 17);
}

TEST_CASE("grid search oracle bounds the optimizer") {
  Level1 L;
  auto p = L.problem();
  const auto& c = p.constraints();
  double best = 2.0;
  const int steps = 80;
  for (int i = 1; i < steps; ++i)
    for (int j = 1; i + j < steps; ++j)
      for (int k = 1; i + j + k < steps; ++k) {
        std::vector<double> x{double(i) / steps, double(j) / steps, double(k) / steps,
                              double(steps - i - j - k) / steps};
        if (!c.feasible(x)) continue;
        best = std::min(best, p.objective(x).value);
      }
  auto r = optimize(p, OptOptions{});
  CHECK(r.eta <= best + 1e-9);
}

TEST_CASE("optimizer never ends worse than its start") {
  Level1 L;
  auto p = L.problem();
  std::mt19937 rng(5);
  OptOptions o;
  o.restarts = 0;
  o.iterations = 200;
  for (int i = 0; i < 30; ++i) {
    auto start = project_feasible(random_point(rng, 4), p.constraints());
    auto r = optimize(p, o, start);
    CHECK(r.eta <= p.objective(start).value + 1e-15);
    CHECK(p.constraints().feasible(r.weights));
  }
}

TEST_CASE("optimizer is deterministic across worker counts") {
  Level1 L;
  auto p = L.problem();
  OptOptions o;
  o.iterations = 300;
  o.workers = 1;
  auto a = optimize(p, o);
  o.workers = 4;
  auto b = optimize(p, o);
  CHECK(a.weights == b.weights);
  CHECK(a.eta == b.eta);
  o.seed = 2;
  auto c = optimize(p, o);
  CHECK(p.constraints().feasible(c.weights));
}

TEST_CASE("active gradient averaging also converges") {
  Level1 L;
  auto p = L.problem();
  OptOptions o;
  o.average_active = true;
  o.restarts = 4;
  auto r = optimize(p, o, std::vector<double>{.25, .25, .25, .25});
  CHECK(r.eta <= .815);
}
