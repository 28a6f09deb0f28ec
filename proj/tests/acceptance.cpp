// Prints one PASS/FAIL line per acceptance criterion and exits non-zero when
// any line fails. Tolerances are the constants below.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "autgrowth/formats.hpp"
#include "autgrowth/strategies.hpp"

using namespace autgrowth;

namespace {

constexpr double kEtaTol = 1e-4;       // "± .0001"
constexpr double kOneSecond = 1.0;     // runtime bound for the level-1 row
constexpr double kSizeFactor = 3.0;    // egg size "within x3"
constexpr long kRadiusSlack = 10;      // radius "within ± 10"
constexpr double kWeightL1 = 0.05;     // optimizer weights in L1
constexpr double kFormulaTol = 1e-4;   // alpha-formula table

const std::vector<double> kBartholdi{.305061, .34747, .223839, .123631};

/// Published values carry four decimals; this is how a computed value reads at that precision.
double at4(double x) { return std::round(x * 1e4) / 1e4; }

std::string num(double x, int digits = 6) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << x;
  return out.str();
}

struct Line {
  bool ok = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SearchResult search(const Problem& p, const std::vector<double>& w, double target, std::size_t cap = 512) {
  SearchConfig cfg;
  cfg.target = target;
  cfg.radius_cap = cap;
  return search_egg(p.gens, p.aux, WeightVector::normalized(w), cfg);
}

Line level_one_optimal() {
  auto p = load_problem("grigorchuk");
  const auto t0 = std::chrono::steady_clock::now();
  auto r = search(*p, kBartholdi, .99);
  const double secs = seconds_since(t0);
  const bool ok = r.status == SearchStatus::found && r.radius == 2 && r.egg_size == 4 &&
                  std::abs(r.eta_max - .8106) <= kEtaTol && r.alpha && std::abs(*r.alpha - .7675) <= kEtaTol &&
                  secs < kOneSecond;
  return {ok, "radius " + std::to_string(r.radius) + ", egg " + std::to_string(r.egg_size) + ", eta " +
                  num(r.eta_max) + ", alpha " + (r.alpha ? num(*r.alpha) : "none") + ", " + num(secs, 3) + " s"};
}

Word power(const Word& w, std::size_t k) {
  Word out;
  for (std::size_t i = 0; i < k; ++i) out.insert(out.end(), w.begin(), w.end());
  return out;
}

Line level_one_uniform() {
  auto p = load_problem("grigorchuk");
  const auto uniform = WeightVector::uniform(4);
  bool ok = true;
  std::string detail;
  for (std::size_t cap : {10, 11, 16, 24}) {
    SearchConfig cfg;
    cfg.target = .99;
    cfg.radius_cap = cap;
    EggSearch s(p->gens, p->aux, uniform, cfg);
    const Word ba = p->gens.parse_word("ba");
    std::size_t even_levels = 0;
    while (!s.done()) {
      const std::size_t level = s.next_level();
      if (level % 2 == 0) {
        const Word want = power(ba, level / 2);
        bool present = false;
        for (const auto& f : s.yolk()) present = present || f.word == want;
        ok = ok && present;
        ++even_levels;
      }
      s.step();
    }
    ok = ok && s.status() == SearchStatus::radius_exceeded;
    detail += "cap " + std::to_string(cap) + ": " + to_string(s.status()) + " (" + std::to_string(even_levels) +
              " even levels checked); ";
  }
  // a is accepted on level 1 (eta 0), so the frontier holds the cyclic
  // conjugate (ba)^k; both have eta 1 under uniform weights
  const Word ab = p->gens.parse_word("ab"), ba = p->gens.parse_word("ba");
  for (std::size_t k = 1; k <= 8; ++k) {
    ok = ok && eta_of(power(ab, k), uniform, p->gens, p->aux) == 1.0 &&
         eta_of(power(ba, k), uniform, p->gens, p->aux) == 1.0;
  }
  detail += "(ba)^k in the frontier at every even level, eta((ab)^k) = eta((ba)^k) = 1 for k <= 8";
  return {ok, detail};
}

Line level_two() {
  auto p = load_problem("grigorchuk-l2");
  auto a = search(*p, kBartholdi, .75);
  const auto t0 = std::chrono::steady_clock::now();
  auto b = search(*p, kBartholdi, .68);
  const double secs = seconds_since(t0);
  const bool ok_a = a.status == SearchStatus::found && a.eta_max <= .7497 && a.alpha && *a.alpha <= .8280;
  const double size = static_cast<double>(b.egg_size);
  const bool ok_b = b.status == SearchStatus::found && b.eta_max <= .6800 && b.alpha && *b.alpha <= .7824 &&
                    size >= 93855.0 / kSizeFactor && size <= 93855.0 * kSizeFactor &&
                    std::labs(static_cast<long>(b.radius) - 45) <= kRadiusSlack;
  return {ok_a && ok_b, "target .75: eta " + num(a.eta_max) + ", alpha " + (a.alpha ? num(*a.alpha) : "none") +
                            "; target .68: eta " + num(b.eta_max) + ", alpha " + (b.alpha ? num(*b.alpha) : "none") +
                            ", egg " + std::to_string(b.egg_size) + ", radius " + std::to_string(b.radius) + ", " +
                            num(secs, 2) + " s"};
}

Line level_three() {
  auto p = load_problem("grigorchuk-l3");
  auto r = search(*p, kBartholdi, .58);
  // alpha(.58) itself is .79242, so .7924 is the four-decimal reading; the
  // slightly tighter target shows the same four-decimal bound without rounding
  auto tight = search(*p, kBartholdi, .5799);
  const bool ok = r.status == SearchStatus::found && r.eta_max <= .5800 && r.alpha && at4(*r.alpha) <= .7924 &&
                  tight.status == SearchStatus::found && tight.alpha && *tight.alpha <= .7924;
  return {ok, "target .58: eta " + num(r.eta_max) + ", alpha " + (r.alpha ? num(*r.alpha) : "none") +
                  " (reads .7924 at four decimals), radius " + std::to_string(r.radius) + ", egg " +
                  std::to_string(r.egg_size) + "; target .5799: alpha " + (tight.alpha ? num(*tight.alpha) : "none")};
}

Line opt_strategy() {
  auto p = load_problem("grigorchuk");
  StrategyOptions o;
  o.update = 4;
  o.opt.restarts = 16;
  auto run = run_opt(*p, WeightVector::uniform(4), {.90}, o);
  if (run.rounds.size() != 1) return {false, "no round"};
  const auto& r = run.rounds[0];
  const std::vector<double> published{.3052, .3475, .2243, .1232};
  double l1 = 0;
  for (std::size_t i = 0; i < 4; ++i) l1 += std::abs(r.weights_out[i] - published[i]);
  const bool ok = r.status == SearchStatus::found && r.eta <= .812 && r.alpha && *r.alpha <= .768 && l1 <= kWeightL1;
  std::string w = "[";
  for (std::size_t i = 0; i < 4; ++i) w += (i ? "," : "") + num(r.weights_out[i], 4);
  return {ok, "eta " + num(r.eta) + ", alpha " + (r.alpha ? num(*r.alpha) : "none") + ", weights " + w +
                  "], L1 distance " + num(l1, 4) + ", radius " + std::to_string(r.radius) + ", egg " +
                  std::to_string(r.egg_size)};
}

Line mnote() {
  auto p = load_problem("mnote-8letters");
  auto u = search(*p, {1, 1, 1}, .83);
  auto e = search(*p, {1, 0, 0}, .819);  // zeros become the floor epsilon
  const bool ok = u.status == SearchStatus::found && u.eta_max <= .8300 && u.alpha && *u.alpha <= .9178 &&
                  e.status == SearchStatus::found && e.eta_max <= .8190 && e.alpha && *e.alpha <= .9124;
  return {ok, "uniform: eta " + num(u.eta_max) + ", alpha " + (u.alpha ? num(*u.alpha) : "none") + ", egg " +
                  std::to_string(u.egg_size) + "; [1,eps,eps]: eta " + num(e.eta_max) + ", alpha " +
                  (e.alpha ? num(*e.alpha) : "none") + ", egg " + std::to_string(e.egg_size)};
}

Line t1() {
  auto p = load_problem("t1-6letters");
  auto r = search(*p, {.3352, .1899, .1899, .2849}, .645);
  const bool ok = r.status == SearchStatus::found && r.eta_max <= .6450 && r.alpha && *r.alpha <= .8034;
  return {ok, "eta " + num(r.eta_max) + ", alpha " + (r.alpha ? num(*r.alpha) : "none") + ", radius " +
                  std::to_string(r.radius) + ", egg " + std::to_string(r.egg_size)};
}

Line alpha_table() {
  const double a = alpha_from(.8106, 2), b = alpha_from(.6572, 4), c = alpha_from(.5327, 8);
  const bool ok = std::abs(a - .7675) <= kFormulaTol && std::abs(b - .7675) <= kFormulaTol &&
                  std::abs(c - .7675) <= kFormulaTol;
  return {ok, num(a) + ", " + num(b) + ", " + num(c)};
}

int run_command(const std::string& cmd) {
  std::string quiet = cmd + " > /dev/null 2>&1";
  const int status = std::system(quiet.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Line property_suites() {
  struct Suite {
    const char* label;
    const char* binary;
    const char* test;
  };
  const std::vector<Suite> suites = {
      {"wreath homomorphism", "test_mealy", "properties on random words across the zoo"},
      {"identity vs exhaustive action", "test_words", "identity test agrees with exhaustive action"},
      {"reduce soundness", "test_words", "reduce is sound and idempotent"},
      {"eta homogeneity", "test_egg_search", "eta is invariant under scaling the weights"},
      {"count-matrix fidelity", "test_egg_search", "eta from counts equals eta from words exactly"},
      {"optimizer feasibility", "test_weight_opt", "projection always lands in the feasible set"},
      {"optimizer never worse", "test_weight_opt", "optimizer never ends worse than its start"},
      {"finite-difference gradient", "test_weight_opt", "ratio gradient matches finite differences"},
      {"egg oracle", "test_egg_search", "every short reduced word is covered"},
      {"worker determinism", "test_egg_search", "results do not depend on the worker count"},
      {"growth Grigorchuk", "test_growth", "Grigorchuk ball sizes"},
      {"growth adding machine", "test_growth", "adding machine grows linearly"},
  };
  std::size_t passed = 0;
  std::string failed;
  for (const auto& s : suites) {
    const std::string cmd = std::string("\"") + AUTGROWTH_TEST_DIR + "/" + s.binary + "\" \"" + s.test + "\"";
    if (run_command(cmd) == 0)
      ++passed;
    else
      failed += std::string(failed.empty() ? "" : ", ") + s.label;
  }
  return {passed == suites.size(), std::to_string(passed) + "/" + std::to_string(suites.size()) + " suites" +
                                       (failed.empty() ? "" : ", failing: " + failed)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Line()> check;
  };
  const std::vector<Criterion> criteria = {
      {"level 1, optimal weights, target .99", level_one_optimal},
      {"level 1, uniform weights, no egg", level_one_uniform},
      {"level 2, optimal weights, targets .75 and .68", level_two},
      {"level 3, optimal weights, target .58", level_three},
      {"opt strategy, level 1, uniform start, update 4", opt_strategy},
      {"mNote machine, uniform and [1,eps,eps]", mnote},
      {"T1 machine, published weights", t1},
      {"alpha formula table", alpha_table},
      {"property suites", property_suites},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Line line;
    try {
      line = c.check();
    } catch (const std::exception& e) {
      line = {false, std::string("error: ") + e.what()};
    }
    failures += line.ok ? 0 : 1;
    std::cout << (line.ok ? "PASS " : "FAIL ") << c.name << ": " << line.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
