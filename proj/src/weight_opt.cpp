#include "autgrowth/weight_opt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <thread>

namespace autgrowth {

WeightConstraints WeightConstraints::from_aux(const AuxiliaryGroup& aux, double epsilon, double margin) {
  WeightConstraints c;
  c.size = aux.generator_count();
  c.epsilon = epsilon;
  c.margin = margin;
  c.triangles = triangular_constraints(aux);
  for (Gen s = 0; s < c.size; ++s) {
    const Gen t = aux.inverse(s);
    if (t != kNoGen && t > s) c.pairs.emplace_back(s, t);
  }
  return c;
}

std::vector<double> WeightConstraints::slacks(const std::vector<double>& pi) const {
  std::vector<double> out;
  out.reserve(triangles.size());
  for (const auto& t : triangles) out.push_back(pi[t.left] + pi[t.right] - pi[t.product] - margin);
  return out;
}

double WeightConstraints::violation(const std::vector<double>& pi) const {
  if (pi.size() != size) return -1.0;
  double worst = 0.0;
  double sum = 0.0;
  for (double v : pi) {
    if (!std::isfinite(v)) return -1.0;
    sum += v;
    worst = std::min(worst, v - epsilon);
  }
  worst = std::min(worst, -std::abs(sum - 1.0));
  for (double s : slacks(pi)) worst = std::min(worst, s);
  for (auto [s, t] : pairs) worst = std::min(worst, -std::abs(pi[s] - pi[t]));
  return worst;
}

bool WeightConstraints::feasible(const std::vector<double>& pi, double tol) const { return violation(pi) >= -tol; }

MinimaxProblem::MinimaxProblem(const std::vector<WordStats>& rows, WeightConstraints constraints)
    : constraints_(std::move(constraints)), word_count_(rows.size()) {
  const std::size_t n = constraints_.size;
  std::map<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>, std::size_t> index;
  row_of_word_.reserve(rows.size());
  for (std::size_t w = 0; w < rows.size(); ++w) {
    const auto& st = rows[w];
    if (st.letters.size() != n || st.sections.size() != n) throw Error("count row has the wrong width");
    if (std::accumulate(st.letters.begin(), st.letters.end(), 0ULL) == 0) throw Error("count row of an empty word");
    auto [it, fresh] = index.emplace(std::make_pair(st.letters, st.sections), first_index_.size());
    if (fresh) {
      first_index_.push_back(w);
      for (std::size_t s = 0; s < n; ++s) {
        n_.push_back(st.letters[s]);
        c_.push_back(st.sections[s]);
      }
    }
    row_of_word_.push_back(it->second);
  }
}

double MinimaxProblem::ratio(std::size_t index, const std::vector<double>& pi) const {
  const std::size_t n = size();
  const std::size_t r = row_of(index);
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    num += c_[r * n + s] * pi[s];
    den += n_[r * n + s] * pi[s];
  }
  return num / den;
}

MinimaxProblem::Value MinimaxProblem::objective(const std::vector<double>& pi) const {
  const std::size_t n = size();
  Value best{-1.0, 0};
  std::vector<double> values(distinct_rows());
  for (std::size_t r = 0; r < distinct_rows(); ++r) {
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      num += c_[r * n + s] * pi[s];
      den += n_[r * n + s] * pi[s];
    }
    values[r] = num / den;
    best.value = std::max(best.value, values[r]);
  }
  // rows are numbered by first occurrence, so the first active row has the lowest word index
  for (std::size_t r = 0; r < distinct_rows(); ++r) {
    if (values[r] >= best.value - 1e-12) {
      best.argmax = first_index_[r];
      break;
    }
  }
  if (distinct_rows() == 0) best.value = 0.0;
  return best;
}

std::vector<double> MinimaxProblem::ratio_gradient(std::size_t index, const std::vector<double>& pi) const {
  const std::size_t n = size();
  const std::size_t r = row_of(index);
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    num += c_[r * n + s] * pi[s];
    den += n_[r * n + s] * pi[s];
  }
  const double f = num / den;
  std::vector<double> g(n);
  for (std::size_t s = 0; s < n; ++s) g[s] = (c_[r * n + s] - f * n_[r * n + s]) / den;
  return g;
}

namespace {

/// Projection onto {sum x = 1, x >= floor} by shift and clamp.
void project_simplex(std::vector<double>& x, double floor) {
  const std::size_t n = x.size();
  // find tau with sum max(floor, x_i - tau) = 1
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double tau = 0.0;
  double prefix = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    prefix += sorted[k - 1];
    // the k largest stay above the floor
    const double t = (prefix - (1.0 - floor * static_cast<double>(n - k))) / static_cast<double>(k);
    const bool ok_inside = sorted[k - 1] - t > floor;
    const bool ok_next = k == n || sorted[k] - t <= floor;
    if (ok_inside && ok_next) {
      tau = t;
      break;
    }
  }
  for (auto& v : x) v = std::max(floor, v - tau);
}

void average_pairs(std::vector<double>& x, const WeightConstraints& c) {
  for (auto [s, t] : c.pairs) x[s] = x[t] = 0.5 * (x[s] + x[t]);
}

/// Halfspace pi_p - pi_l - pi_r <= -margin as (a, b).
void project_halfspace(std::vector<double>& x, const TriangularConstraint& t, double margin) {
  const double lhs = x[t.product] - x[t.left] - x[t.right];
  const double excess = lhs + margin;
  if (excess <= 0.0) return;
  const double step = excess / 3.0;
  x[t.product] -= step;
  x[t.left] += step;
  x[t.right] += step;
}

}  // namespace

std::vector<double> project_feasible(const std::vector<double>& raw, const WeightConstraints& c) {
  const std::size_t n = c.size;
  if (raw.size() != n) throw Error("weight vector has the wrong size");
  if (c.feasible(raw)) return raw;
  const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
  if (!c.feasible(uniform)) throw Error("weight constraints are infeasible");

  std::vector<double> x(raw);
  for (auto& v : x)
    if (!std::isfinite(v)) v = 0.0;
  const std::size_t sets = 2 + c.triangles.size();
  std::vector<std::vector<double>> incr(sets, std::vector<double>(n, 0.0));
  for (int cycle = 0; cycle < 2000; ++cycle) {
    const std::vector<double> before = x;
    for (std::size_t k = 0; k < sets; ++k) {
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + incr[k][i];
      const std::vector<double> shifted = y;
      if (k == 0)
        project_simplex(y, c.epsilon);
      else if (k == 1)
        average_pairs(y, c);
      else
        project_halfspace(y, c.triangles[k - 2], c.margin);
      for (std::size_t i = 0; i < n; ++i) incr[k][i] = shifted[i] - y[i];
      x = std::move(y);
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(x[i] - before[i]));
    if (change < 1e-15) break;
  }

  average_pairs(x, c);
  project_simplex(x, c.epsilon);
  if (c.feasible(x)) return x;

  // blend toward uniform, which is strictly feasible
  double t = 0.0;
  auto need = [&](double at_x, double at_u) {
    // at_x < 0 <= at_u, residual is linear along the segment
    if (at_x >= 0.0) return;
    t = std::max(t, at_x / (at_x - at_u));
  };
  const double guard = 1e-13;
  for (std::size_t i = 0; i < n; ++i) need(x[i] - c.epsilon - guard, uniform[i] - c.epsilon - guard);
  for (const auto& tr : c.triangles)
    need(x[tr.left] + x[tr.right] - x[tr.product] - c.margin - guard,
         uniform[tr.left] + uniform[tr.right] - uniform[tr.product] - c.margin - guard);
  t = std::min(1.0, t * (1.0 + 1e-9) + 1e-15);
  for (std::size_t i = 0; i < n; ++i) x[i] = (1.0 - t) * x[i] + t * uniform[i];
  average_pairs(x, c);
  if (!c.feasible(x)) throw Error("projection onto the weight polytope failed");
  return x;
}

namespace {

struct Run {
  std::vector<double> best;
  double best_eta = 0.0;
  std::size_t argmax = 0;
  double start_eta = 0.0;
  double final_eta = 0.0;
  std::size_t iterations = 0;
};

Run descend(const MinimaxProblem& p, const OptOptions& o, std::vector<double> x) {
  const std::size_t n = p.size();
  Run run;
  auto val = p.objective(x);
  run.best = x;
  run.best_eta = run.start_eta = run.final_eta = val.value;
  run.argmax = val.argmax;
  std::vector<double> v(n, 0.0);
  double step = o.step;
  double previous = val.value;
  unsigned stall = 0;
  for (unsigned it = 0; it < o.iterations; ++it) {
    std::vector<double> g;
    if (o.average_active) {
      g.assign(n, 0.0);
      unsigned active = 0;
      for (std::size_t w = 0; w < p.words(); ++w) {
        if (p.ratio(w, x) < val.value - 1e-12) continue;
        auto gw = p.ratio_gradient(w, x);
        for (std::size_t s = 0; s < n; ++s) g[s] += gw[s];
        ++active;
      }
      for (auto& gs : g) gs /= std::max(1u, active);
    } else {
      g = p.ratio_gradient(val.argmax, x);
    }
    double norm = 0.0;
    for (double gs : g) norm += gs * gs;
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    for (std::size_t s = 0; s < n; ++s) {
      v[s] = o.inertia * v[s] - step * g[s] / norm;
      x[s] += v[s];
    }
    x = project_feasible(x, p.constraints());
    step *= o.decay;
    val = p.objective(x);
    run.iterations = it + 1;
    if (val.value < run.best_eta) {
      run.best_eta = val.value;
      run.best = x;
      run.argmax = val.argmax;
    }
    stall = std::abs(val.value - previous) < o.tolerance ? stall + 1 : 0;
    previous = val.value;
    if (stall >= 50) break;
  }
  run.final_eta = val.value;
  return run;
}

std::vector<double> dirichlet(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> x(n);
  double sum = 0.0;
  for (auto& v : x) sum += (v = expo(rng));
  for (auto& v : x) v /= sum;
  return x;
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

OptResult optimize(const MinimaxProblem& problem, const OptOptions& options,
                   const std::optional<std::vector<double>>& start) {
  const std::size_t n = problem.size();
  std::vector<std::vector<double>> starts;
  if (start) starts.push_back(project_feasible(*start, problem.constraints()));
  for (unsigned r = 0; r < options.restarts; ++r)
    starts.push_back(project_feasible(dirichlet(n, splitmix(options.seed * 1000003ULL + r)), problem.constraints()));
  if (starts.empty()) starts.push_back(project_feasible(std::vector<double>(n, 1.0 / n), problem.constraints()));

  std::vector<Run> runs(starts.size());
  if (problem.words() == 0) {
    OptResult r;
    r.weights = starts.front();
    r.restarts_used = static_cast<unsigned>(starts.size());
    r.slacks = problem.constraints().slacks(r.weights);
    return r;
  }
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(starts.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) runs[i] = descend(problem, options, starts[i]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < starts.size(); i += workers) runs[i] = descend(problem, options, starts[i]);
      });
    for (auto& th : pool) th.join();
  }

  std::size_t win = 0;
  double start_eta = runs[0].start_eta;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    start_eta = std::min(start_eta, runs[i].start_eta);
    if (runs[i].best_eta < runs[win].best_eta ||
        (runs[i].best_eta == runs[win].best_eta && runs[i].best < runs[win].best))
      win = i;
  }
  OptResult r;
  r.weights = runs[win].best;
  const auto check = problem.objective(r.weights);
  r.eta = check.value;
  r.argmax = check.argmax;
  r.final_eta = runs[win].final_eta;
  r.start_eta = start_eta;
  for (const auto& run : runs) r.iterations += run.iterations;
  r.restarts_used = static_cast<unsigned>(runs.size());
  r.slacks = problem.constraints().slacks(r.weights);
  return r;
}

}  // namespace autgrowth
