#include "autgrowth/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "autgrowth/formats.hpp"

namespace autgrowth {

using nlohmann::json;

Problem::Problem(MealyMachine m, std::string ref, std::string b)
    : machine(std::move(m)), machine_ref(std::move(ref)), blocks(std::move(b)), gens(machine),
      aux(make_aux(gens, blocks)) {}

std::shared_ptr<Problem> load_problem(const std::string& machine_ref, const std::string& blocks) {
  std::string b = blocks;
  if (b.empty()) {
    b = "free";
    for (const auto& entry : builtin_catalog())
      if (entry.name == machine_ref) b = entry.blocks;
  }
  return std::make_shared<Problem>(load_machine(machine_ref), machine_ref, b);
}

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::rec: return "rec";
    case StrategyKind::opt: return "opt";
    case StrategyKind::ovi: return "ovi";
    case StrategyKind::loop: return "loop";
  }
  return "rec";
}

const RoundRecord* StrategyRun::best() const {
  for (auto it = rounds.rbegin(); it != rounds.rend(); ++it)
    if (it->status == SearchStatus::found) return &*it;
  return nullptr;
}

json StrategyRun::to_json() const {
  json rs = json::array();
  for (const auto& r : rounds) {
    rs.push_back({{"target", r.target},
                  {"weights_in", r.weights_in},
                  {"weights_out", r.weights_out},
                  {"status", to_string(r.status)},
                  {"search_eta", r.search_eta},
                  {"eta", r.eta},
                  {"alpha", r.alpha ? json(*r.alpha) : json(nullptr)},
                  {"radius", r.radius},
                  {"egg_size", r.egg_size},
                  {"reweights", r.reweights},
                  {"per_level_sizes", r.per_level_sizes}});
  }
  return {{"strategy", to_string(kind)}, {"rounds", rs}};
}

namespace {

/// Starting weights outside the triangular polytope are moved to the nearest feasible point.
WeightVector feasible_start(const WeightVector& pi, const AuxiliaryGroup& aux) {
  if (is_triangular(pi, aux)) return pi;
  const auto c = WeightConstraints::from_aux(aux, pi.epsilon());
  return WeightVector(project_feasible(pi.values(), c), pi.epsilon());
}

std::optional<double> alpha_of(double eta, std::size_t degree) {
  if (eta >= 1.0) return std::nullopt;
  return eta > 0.0 ? alpha_from(eta, degree) : 0.0;
}

}  // namespace

EggSearch search_with_updates(const Problem& p, const WeightVector& pi, const StrategyOptions& options,
                              std::size_t* reweights) {
  EggSearch s(p.gens, p.aux, pi, options.search);
  const auto constraints = WeightConstraints::from_aux(p.aux, pi.epsilon());
  std::size_t last = 0;
  std::size_t count = 0;
  while (!s.done()) {
    const std::size_t level = s.next_level();
    if (options.update > 0 && level % options.update == 0 && level > last) {
      last = level;
      std::vector<WordStats> rows;
      rows.reserve(s.shell().size() + s.yolk().size());
      for (const auto& e : s.shell()) rows.push_back(e.stats);
      for (const auto& f : s.yolk()) rows.push_back(f.stats);
      MinimaxProblem mp(rows, constraints);
      const double before = mp.objective(s.weights().values()).value;
      auto r = optimize(mp, options.opt, s.weights().values());
      s.set_weights(WeightVector(r.weights, pi.epsilon()));
      ++count;
      if (options.on_reweight) options.on_reweight(ReweightEvent{level, rows.size(), before, r.eta});
      if (s.done()) break;
    }
    auto ev = s.step();
    if (options.on_level) options.on_level(ev);
  }
  if (reweights) *reweights = count;
  return s;
}

namespace {

RoundRecord round_from(const EggSearch& s, double target, const WeightVector& in, std::size_t reweights) {
  auto res = s.result();
  RoundRecord r;
  r.target = target;
  r.weights_in = in.values();
  r.weights_out = s.weights().values();
  r.status = res.status;
  r.search_eta = res.eta_max;
  r.eta = res.eta_max;
  r.alpha = res.alpha;
  r.radius = res.radius;
  r.egg_size = res.egg_size;
  r.reweights = reweights;
  r.per_level_sizes = res.per_level_sizes;
  r.checkpoint = s.checkpoint();
  return r;
}

}  // namespace

StrategyRun run_opt(const Problem& p, const WeightVector& start, const std::vector<double>& targets,
                    const StrategyOptions& options) {
  StrategyRun run;
  run.kind = StrategyKind::opt;
  WeightVector pi = feasible_start(start, p.aux);
  for (double target : targets) {
    StrategyOptions o = options;
    o.search.target = target;
    std::size_t reweights = 0;
    auto s = search_with_updates(p, pi, o, &reweights);
    auto round = round_from(s, target, pi, reweights);
    if (round.status != SearchStatus::found) {
      run.rounds.push_back(std::move(round));
      break;
    }
    std::vector<WordStats> rows;
    for (const auto& e : s.shell()) rows.push_back(e.stats);
    MinimaxProblem mp(rows, WeightConstraints::from_aux(p.aux, pi.epsilon()));
    auto r = optimize(mp, options.opt, s.weights().values());
    // the egg stays an egg for any triangular weights, so its eta under r.weights is a bound
    round.weights_out = r.weights;
    round.eta = r.eta;
    round.alpha = alpha_of(r.eta, p.gens.degree());
    pi = WeightVector(r.weights, pi.epsilon());
    run.rounds.push_back(std::move(round));
  }
  return run;
}

StrategyRun run_ovi(const Problem& p, const WeightVector& start, double target, const StrategyOptions& options) {
  StrategyRun run;
  run.kind = options.update > 0 ? StrategyKind::ovi : StrategyKind::rec;
  StrategyOptions o = options;
  o.search.target = target;
  std::size_t reweights = 0;
  const auto pi = feasible_start(start, p.aux);
  auto s = search_with_updates(p, pi, o, &reweights);
  run.rounds.push_back(round_from(s, target, pi, reweights));
  return run;
}

Selector Selector::from_json(const json& j) {
  if (j.is_null()) return {};
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw CommandError(CommandError::Code::invalid, "selector needs a kind");
  Selector s;
  const auto kind = j.at("kind").get<std::string>();
  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw CommandError(CommandError::Code::invalid, std::string("selector ") + key + " must be a number");
    return j.at(key).get<double>();
  };
  if (kind == "all") {
    s.kind = Kind::all;
  } else if (kind == "shell") {
    s.kind = Kind::shell;
  } else if (kind == "yolk") {
    s.kind = Kind::yolk;
  } else if (kind == "eta" || kind == "level") {
    s.kind = kind == "eta" ? Kind::eta : Kind::level;
    s.lo = number("min", 0.0);
    s.hi = number("max", HUGE_VAL);
    if (s.lo > s.hi) throw CommandError(CommandError::Code::invalid, "selector range is empty");
  } else if (kind == "regex") {
    s.kind = Kind::regex;
    if (!j.contains("pattern") || !j.at("pattern").is_string())
      throw CommandError(CommandError::Code::invalid, "regex selector needs a pattern");
    s.pattern = j.at("pattern").get<std::string>();
    try {
      std::regex check(s.pattern);
    } catch (const std::regex_error& e) {
      throw CommandError(CommandError::Code::invalid, std::string("bad pattern: ") + e.what());
    }
  } else {
    throw CommandError(CommandError::Code::invalid, "unknown selector kind " + kind);
  }
  return s;
}

json Selector::to_json() const {
  switch (kind) {
    case Kind::all: return {{"kind", "all"}};
    case Kind::shell: return {{"kind", "shell"}};
    case Kind::yolk: return {{"kind", "yolk"}};
    case Kind::eta: return {{"kind", "eta"}, {"min", lo}, {"max", hi}};
    case Kind::level: return {{"kind", "level"}, {"min", lo}, {"max", hi}};
    case Kind::regex: return {{"kind", "regex"}, {"pattern", pattern}};
  }
  return {};
}

namespace {

/// Word-level predicate for the range and pattern kinds.
std::function<bool(const Word&, double)> word_predicate(const Selector& sel, const GeneratorTable& gens) {
  using K = Selector::Kind;
  switch (sel.kind) {
    case K::eta: return [lo = sel.lo, hi = sel.hi](const Word&, double e) { return e >= lo && e <= hi; };
    case K::level:
      return [lo = sel.lo, hi = sel.hi](const Word& w, double) {
        const double n = static_cast<double>(w.size());
        return n >= lo && n <= hi;
      };
    case K::regex: {
      auto re = std::make_shared<std::regex>(sel.pattern);
      return [re, &gens](const Word& w, double) { return std::regex_search(gens.format_word(w), *re); };
    }
    default: return [](const Word&, double) { return true; };
  }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json eta_histogram(const EggSearch& s) {
  std::vector<std::uint64_t> counts(kHistogramBins, 0);
  std::uint64_t overflow = 0;
  const double width = kHistogramMax / static_cast<double>(kHistogramBins);
  for (const auto& f : s.yolk()) {
    const double e = s.eta(f.stats);
    if (e >= kHistogramMax) {
      ++overflow;
      continue;
    }
    const auto bin = std::min<std::size_t>(kHistogramBins - 1, static_cast<std::size_t>(e / width));
    ++counts[bin];
  }
  return {{"min", 0.0}, {"max", kHistogramMax}, {"bins", kHistogramBins}, {"counts", counts}, {"overflow", overflow}};
}

Session::Session(std::shared_ptr<const Problem> problem, WeightVector start, SearchConfig config)
    : problem_(std::move(problem)) {
  table_ = std::make_shared<ElementTable>(problem_->gens, &problem_->aux, config.caps);
  search_ = std::make_unique<EggSearch>(problem_->gens, problem_->aux, std::move(start), config, table_);
}

void Session::record() {
  json entry = {{"yolk", search_->yolk().size()},
                {"shell", search_->shell().size()},
                {"radius", search_->radius()},
                {"eta_max", search_->eta_max()}};
  history_.push_back(std::move(entry));
}

json Session::apply(const json& cmd) {
  if (!cmd.is_object() || !cmd.contains("op") || !cmd.at("op").is_string())
    throw CommandError(CommandError::Code::invalid, "command needs an op");
  if (stopped_) throw CommandError(CommandError::Code::stopped, "session is stopped");
  const auto op = cmd.at("op").get<std::string>();
  if (op == "expand") {
    expand(cmd);
  } else if (op == "optimize") {
    optimize(cmd);
  } else if (op == "set_target") {
    if (!cmd.contains("target") || !cmd.at("target").is_number() || !(cmd.at("target").get<double>() > 0.0))
      throw CommandError(CommandError::Code::invalid, "set_target needs a positive target");
    search_->set_target(cmd.at("target").get<double>());
    record();
    history_.back()["op"] = "set_target";
  } else if (op == "checkpoint") {
    record();
    history_.back()["op"] = "checkpoint";
    history_.back()["id"] = checkpoints_.size() + 1;
    checkpoints_.push_back(Saved{search_->checkpoint(), history_});
  } else if (op == "rollback") {
    if (!cmd.contains("id") || !cmd.at("id").is_number_integer())
      throw CommandError(CommandError::Code::invalid, "rollback needs an integer id");
    const auto id = cmd.at("id").get<long long>();
    if (id < 1 || static_cast<std::size_t>(id) > checkpoints_.size())
      throw CommandError(CommandError::Code::invalid, "no checkpoint " + std::to_string(id));
    const Saved& saved = checkpoints_[static_cast<std::size_t>(id) - 1];
    auto restored = EggSearch::restore(problem_->gens, problem_->aux, saved.search, table_);
    search_ = std::make_unique<EggSearch>(std::move(restored));
    history_ = saved.history;
    checkpoints_.resize(static_cast<std::size_t>(id));
    last_event_.reset();
  } else if (op == "stop") {
    stopped_ = true;
    record();
    history_.back()["op"] = "stop";
  } else {
    throw CommandError(CommandError::Code::invalid, "unknown op " + op);
  }
  return snapshot();
}

void Session::expand(const json& cmd) {
  const auto sel = Selector::from_json(cmd.value("filter", json(nullptr)));
  if (sel.kind == Selector::Kind::shell) throw CommandError(CommandError::Code::invalid, "expand works on the yolk");
  if (search_->status() == SearchStatus::aborted) throw CommandError(CommandError::Code::invalid, "search was aborted");
  EggSearch::Filter filter;
  if (sel.kind != Selector::Kind::all && sel.kind != Selector::Kind::yolk) {
    auto pred = word_predicate(sel, problem_->gens);
    filter = [pred](const FrontierWord& f, double e) { return pred(f.word, e); };
  }
  last_event_ = search_->step(filter);
  record();
  history_.back()["op"] = "expand";
  history_.back()["processed"] = last_event_->processed;
  history_.back()["accepted"] = last_event_->accepted;
}

void Session::optimize(const json& cmd) {
  const auto sel = Selector::from_json(cmd.value("subset", json(nullptr)));
  auto pred = word_predicate(sel, problem_->gens);
  std::vector<WordStats> rows;
  if (sel.kind != Selector::Kind::yolk)
    for (const auto& e : search_->shell())
      if (pred(e.word, search_->eta(e.stats))) rows.push_back(e.stats);
  if (sel.kind != Selector::Kind::shell)
    for (const auto& f : search_->yolk())
      if (pred(f.word, search_->eta(f.stats))) rows.push_back(f.stats);
  if (rows.empty()) throw CommandError(CommandError::Code::invalid, "subset selects no words");

  OptOptions o;
  auto count = [&](const char* key, unsigned fallback) {
    if (!cmd.contains(key)) return fallback;
    const auto& v = cmd.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 1000000) throw CommandError(CommandError::Code::invalid, std::string(key) + " must be a non-negative integer");
    return cmd.at(key).get<unsigned>();
  };
  o.restarts = count("restarts", o.restarts);
  o.iterations = count("iterations", o.iterations);
  o.seed = count("seed", static_cast<unsigned>(o.seed));

  const double eps = search_->weights().epsilon();
  MinimaxProblem mp(rows, WeightConstraints::from_aux(problem_->aux, eps));
  const double before = mp.objective(search_->weights().values()).value;
  auto r = autgrowth::optimize(mp, o, search_->weights().values());
  search_->set_weights(WeightVector(r.weights, eps));
  record();
  auto& h = history_.back();
  h["op"] = "optimize";
  h["rows"] = rows.size();
  h["subset_eta_before"] = before;
  h["subset_eta_after"] = r.eta;
}

json Session::snapshot() const {
  const auto& s = *search_;
  const double eta_max = s.eta_max();
  const bool certified = s.status() == SearchStatus::found;
  std::optional<double> alpha;
  if (!s.shell().empty()) alpha = alpha_of(eta_max, problem_->gens.degree());
  return {
      {"machine", problem_->machine_ref},
      {"aux", problem_->blocks},
      {"generators", problem_->gens.names()},
      {"degree", problem_->gens.degree()},
      {"status", stopped_ ? std::string("stopped") : to_string(s.status())},
      {"search_status", to_string(s.status())},
      {"target", s.config().target},
      {"weights", s.weights().values()},
      {"radius", s.radius()},
      {"next_level", s.next_level()},
      {"shell_size", s.shell().size()},
      {"yolk_size", s.yolk().size()},
      {"eta_max", eta_max},
      {"alpha", optional_number(alpha)},
      {"certified", certified},
      {"histogram", eta_histogram(s)},
      {"per_level_sizes", s.result().per_level_sizes},
      {"per_level_shell", s.result().per_level_shell},
      {"checkpoints", checkpoints_.size()},
      {"history", history_},
  };
}

}  // namespace autgrowth
