#include "autgrowth/egg_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace autgrowth {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

void add_counts(const Word& w, std::vector<std::uint32_t>& counts) {
  for (Gen s : w) ++counts[s];
}

}  // namespace

std::size_t KeyHasher::operator()(const std::vector<std::uint32_t>& k) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ k.size();
  for (auto v : k) {
    h ^= v;
    h *= 0x100000001b3ULL;
    h ^= h >> 32;
  }
  return static_cast<std::size_t>(h);
}

double eta_from_stats(const WordStats& stats, const WeightVector& pi) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t s = 0; s < stats.letters.size(); ++s) {
    num += stats.sections[s] * pi[static_cast<Gen>(s)];
    den += stats.letters[s] * pi[static_cast<Gen>(s)];
  }
  if (den <= 0.0) throw Error("contraction ratio of the empty word");
  return num / den;
}

WordStats word_stats(const Word& w, const GeneratorTable& gens, const AuxiliaryGroup& aux, ElementTable* table) {
  const std::size_t n = gens.size();
  WordStats st{std::vector<std::uint32_t>(n, 0), std::vector<std::uint32_t>(n, 0)};
  add_counts(w, st.letters);
  auto img = wreath(w, gens);
  for (auto& sec : img.sections) {
    Word r = reduce(sec, aux);
    if (r.empty()) continue;
    bool trivial;
    if (table) {
      auto id = table->canonical_id_reduced(r);
      trivial = id && *id == kIdentityElement;
    } else {
      trivial = is_identity(r, gens, &aux);
    }
    if (!trivial) add_counts(r, st.sections);
  }
  return st;
}

double eta_of(const Word& w, const WeightVector& pi, const GeneratorTable& gens, const AuxiliaryGroup& aux,
              ElementTable* table) {
  if (w.empty()) throw Error("contraction ratio of the empty word");
  return eta_from_stats(word_stats(w, gens, aux, table), pi);
}

double alpha_from(double eta, std::size_t d) {
  if (!(eta > 0.0) || eta > 1.0) throw Error("eta must lie in (0, 1]");
  if (d < 2) throw Error("alphabet must have at least two letters");
  const double ld = std::log(static_cast<double>(d));
  return ld / (ld - std::log(eta));
}

double round_up4(double x) { return std::ceil(x * 1e4 - 1e-9) / 1e4; }

std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::running: return "running";
    case SearchStatus::found: return "found";
    case SearchStatus::radius_exceeded: return "radius-exceeded";
    case SearchStatus::aborted: return "aborted";
  }
  return "unknown";
}

SearchStatus search_status_from_string(const std::string& s) {
  for (auto st : {SearchStatus::running, SearchStatus::found, SearchStatus::radius_exceeded, SearchStatus::aborted})
    if (to_string(st) == s) return st;
  throw Error("unknown search status '" + s + "'");
}

void require_search_weights(const WeightVector& pi, const AuxiliaryGroup& aux) {
  if (pi.size() != aux.generator_count())
    throw Error("expected " + std::to_string(aux.generator_count()) + " weights, got " + std::to_string(pi.size()));
  if (min_triangular_slack(pi, aux) < -1e-12) throw Error("weights violate the triangular inequalities");
}

EggSearch::EggSearch(const GeneratorTable& gens, const AuxiliaryGroup& aux, WeightVector pi, SearchConfig config,
                     std::shared_ptr<ElementTable> table)
    : gens_(&gens), aux_(&aux), pi_(std::move(pi)), config_(config), table_(std::move(table)) {
  require_search_weights(pi_, aux);
  if (!(config_.target > 0.0)) throw Error("target must be positive");
  if (config_.workers == 0) config_.workers = 1;
  if (!table_) table_ = std::make_shared<ElementTable>(gens, &aux, config_.caps);
  std::unordered_set<std::vector<std::uint32_t>, KeyHasher> local;
  for (Gen s = 0; s < gens.size(); ++s) {
    FrontierWord f;
    f.word = {s};
    f.perm = Perm(gens.perm(s).begin(), gens.perm(s).end());
    f.sections.resize(gens.degree());
    for (std::size_t x = 0; x < gens.degree(); ++x)
      if (gens.section(s, static_cast<Letter>(x)) != kNoGen) f.sections[x] = {gens.section(s, static_cast<Letter>(x))};
    auto key = fill_counts(f);
    if (!key.empty()) {
      if (!local.insert(key).second) {
        ++stats_.merged;
        continue;
      }
      if (config_.global_dedup) seen_.insert(key);
    }
    yolk_.push_back(std::move(f));
  }
  refresh_status();
}

std::vector<std::uint32_t> EggSearch::fill_counts(FrontierWord& f) const {
  const std::size_t n = gens_->size();
  f.stats.letters.assign(n, 0);
  f.stats.sections.assign(n, 0);
  add_counts(f.word, f.stats.letters);
  std::vector<std::uint32_t> key(f.perm.begin(), f.perm.end());
  bool known = true;
  for (const auto& sec : f.sections) {
    auto id = sec.empty() ? std::optional<ElementId>(kIdentityElement) : table_->canonical_id_reduced(sec);
    if (!id) {
      known = false;
      add_counts(sec, f.stats.sections);
      continue;
    }
    if (*id != kIdentityElement) add_counts(sec, f.stats.sections);
    key.push_back(*id);
  }
  if (!known) key.clear();
  return key;
}

FrontierWord EggSearch::make_frontier(const Word& w) const {
  FrontierWord f;
  f.word = w;
  auto img = wreath(w, *gens_);
  f.perm = std::move(img.perm);
  f.sections.reserve(img.sections.size());
  for (auto& sec : img.sections) f.sections.push_back(reduce(sec, *aux_));
  fill_counts(f);
  return f;
}

void EggSearch::extend(const FrontierWord& w, std::vector<Candidate>& out) const {
  const Gen last = w.word.back();
  const std::size_t d = gens_->degree();
  for (Gen s = 0; s < gens_->size(); ++s) {
    if (!aux_->joins_reduced(last, s)) continue;
    Candidate c;
    c.word.word = w.word;
    c.word.word.push_back(s);
    c.word.perm.resize(d);
    c.word.sections = w.sections;
    for (std::size_t x = 0; x < d; ++x) {
      const Letter y = w.perm[x];
      c.word.perm[x] = gens_->act(s, y);
      const Gen t = gens_->section(s, y);
      if (t != kNoGen) aux_->push_reduced(c.word.sections[x], t);
    }
    c.key = fill_counts(c.word);
    out.push_back(std::move(c));
  }
}

std::size_t EggSearch::next_level() const {
  if (yolk_.empty()) return 0;
  return yolk_.front().word.size();
}

double EggSearch::eta_max() const {
  double m = 0.0;
  for (const auto& e : shell_) m = std::max(m, eta(e.stats));
  return m;
}

void EggSearch::sort_yolk() {
  std::sort(yolk_.begin(), yolk_.end(),
            [](const FrontierWord& a, const FrontierWord& b) { return shortlex_less(a.word, b.word); });
}

void EggSearch::refresh_status() {
  if (status_ == SearchStatus::aborted) return;
  if (yolk_.empty())
    status_ = SearchStatus::found;
  else if (next_level() > config_.radius_cap)
    status_ = SearchStatus::radius_exceeded;
  else if (yolk_.size() > config_.max_frontier)
    status_ = SearchStatus::aborted;
  else
    status_ = SearchStatus::running;
}

LevelEvent EggSearch::step(const Filter& filter) {
  const auto t0 = Clock::now();
  if (status_ == SearchStatus::aborted) throw Error("search was aborted");
  LevelEvent ev;
  if (yolk_.empty()) {
    ev.shell = shell_.size();
    ev.eta_max = eta_max();
    return ev;
  }
  const std::size_t level = next_level();
  ev.level = level;

  std::vector<FrontierWord> keep;
  std::vector<const FrontierWord*> to_extend;
  for (auto& f : yolk_) {
    const double e = eta(f.stats);
    if (f.word.size() != level || (filter && !filter(f, e))) {
      keep.push_back(std::move(f));
      continue;
    }
    ++ev.processed;
    if (e <= config_.target) {
      shell_.push_back(EggWord{std::move(f.word), std::move(f.stats), level});
      ++ev.accepted;
    } else {
      to_extend.push_back(&f);
    }
  }

  // candidates per extended word, generated in parallel and merged in order
  std::vector<std::vector<Candidate>> parts(to_extend.size());
  const unsigned workers = std::min<std::size_t>(config_.workers, std::max<std::size_t>(1, to_extend.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < to_extend.size(); ++i) extend(*to_extend[i], parts[i]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < to_extend.size(); i += workers) extend(*to_extend[i], parts[i]);
      });
    for (auto& th : pool) th.join();
  }

  std::unordered_set<std::vector<std::uint32_t>, KeyHasher> local;
  auto& seen = config_.global_dedup ? seen_ : local;
  std::vector<FrontierWord> fresh;
  for (auto& part : parts) {
    for (auto& c : part) {
      ++stats_.candidates;
      if (c.key.empty()) {
        ++stats_.unknown_ids;
      } else if (!seen.insert(std::move(c.key)).second) {
        ++stats_.merged;
        continue;
      }
      fresh.push_back(std::move(c.word));
    }
    part.clear();
  }
  to_extend.clear();

  yolk_ = std::move(keep);
  const bool sorted_tail = yolk_.empty() || fresh.empty() || !shortlex_less(fresh.front().word, yolk_.back().word);
  yolk_.insert(yolk_.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
  if (!sorted_tail) sort_yolk();

  radius_ = std::max(radius_, level);
  per_level_sizes_.push_back(yolk_.size());
  per_level_shell_.push_back(shell_.size());
  refresh_status();

  ev.yolk = yolk_.size();
  ev.shell = shell_.size();
  ev.eta_max = eta_max();
  ev.seconds = seconds_since(t0);
  stats_.seconds += ev.seconds;
  return ev;
}

SearchResult EggSearch::run(const std::function<void(const LevelEvent&)>& on_level) {
  while (status_ == SearchStatus::running) {
    auto ev = step();
    if (on_level) on_level(ev);
  }
  return result();
}

void EggSearch::set_weights(WeightVector pi) {
  require_search_weights(pi, *aux_);
  pi_ = std::move(pi);
  set_target(config_.target);
}

void EggSearch::set_target(double target) {
  if (!(target > 0.0)) throw Error("target must be positive");
  config_.target = target;
  std::vector<EggWord> kept;
  bool moved = false;
  for (auto& e : shell_) {
    if (eta(e.stats) <= target) {
      kept.push_back(std::move(e));
    } else {
      yolk_.push_back(make_frontier(e.word));
      moved = true;
    }
  }
  shell_ = std::move(kept);
  if (moved) sort_yolk();
  refresh_status();
}

void EggSearch::abort() { status_ = SearchStatus::aborted; }

SearchResult EggSearch::result() const {
  SearchResult r;
  r.status = status_;
  r.egg = shell_;
  std::sort(r.egg.begin(), r.egg.end(), [](const EggWord& a, const EggWord& b) { return shortlex_less(a.word, b.word); });
  r.weights = pi_;
  r.target = config_.target;
  r.eta_max = eta_max();
  if (status_ == SearchStatus::found && r.eta_max < 1.0)
    r.alpha = r.eta_max > 0.0 ? alpha_from(r.eta_max, gens_->degree()) : 0.0;
  r.radius = radius_;
  r.egg_size = shell_.size();
  r.per_level_sizes = per_level_sizes_;
  r.per_level_shell = per_level_shell_;
  r.stats = stats_;
  return r;
}

nlohmann::json EggSearch::checkpoint() const {
  using nlohmann::json;
  json shell = json::array();
  for (const auto& e : shell_) shell.push_back({{"w", e.word}, {"level", e.level}});
  json yolk = json::array();
  for (const auto& f : yolk_) yolk.push_back(f.word);
  return {
      {"weights", pi_.values()},
      {"epsilon", pi_.epsilon()},
      {"target", config_.target},
      {"radius_cap", config_.radius_cap},
      {"global_dedup", config_.global_dedup},
      {"max_frontier", config_.max_frontier},
      {"radius", radius_},
      {"status", to_string(status_)},
      {"shell", shell},
      {"yolk", yolk},
      {"per_level_sizes", per_level_sizes_},
      {"per_level_shell", per_level_shell_},
      {"stats",
       {{"candidates", stats_.candidates},
        {"merged", stats_.merged},
        {"unknown_ids", stats_.unknown_ids},
        {"seconds", stats_.seconds}}},
  };
}

EggSearch EggSearch::restore(const GeneratorTable& gens, const AuxiliaryGroup& aux, const nlohmann::json& state,
                             std::shared_ptr<ElementTable> table) {
  SearchConfig config;
  config.target = state.at("target").get<double>();
  config.radius_cap = state.at("radius_cap").get<std::size_t>();
  config.global_dedup = state.at("global_dedup").get<bool>();
  config.max_frontier = state.at("max_frontier").get<std::size_t>();
  WeightVector pi(state.at("weights").get<std::vector<double>>(), state.at("epsilon").get<double>());
  EggSearch s(gens, aux, pi, config, std::move(table));
  s.yolk_.clear();
  s.seen_.clear();
  for (const auto& e : state.at("shell")) {
    auto f = s.make_frontier(e.at("w").get<Word>());
    s.shell_.push_back(EggWord{std::move(f.word), std::move(f.stats), e.at("level").get<std::size_t>()});
  }
  for (const auto& w : state.at("yolk")) s.yolk_.push_back(s.make_frontier(w.get<Word>()));
  if (config.global_dedup)
    for (auto& f : s.yolk_) {
      FrontierWord copy = f;
      auto key = s.fill_counts(copy);
      if (!key.empty()) s.seen_.insert(std::move(key));
    }
  s.radius_ = state.at("radius").get<std::size_t>();
  s.status_ = search_status_from_string(state.at("status").get<std::string>());
  s.per_level_sizes_ = state.at("per_level_sizes").get<std::vector<std::size_t>>();
  s.per_level_shell_ = state.at("per_level_shell").get<std::vector<std::size_t>>();
  const auto& st = state.at("stats");
  s.stats_.candidates = st.at("candidates").get<std::uint64_t>();
  s.stats_.merged = st.at("merged").get<std::uint64_t>();
  s.stats_.unknown_ids = st.at("unknown_ids").get<std::uint64_t>();
  s.stats_.seconds = st.at("seconds").get<double>();
  return s;
}

SearchResult search_egg(const GeneratorTable& gens, const AuxiliaryGroup& aux, const WeightVector& pi,
                        const SearchConfig& config, const std::function<void(const LevelEvent&)>& on_level) {
  EggSearch s(gens, aux, pi, config);
  return s.run(on_level);
}

}  // namespace autgrowth
