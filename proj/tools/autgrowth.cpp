// Command-line front end. Exit codes: 0 found or pass, 2 radius-exceeded or
// inconclusive, 1 error.
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "autgrowth/formats.hpp"
#include "autgrowth/growth.hpp"
#include "autgrowth/run_result.hpp"
#include "autgrowth/service.hpp"
#include "autgrowth/strategies.hpp"
#include "autgrowth/superpoly.hpp"

using namespace autgrowth;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kOpen = 2;

struct Common {
  std::string machine;
  std::string blocks;
  std::string weights = "uniform";
  std::size_t radius_cap = 256;
  unsigned workers = 1;
  bool global_dedup = false;
  bool json_out = false;
};

/// Weights as given on the command line, plus a note when they had to be rescaled.
WeightVector parse_weights(const std::string& text, std::size_t n, std::string& note) {
  if (text == "uniform") return WeightVector::uniform(n);
  std::vector<double> raw;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      raw.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("bad weight '" + item + "'");
    }
  }
  if (raw.size() != n) throw Error("expected " + std::to_string(n) + " weights, got " + std::to_string(raw.size()));
  double sum = 0;
  for (double v : raw) {
    if (!(v >= 0.0)) throw Error("weights must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) note = "weights normalized to sum 1";
  return WeightVector::normalized(raw);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

SearchConfig config_of(const Common& c, double target) {
  SearchConfig cfg;
  cfg.target = target;
  cfg.radius_cap = c.radius_cap;
  cfg.workers = c.workers;
  cfg.global_dedup = c.global_dedup;
  return cfg;
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

/// Bounds are printed rounded up so the printed value is still a bound.
std::string fmt_bound(double v) { return fmt(round_up4(v)); }

std::string fmt_weights(const std::vector<double>& w) {
  std::string s = "[";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + fmt(w[i]);
  return s + "]";
}

void add_common(CLI::App* cmd, Common& c, bool with_weights = true) {
  cmd->add_option("machine", c.machine, "builtin name or automaton file")->required();
  cmd->add_option("--aux-blocks,--blocks", c.blocks, "block partition like a|b,c,d, or free");
  if (with_weights) cmd->add_option("--weights", c.weights, "comma separated weights or uniform");
  cmd->add_option("--radius-cap", c.radius_cap, "longest word length to explore");
  cmd->add_option("--workers", c.workers, "search threads");
  cmd->add_flag("--global-dedup", c.global_dedup, "deduplicate against every earlier level");
  cmd->add_flag("--json", c.json_out, "print the run-result record");
}

int status_code(SearchStatus s) { return s == SearchStatus::found ? kOk : kOpen; }

json round_json(const RoundRecord& r, const Common& c, const Problem& p, std::optional<std::uint64_t> seed) {
  auto s = EggSearch::restore(p.gens, p.aux, r.checkpoint);
  auto j = run_result_json(s.result(), RunMeta{c.machine, p.blocks, std::nullopt, seed});
  j["weights"] = r.weights_out;
  j["eta"] = r.eta;
  j["alpha"] = r.alpha ? json(*r.alpha) : json(nullptr);
  j["search_eta"] = r.search_eta;
  j["search_weights"] = r.weights_in;
  return j;
}

int run_target(const Common& c, double target, const std::string& count_file) {
  auto p = load_problem(c.machine, c.blocks);
  std::string note;
  auto pi = parse_weights(c.weights, p->gens.size(), note);
  require_search_weights(pi, p->aux);
  auto r = search_egg(p->gens, p->aux, pi, config_of(c, target));
  RunMeta meta{c.machine, p->blocks, std::nullopt, std::nullopt};
  if (!count_file.empty()) {
    std::ofstream(count_file) << count_matrix_json(r, p->gens).dump() << '\n';
    meta.count_matrix_ref = count_file;
  }
  if (c.json_out) {
    auto j = run_result_json(r, meta);
    if (!note.empty()) j["note"] = note;
    std::cout << j.dump(2) << '\n';
  } else {
    if (!note.empty()) std::cout << "note: " << note << '\n';
    std::cout << "status " << to_string(r.status) << "\nradius " << r.radius << "\negg size " << r.egg_size
              << "\neta " << fmt_bound(r.eta_max) << '\n';
    if (r.alpha) std::cout << "alpha " << fmt_bound(*r.alpha) << '\n';
  }
  return status_code(r.status);
}

int report_run(const StrategyRun& run, const Common& c, const Problem& p, std::optional<std::uint64_t> seed,
               const std::string& note) {
  if (run.rounds.empty()) {
    if (c.json_out)
      std::cout << json{{"strategy", run.to_json()}}.dump(2) << '\n';
    else
      std::cout << "no rounds\n";
    return kOk;
  }
  const auto& last = run.rounds.back();
  if (c.json_out) {
    const auto* best = run.best();
    auto j = round_json(best ? *best : last, c, p, seed);
    j["strategy"] = run.to_json();
    if (!note.empty()) j["note"] = note;
    std::cout << j.dump(2) << '\n';
  } else {
    if (!note.empty()) std::cout << "note: " << note << '\n';
    for (std::size_t i = 0; i < run.rounds.size(); ++i) {
      const auto& r = run.rounds[i];
      std::cout << "round " << i + 1 << " target " << fmt(r.target) << " " << to_string(r.status) << " radius "
                << r.radius << " egg " << r.egg_size << " eta " << fmt_bound(r.eta);
      if (r.alpha) std::cout << " alpha " << fmt_bound(*r.alpha);
      std::cout << " weights " << fmt_weights(r.weights_out) << '\n';
    }
  }
  return status_code(last.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Upper bounds on the growth of automaton groups"};
  app.require_subcommand(1);

  std::string validate_target, validate_blocks;
  auto* validate_cmd = app.add_subcommand("validate", "check a machine and its block partition");
  validate_cmd->add_option("machine", validate_target, "builtin name or automaton file")->required();
  validate_cmd->add_option("--blocks", validate_blocks, "block partition to verify");

  Common target_opts;
  double target = 0.99;
  std::string count_file;
  auto* target_cmd = app.add_subcommand("target", "search an egg for a target contraction");
  add_common(target_cmd, target_opts);
  target_cmd->add_option("--target", target, "eta target");
  target_cmd->add_option("--count-matrix", count_file, "write the count matrix to this file");

  Common opt_opts;
  std::string targets_text = "0.9";
  std::size_t opt_update = 0;
  std::uint64_t opt_seed = 1;
  unsigned restarts = 16;
  auto* opt_cmd = app.add_subcommand("opt", "search then optimize the weights, once per target");
  add_common(opt_cmd, opt_opts);
  opt_cmd->add_option("--targets", targets_text, "comma separated targets");
  opt_cmd->add_option("--update", opt_update, "also reweight before levels divisible by this (0 never)");
  opt_cmd->add_option("--opt-seed", opt_seed, "optimizer seed");
  opt_cmd->add_option("--restarts", restarts, "optimizer restarts");

  Common ovi_opts;
  double ovi_target = 0.9;
  std::size_t ovi_update = 4;
  std::uint64_t ovi_seed = 1;
  auto* ovi_cmd = app.add_subcommand("ovi", "search while reweighting every few levels");
  add_common(ovi_cmd, ovi_opts);
  ovi_cmd->add_option("--target", ovi_target, "eta target");
  ovi_cmd->add_option("--update", ovi_update, "reweight before levels divisible by this");
  ovi_cmd->add_option("--opt-seed", ovi_seed, "optimizer seed");

  std::string growth_machine;
  std::size_t maxlen = 8;
  bool growth_csv = false, growth_one_sided = false;
  auto* growth_cmd = app.add_subcommand("growth", "exact ball sizes for uniform weights");
  growth_cmd->add_option("machine", growth_machine)->required();
  growth_cmd->add_option("--maxlen", maxlen, "largest length");
  growth_cmd->add_flag("--csv", growth_csv, "CSV instead of JSON");
  growth_cmd->add_flag("--one-sided", growth_one_sided, "do not add inverses");

  std::string sp_machine, sp_blocks;
  std::size_t sp_maxlen = 6;
  double sp_eta = -1;
  auto* sp_cmd = app.add_subcommand("superpoly", "bounded checks of the super-polynomial growth criterion");
  sp_cmd->add_option("machine", sp_machine)->required();
  sp_cmd->add_option("--blocks", sp_blocks, "block partition (default: the builtin one)");
  sp_cmd->add_option("--maxlen", sp_maxlen, "longest word to scan");
  sp_cmd->add_option("--eta", sp_eta, "eta of a known egg, to state intermediate growth");

  std::string dot_machine;
  bool dot_dual = false;
  auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz text of the diagram, or of the Schreier graph with --dual");
  dot_cmd->add_option("machine", dot_machine)->required();
  dot_cmd->add_flag("--dual", dot_dual, "Schreier graph on the first level");

  int port = 8421;
  std::string host = "127.0.0.1";
  std::string workdir;
  if (const char* env = std::getenv("AUTGROWTH_WORKDIR")) workdir = env;
  auto* serve_cmd = app.add_subcommand("serve", "local HTTP session service");
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--workdir", workdir, "journal directory (default $AUTGROWTH_WORKDIR)");

  double bound_eta = 0;
  std::size_t bound_d = 2;
  auto* bound_cmd = app.add_subcommand("bound", "growth exponent bound from eta and the alphabet size");
  bound_cmd->add_option("--eta", bound_eta)->required();
  bound_cmd->add_option("--d", bound_d)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*validate_cmd) {
      auto m = load_machine(validate_target);
      auto report = validate(m);
      if (!report.ok()) {
        std::cout << report.summary() << '\n';
        return kError;
      }
      std::string blocks = validate_blocks;
      if (blocks.empty())
        for (const auto& e : builtin_catalog())
          if (e.name == validate_target) blocks = e.blocks;
      GeneratorTable g(m);
      std::cout << "valid: " << m.states.size() << " states, " << m.letters.size() << " letters\n";
      if (!blocks.empty() && blocks != "free") {
        auto aux = make_aux(g, blocks);
        auto f = verify_factors(aux, g);
        if (!f.ok()) {
          std::cout << f.summary(g) << '\n';
          return kError;
        }
        std::cout << "blocks " << blocks << " verified\n";
      }
      return kOk;
    }
    if (*target_cmd) return run_target(target_opts, target, count_file);
    if (*opt_cmd) {
      auto p = load_problem(opt_opts.machine, opt_opts.blocks);
      std::string note;
      auto pi = parse_weights(opt_opts.weights, p->gens.size(), note);
      StrategyOptions so;
      so.search = config_of(opt_opts, 0.99);
      so.update = opt_update;
      so.opt.seed = opt_seed;
      so.opt.restarts = restarts;
      auto run = run_opt(*p, pi, parse_list(targets_text), so);
      return report_run(run, opt_opts, *p, opt_seed, note);
    }
    if (*ovi_cmd) {
      auto p = load_problem(ovi_opts.machine, ovi_opts.blocks);
      std::string note;
      auto pi = parse_weights(ovi_opts.weights, p->gens.size(), note);
      StrategyOptions so;
      so.search = config_of(ovi_opts, ovi_target);
      so.update = ovi_update;
      so.opt.seed = ovi_seed;
      auto run = run_ovi(*p, pi, ovi_target, so);
      return report_run(run, ovi_opts, *p, ovi_seed, note);
    }
    if (*growth_cmd) {
      GrowthOptions go;
      go.symmetric = !growth_one_sided;
      auto g = growth(load_machine(growth_machine), maxlen, go);
      std::cout << (growth_csv ? to_csv(g) : to_json(g).dump() + "\n");
      return g.truncated ? kOpen : kOk;
    }
    if (*sp_cmd) {
      auto p = load_problem(sp_machine, sp_blocks);
      auto v = superpoly_verdict(p->gens, p->blocks, sp_maxlen, sp_eta >= 0 ? std::optional<double>(sp_eta) : std::nullopt);
      std::cout << to_json(v, p->gens).dump(2) << '\n';
      if (v.partition.outcome == CheckOutcome::fail || v.contraction.outcome == CheckOutcome::counterexample)
        return kError;
      return v.superpolynomial ? kOk : kOpen;
    }
    if (*dot_cmd) {
      auto m = load_machine(dot_machine);
      std::cout << (dot_dual ? export_schreier_dot(m) : export_diagram_dot(m));
      return kOk;
    }
    if (*serve_cmd) {
      HttpService service(workdir.empty() ? std::nullopt : std::optional<std::filesystem::path>(workdir));
      std::cerr << "listening on " << host << ":" << port << '\n';
      return service.run(host, port) ? kOk : kError;
    }
    if (*bound_cmd) {
      std::cout << "alpha " << fmt_bound(alpha_from(bound_eta, bound_d)) << '\n';
      return kOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: line " << e.line() << ", column " << e.column() << ": " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
