#include "autgrowth/service.hpp"

#include <chrono>
#include <fstream>

#include <httplib.h>

#include "autgrowth/formats.hpp"

namespace autgrowth {

using nlohmann::json;
namespace fs = std::filesystem;

struct SessionManager::Entry {
  std::string id;
  json open;
  std::shared_ptr<Problem> problem;
  std::unique_ptr<Session> session;
  // held for the whole command, try_lock gives 409 on contention
  std::mutex busy;
  // guards snapshot and events
  mutable std::mutex state;
  mutable std::condition_variable changed;
  std::shared_ptr<const json> snap;
  std::vector<json> events;
  bool stopped = false;
};

namespace {

Reply error(int status, const std::string& message) { return {status, {{"error", message}}}; }

WeightVector weights_from(const json& body, std::size_t n) {
  if (!body.contains("weights") || body.at("weights") == "uniform") return WeightVector::uniform(n);
  const auto& w = body.at("weights");
  if (!w.is_array()) throw Error("weights must be an array or \"uniform\"");
  std::vector<double> raw;
  for (const auto& x : w) {
    if (!x.is_number()) throw Error("weights must be numbers");
    raw.push_back(x.get<double>());
  }
  if (raw.size() != n) throw Error("expected " + std::to_string(n) + " weights");
  double sum = 0;
  for (double v : raw) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("weights must be non-negative");
    sum += v;
  }
  if (!(sum > 0.0)) throw Error("weights sum to zero");
  return WeightVector::normalized(raw);
}

json event_of(const Session& s, std::size_t seq, const std::string& op) {
  const auto& search = s.search();
  json ev = {{"seq", seq},
             {"op", op},
             {"level", search.next_level()},
             {"yolk", search.yolk().size()},
             {"shell", search.shell().size()},
             {"eta_max", search.eta_max()},
             {"status", s.stopped() ? std::string("stopped") : to_string(search.status())}};
  if (op == "expand" && s.last_event()) {
    ev["level"] = s.last_event()->level;
    ev["processed"] = s.last_event()->processed;
    ev["accepted"] = s.last_event()->accepted;
  }
  return ev;
}

}  // namespace

SessionManager::SessionManager(std::optional<fs::path> workdir) : workdir_(std::move(workdir)) {
  if (workdir_) {
    fs::create_directories(*workdir_);
    restore_all();
  }
}

SessionManager::~SessionManager() = default;

std::shared_ptr<SessionManager::Entry> SessionManager::open_entry(const std::string& id, const json& body) {
  if (!body.is_object()) throw Error("body must be a JSON object");
  std::shared_ptr<Problem> problem;
  std::string blocks = body.value("aux", std::string());
  if (body.contains("text")) {
    if (!body.at("text").is_string()) throw Error("text must be a string");
    problem = std::make_shared<Problem>(parse_automaton(body.at("text").get<std::string>()),
                                        body.value("machine", std::string("inline")),
                                        blocks.empty() ? "free" : blocks);
  } else {
    if (!body.contains("machine") || !body.at("machine").is_string()) throw Error("machine is required");
    problem = load_problem(body.at("machine").get<std::string>(), blocks);
  }
  SearchConfig cfg;
  auto number = [&](const char* key, double fallback) {
    if (!body.contains(key)) return fallback;
    if (!body.at(key).is_number()) throw Error(std::string(key) + " must be a number");
    return body.at(key).get<double>();
  };
  cfg.target = number("target", cfg.target);
  if (!(cfg.target > 0.0)) throw Error("target must be positive");
  const double cap = number("radius_cap", static_cast<double>(cfg.radius_cap));
  if (!(cap >= 1.0)) throw Error("radius_cap must be at least 1");
  cfg.radius_cap = static_cast<std::size_t>(cap);
  cfg.workers = static_cast<unsigned>(std::max(1.0, number("workers", 1)));
  if (body.contains("global_dedup")) {
    if (!body.at("global_dedup").is_boolean()) throw Error("global_dedup must be a boolean");
    cfg.global_dedup = body.at("global_dedup").get<bool>();
  }
  auto pi = weights_from(body, problem->gens.size());
  require_search_weights(pi, problem->aux);

  auto e = std::make_shared<Entry>();
  e->id = id;
  e->open = body;
  e->problem = problem;
  e->session = std::make_unique<Session>(problem, pi, cfg);
  e->snap = std::make_shared<const json>(e->session->snapshot());
  e->events.push_back(event_of(*e->session, 0, "open"));
  return e;
}

Reply SessionManager::create(const json& body) {
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = "s" + std::to_string(next_id_++);
  }
  std::shared_ptr<Entry> e;
  try {
    e = open_entry(id, body);
  } catch (const std::exception& ex) {
    return error(422, ex.what());
  }
  persist_open(*e);
  {
    std::lock_guard lock(mu_);
    sessions_[id] = e;
  }
  return {201, {{"id", id}, {"snapshot", *e->snap}}};
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Reply SessionManager::snapshot(const std::string& id) const {
  auto e = find(id);
  if (!e) return error(404, "unknown session " + id);
  std::lock_guard lock(e->state);
  return {200, *e->snap};
}

json SessionManager::apply_locked(Entry& e, const json& cmd) {
  auto snap = e.session->apply(cmd);
  std::lock_guard lock(e.state);
  e.snap = std::make_shared<const json>(snap);
  e.stopped = e.session->stopped();
  e.events.push_back(event_of(*e.session, e.events.size(), cmd.at("op").get<std::string>()));
  e.changed.notify_all();
  return snap;
}

Reply SessionManager::command(const std::string& id, const json& body) {
  auto e = find(id);
  if (!e) return error(404, "unknown session " + id);
  std::unique_lock busy(e->busy, std::try_to_lock);
  if (!busy.owns_lock()) return error(409, "another command is running");
  try {
    auto snap = apply_locked(*e, body);
    append_journal(*e, body);
    return {200, snap};
  } catch (const CommandError& ex) {
    return error(ex.code() == CommandError::Code::stopped ? 409 : 422, ex.what());
  } catch (const std::exception& ex) {
    return error(422, ex.what());
  }
}

Reply SessionManager::list() const {
  std::lock_guard lock(mu_);
  json ids = json::array();
  for (const auto& [id, e] : sessions_) ids.push_back(id);
  return {200, {{"sessions", ids}}};
}

Reply SessionManager::zoo() {
  json out = json::array();
  for (const auto& entry : builtin_catalog()) {
    auto m = builtin(entry.name);
    GeneratorTable g(m);
    out.push_back({{"name", entry.name},
                   {"description", entry.description},
                   {"blocks", entry.blocks},
                   {"generators", g.names()},
                   {"degree", g.degree()}});
  }
  return {200, out};
}

std::optional<std::vector<json>> SessionManager::events(const std::string& id, std::size_t from, int wait_ms) const {
  auto e = find(id);
  if (!e) return std::nullopt;
  std::unique_lock lock(e->state);
  if (wait_ms > 0)
    e->changed.wait_for(lock, std::chrono::milliseconds(wait_ms),
                        [&] { return e->events.size() > from || e->stopped; });
  std::vector<json> out;
  for (std::size_t i = from; i < e->events.size(); ++i) out.push_back(e->events[i]);
  return out;
}

bool SessionManager::finished(const std::string& id) const {
  auto e = find(id);
  if (!e) return true;
  std::lock_guard lock(e->state);
  return e->stopped;
}

void SessionManager::persist_open(const Entry& e) const {
  if (!workdir_) return;
  const auto dir = *workdir_ / e.id;
  fs::create_directories(dir / "checkpoints");
  std::ofstream(dir / "session.json") << e.open.dump() << '\n';
  std::ofstream(dir / "journal.ndjson", std::ios::trunc);
}

void SessionManager::append_journal(const Entry& e, const json& cmd) const {
  if (!workdir_) return;
  const auto dir = *workdir_ / e.id;
  std::ofstream(dir / "journal.ndjson", std::ios::app) << cmd.dump() << '\n';
  if (cmd.at("op") == "checkpoint") {
    std::lock_guard lock(e.state);
    const auto n = e.snap->at("checkpoints").get<std::size_t>();
    std::ofstream(dir / "checkpoints" / (std::to_string(n) + ".json")) << e.session->search().checkpoint().dump() << '\n';
  }
}

void SessionManager::restore_all() {
  std::vector<fs::path> dirs;
  for (const auto& d : fs::directory_iterator(*workdir_))
    if (d.is_directory() && fs::exists(d.path() / "session.json")) dirs.push_back(d.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const std::string id = dir.filename().string();
    try {
      std::ifstream open_file(dir / "session.json");
      auto e = open_entry(id, json::parse(open_file));
      std::ifstream journal(dir / "journal.ndjson");
      std::string line;
      while (std::getline(journal, line))
        if (!line.empty()) apply_locked(*e, json::parse(line));
      sessions_[id] = e;
      ++restored_;
      if (id.size() > 1 && id[0] == 's') next_id_ = std::max<std::size_t>(next_id_, std::stoul(id.substr(1)) + 1);
    } catch (const std::exception&) {
      // a damaged directory is left alone
    }
  }
}

void install_routes(httplib::Server& server, SessionManager& sessions) {
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto parse = [](const httplib::Request& req) -> std::optional<json> {
    try {
      return json::parse(req.body);
    } catch (const json::parse_error&) {
      return std::nullopt;
    }
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Get("/zoo", [send](const httplib::Request&, httplib::Response& res) { send(res, SessionManager::zoo()); });
  server.Get("/sessions", [&sessions, send](const httplib::Request&, httplib::Response& res) { send(res, sessions.list()); });
  server.Post("/sessions", [&sessions, send, parse](const httplib::Request& req, httplib::Response& res) {
    auto body = parse(req);
    send(res, body ? sessions.create(*body) : Reply{422, {{"error", "body is not JSON"}}});
  });
  server.Get(R"(/sessions/([\w-]+))", [&sessions, send](const httplib::Request& req, httplib::Response& res) {
    send(res, sessions.snapshot(req.matches[1]));
  });
  server.Post(R"(/sessions/([\w-]+)/command)",
              [&sessions, send, parse](const httplib::Request& req, httplib::Response& res) {
                auto body = parse(req);
                send(res, body ? sessions.command(req.matches[1], *body) : Reply{422, {{"error", "body is not JSON"}}});
              });
  server.Get(R"(/sessions/([\w-]+)/events)", [&sessions, send](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!sessions.events(id, 0)) return send(res, Reply{404, {{"error", "unknown session " + id}}});
    auto param = [&](const char* key, long fallback) {
      return req.has_param(key) ? std::stol(req.get_param_value(key)) : fallback;
    };
    std::size_t from = 0;
    bool follow = true;
    long timeout = 30000;
    try {
      from = static_cast<std::size_t>(std::max(0L, param("from", 0)));
      follow = param("follow", 1) != 0;
      timeout = param("timeout", 30000);
    } catch (const std::exception&) {
      return send(res, Reply{422, {{"error", "bad query parameter"}}});
    }
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout);
    auto next = std::make_shared<std::size_t>(from);
    res.set_chunked_content_provider(
        "application/x-ndjson", [&sessions, id, next, follow, deadline](std::size_t, httplib::DataSink& sink) {
          const bool waiting = follow && std::chrono::steady_clock::now() < deadline;
          auto batch = sessions.events(id, *next, waiting ? 200 : 0);
          if (!batch) {
            sink.done();
            return true;
          }
          for (const auto& ev : *batch) {
            const std::string line = ev.dump() + "\n";
            if (!sink.write(line.data(), line.size())) return false;
          }
          *next += batch->size();
          const bool drained = sessions.events(id, *next)->empty();
          if (!follow || (sessions.finished(id) && drained) || std::chrono::steady_clock::now() >= deadline)
            sink.done();
          return true;
        });
  });
}

HttpService::HttpService(std::optional<fs::path> workdir)
    : sessions_(std::move(workdir)), server_(std::make_unique<httplib::Server>()) {
  install_routes(*server_, sessions_);
}

HttpService::~HttpService() { stop(); }

int HttpService::start(const std::string& host, int port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::make_unique<std::thread>([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

bool HttpService::run(const std::string& host, int port) { return server_->listen(host, port); }

void HttpService::stop() {
  if (server_) server_->stop();
  if (thread_ && thread_->joinable()) thread_->join();
  thread_.reset();
}

}  // namespace autgrowth
