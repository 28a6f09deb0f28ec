#pragma once

#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <string>
#include <vector>

#include <json.hpp>

#include "autgrowth/strategies.hpp"

namespace httplib {
class Server;
}

namespace autgrowth {

struct Reply {
  int status = 200;
  nlohmann::json body;
};

/// Sessions behind the HTTP layer. Every method is safe to call from any thread.
///
/// Create body: {"machine": builtin or file, "text": automaton text (instead of
/// machine), "aux": blocks or "free", "weights": numbers or "uniform",
/// "target", "radius_cap", "global_dedup", "workers"}. Weights are normalized.
///
/// With a working directory each session keeps <workdir>/<id>/session.json,
/// journal.ndjson (one applied command per line) and checkpoints/<n>.json.
/// A new manager on the same directory replays the journals.
class SessionManager {
 public:
  explicit SessionManager(std::optional<std::filesystem::path> workdir = std::nullopt);
  ~SessionManager();

  Reply create(const nlohmann::json& body);
  Reply snapshot(const std::string& id) const;
  Reply command(const std::string& id, const nlohmann::json& body);
  Reply list() const;
  static Reply zoo();

  /// Events with sequence number >= from. Waits up to `wait_ms` when none are
  /// there yet. nullopt for an unknown session.
  std::optional<std::vector<nlohmann::json>> events(const std::string& id, std::size_t from, int wait_ms = 0) const;
  bool finished(const std::string& id) const;

  /// Restored from the working directory at construction.
  std::size_t restored() const { return restored_; }

 private:
  struct Entry;
  std::shared_ptr<Entry> find(const std::string& id) const;
  void persist_open(const Entry& e) const;
  void append_journal(const Entry& e, const nlohmann::json& cmd) const;
  void restore_all();
  std::shared_ptr<Entry> open_entry(const std::string& id, const nlohmann::json& body);
  static nlohmann::json apply_locked(Entry& e, const nlohmann::json& cmd);

  std::optional<std::filesystem::path> workdir_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::size_t next_id_ = 1;
  std::size_t restored_ = 0;
};

/// Routes of the local JSON API on top of a SessionManager:
///   GET  /zoo
///   GET  /sessions
///   POST /sessions                  -> 201 {"id", "snapshot"}
///   GET  /sessions/{id}             -> snapshot
///   POST /sessions/{id}/command     -> snapshot; 404, 409 busy or stopped, 422 bad payload
///   GET  /sessions/{id}/events?from=0&follow=1&timeout=30000
///                                   -> line-delimited JSON, one event per command
void install_routes(httplib::Server& server, SessionManager& sessions);

/// Server owning its routes; start() binds and serves on a background thread.
class HttpService {
 public:
  explicit HttpService(std::optional<std::filesystem::path> workdir = std::nullopt);
  ~HttpService();

  /// Binds to host:port (0 picks a free port) and returns the port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Binds and serves on the calling thread until stop().
  bool run(const std::string& host, int port);
  void stop();
  SessionManager& sessions() { return sessions_; }

 private:
  SessionManager sessions_;
  std::unique_ptr<httplib::Server> server_;
  std::unique_ptr<std::thread> thread_;
};

}  // namespace autgrowth
