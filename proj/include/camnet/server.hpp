#pragma once

#include "camnet/scenario.hpp"

#include <memory>
#include <string>

namespace camnet {

struct ServerOptions {
  std::string address = "127.0.0.1";
  // 0 picks a free port.
  int port = 8765;
  std::string session_name = "default";
  std::string config_hash;
  // Stop on SIGINT/SIGTERM.
  bool handle_signals = false;
};

Json export_json(const SessionExport& exported, const std::string& config_hash);

/// WebSocket front end of a Session.
///
/// Client text messages are JSON objects with a "type" field:
///   hello{session}, move_camera{id, position[3], quaternion[4]},
///   add_camera{spec, pose}, remove_camera{id}, set_mode{mode}, export{}.
/// Quaternions are [w, x, y, z].
///
/// After hello the server sends a welcome object, a points object followed
/// by one binary message of float32 xyz triples, and the current volume
/// frame. Every committed mutation is answered with a status object and a
/// binary volume frame (encoded for each client's mode) to every client.
class SessionServer {
public:
  SessionServer(Session& session, ServerOptions options);
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  unsigned short port() const;

  // Serves on the calling thread until stop().
  void run();
  // Safe to call from any thread.
  void stop();

private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace camnet
