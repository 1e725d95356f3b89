#pragma once

#include <memory>
#include <string>

#include "pforge/service/session.h"

namespace httplib {
class Server;
}

namespace pforge::service {

/// HTTP front end for a Session:
///   POST /pointcloud   PLY body          -> summary
///   GET  /pointcloud                     -> PLY
///   POST /edit         [ops] | {revision, ops} -> summary + changed
///   POST /undo, /redo                    -> summary
///   POST /mesh[?res=N]                   -> OBJ, X-Mesh-Time-Ms, X-Cache: hit|miss
///   GET  /mesh                           -> cached OBJ
///   GET  /render?az=&el=&size=           -> PNG
///   GET  /state                          -> summary
/// Errors are JSON {"error", "position"?} with the session's status code.
class Server {
 public:
  explicit Server(SessionOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();
  bool is_running() const;

  Session& session() { return *session_; }

 private:
  std::unique_ptr<Session> session_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace pforge::service
