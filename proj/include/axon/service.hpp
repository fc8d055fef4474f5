#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "axon/error.hpp"
#include "axon/session.hpp"

namespace axon {

struct HttpReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Routes one request against the session. Kernel errors become 4xx replies
// with {"error": code, "message": text}.
class Service {
 public:
  explicit Service(Session& session);
  ~Service();

  HttpReply handle(const std::string& method, const std::string& path,
                   const std::map<std::string, std::string>& query, const std::string& body);

  // Blocks until stop(). Throws PortInUse when the port cannot be bound.
  void listen(const std::string& host, int port);
  // Binds before returning and serves on a background thread; returns the port.
  int start(const std::string& host, int port = 0);
  void stop();

  static int status_for(ErrorCode code);

 private:
  struct Server;
  void bind(const std::string& host, int port);

  Session& session_;
  std::mutex mutex_;
  std::unique_ptr<Server> server_;
};

}  // namespace axon
