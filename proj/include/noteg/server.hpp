#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "noteg/notebook.hpp"

namespace noteg {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  std::filesystem::path asset_root;
  std::optional<std::uint64_t> seed;
};

/// WebSocket endpoint at /ws speaking the session protocol, plus plain HTTP
/// GET for /notebook and /assets/<manifest path>. Network I/O runs on its
/// own thread; every message is queued and applied by the control loop in
/// run() at tick boundaries.
class Server {
 public:
  Server(Notebook nb, ServerOptions opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Bound port, valid after construction.
  unsigned short port() const;

  /// Runs the 60 Hz control loop until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace noteg
