#pragma once

// HTTP facade over the analyzer:
//   POST /api/analyze   {"gcode": "...", "machine": {...}, "options": {"bins": [..], "view": ".."}}
//   GET  /api/health
// Handlers are plain functions of the request so they can be exercised
// without a socket; configure() binds them to a cpp-httplib server.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace httplib {
class Server;
}

namespace kerf::service {

inline constexpr std::size_t kMaxRequestBytes = 20u * 1024u * 1024u;

struct Response {
  int status = 200;
  std::string body;
};

Response handle_analyze(std::string_view body);
Response handle_health(std::chrono::steady_clock::time_point started);

// Stable 64-bit FNV-1a of the canonical (key-sorted) request, hex encoded.
std::string request_hash(const nlohmann::json& request);

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin = "*";
  std::optional<std::filesystem::path> ui_dir;  // static bundle served under /
};

void configure(httplib::Server& server, const ServerOptions& options);

// Blocks until the server stops. Returns false if the socket cannot be bound.
bool serve(const ServerOptions& options);

}  // namespace kerf::service
