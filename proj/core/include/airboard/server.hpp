#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "airboard/config.hpp"
#include "airboard/engine.hpp"
#include "airboard/trace.hpp"

namespace airboard {

inline constexpr int kProtocolVersion = 1;

// Result of decoding one client text message.
struct CommandParse {
  std::optional<Command> command;
  // Set when command is empty: malformed_json, bad_message, unknown_action
  // or bad_argument.
  std::string error;
};

// Client messages look like {"type": "command", "action": "clear"}; the
// actions are clear, save, detect, set_color (with "index") and set_mode
// (with "mode").
CommandParse parse_command_message(std::string_view text, int palette_size);

std::string hello_message(const SessionConfig& config);
std::string error_message(std::string_view reason, std::string_view detail = {});
// The live camera frame with both ROIs outlined.
RgbImage annotate_camera(const RgbImage& frame, const SessionConfig& config);
std::string state_message(const StepResult& step, const Session& session, const RgbImage& camera);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

struct ServerOptions {
  SessionConfig config;
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  int threads = 2;
  // Sleep between frames to hold config.serve.fps; off for tests.
  bool pace = true;
  // Stop each connection's stream after this many frames (0 = unlimited).
  std::int64_t max_frames = 0;
  // Per-connection frame source. Defaults to the source named in
  // config.serve, or a built-in synthetic demo when none is named.
  std::function<std::unique_ptr<FrameSource>()> source_factory;
};

// Serves GET /healthz and the WebSocket endpoint /ws. Every connection gets
// its own Session fed by a fresh frame source; the connection receives a
// hello message, then one state message per processed frame (older unsent
// states are dropped when the client lags), and may send commands at any
// time.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and listens; returns the bound port. Throws IoError if the address
  // is unavailable.
  std::uint16_t start();
  // Serves until stop(); calls start() first if needed.
  void run();
  void stop();
  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Synthetic trace used by `serve` when the config names no source.
SyntheticSpec demo_spec(const SessionConfig& config);

}  // namespace airboard
