#include <chrono>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>
#include <json.hpp>

#include "airboard/ppm.hpp"
#include "airboard/server.hpp"
#include "scenes.hpp"

namespace airboard {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

constexpr int kWarmup = 5;

SessionConfig test_config() {
  SessionConfig c;
  c.warmup_frames = kWarmup;
  c.ocr.text = "HELLO";
  return c;
}

// Warmup, a short stroke in the draw ROI, then empty frames.
SyntheticSpec stroke_then_idle() {
  return scene::Script(kWarmup).stroke(12, {{40, 60}, {160, 150}}).idle(400).build();
}

// Runs a server on a background thread for the lifetime of the fixture.
class RunningServer {
 public:
  explicit RunningServer(ServerOptions o) : server_(std::move(o)) {
    port_ = server_.start();
    thread_ = std::thread([this] { server_.run(); });
  }
  ~RunningServer() {
    server_.stop();
    thread_.join();
  }
  std::uint16_t port() const { return port_; }

 private:
  Server server_;
  std::uint16_t port_ = 0;
  std::thread thread_;
};

ServerOptions options_with(SyntheticSpec spec) {
  ServerOptions o;
  o.config = test_config();
  o.pace = true;
  o.config.serve.fps = 200;
  o.source_factory = [spec] { return open_synthetic(spec); };
  return o;
}

class Client {
 public:
  explicit Client(std::uint16_t port) : ws_(io_) {
    tcp::resolver resolver(io_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/ws");
  }
  ~Client() {
    beast::error_code ignored;
    ws_.close(websocket::close_code::normal, ignored);
  }
  json read() {
    beast::flat_buffer buf;
    buf.reserve(4 << 20);
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }
  void send(const std::string& text) { ws_.write(net::buffer(text)); }

 private:
  net::io_context io_;
  websocket::stream<tcp::socket> ws_;
};

RgbImage decode_b64_ppm(const json& field) {
  const std::string bytes = base64_decode(field.get<std::string>());
  return decode_ppm(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

TEST(Protocol, Base64RoundTrip) {
  for (std::string s : {"", "a", "ab", "abc", "P6\n1 1\n255\n\xff\x00\x7f"}) {
    EXPECT_EQ(base64_decode(base64_encode(s)), s);
  }
  EXPECT_EQ(base64_encode("abc"), "YWJj");
}

TEST(Protocol, CommandParsing) {
  EXPECT_EQ(parse_command_message(R"({"type":"command","action":"clear"})", 4).command->kind,
            Command::Kind::Clear);
  const auto color = parse_command_message(R"({"type":"command","action":"set_color","index":2})", 4);
  ASSERT_TRUE(color.command);
  EXPECT_EQ(color.command->index, 2);
  const auto mode = parse_command_message(R"({"type":"command","action":"set_mode","mode":"Erase"})", 4);
  EXPECT_EQ(mode.command->mode, Mode::Erase);
  EXPECT_EQ(parse_command_message("{nope", 4).error, "malformed_json");
  EXPECT_EQ(parse_command_message(R"({"type":"hello"})", 4).error, "bad_message");
  EXPECT_EQ(parse_command_message(R"({"type":"command","action":"foo"})", 4).error, "unknown_action");
  EXPECT_EQ(parse_command_message(R"({"type":"command","action":"set_color","index":4})", 4).error,
            "bad_argument");
  EXPECT_EQ(parse_command_message(R"({"type":"command","action":"set_mode","mode":"Paint"})", 4).error,
            "bad_argument");
}

TEST(Protocol, HelloAndStateSchema) {
  const json hello = json::parse(hello_message(test_config()));
  EXPECT_EQ(hello["type"], "hello");
  EXPECT_EQ(hello["proto"], 1);

  Session s(test_config());
  const SyntheticSpec spec = scene::Script(kWarmup).stroke(1, {{100, 100}}).build();
  StepResult r;
  Frame f;
  for (int i = 0; i < spec.frames; ++i) {
    f = Frame{i, synthesize_frame(spec, i), 0.0};
    r = s.step(f);
  }
  const json st = json::parse(state_message(r, s, f.image));
  for (const char* key : {"type", "frame_index", "camera_b64", "canvas_b64", "pointer_draw",
                          "pointer_select", "mode", "hand_detected", "latency_ms"}) {
    EXPECT_TRUE(st.contains(key)) << key;
  }
  EXPECT_EQ(st["type"], "state");
  EXPECT_EQ(st["pointer_draw"], (json{{"x", 360}, {"y", 193}}));
  EXPECT_TRUE(st["pointer_select"].is_null());
  EXPECT_EQ(st["mode"], "Move");
  EXPECT_EQ(decode_b64_ppm(st["canvas_b64"]), s.last_render());
  EXPECT_EQ(decode_b64_ppm(st["camera_b64"]), annotate_camera(f.image, s.config()));
}

TEST(Server, HealthzAnswersOk) {
  RunningServer srv(options_with(stroke_then_idle()));
  net::io_context io;
  tcp::resolver resolver(io);
  beast::tcp_stream stream(io);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(srv.port())));
  http::request<http::string_body> req{http::verb::get, "/healthz", 11};
  req.set(http::field::host, "127.0.0.1");
  http::write(stream, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(stream, buf, res);
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(res.body(), "ok");
}

TEST(Server, BusyPortFailsAtStartup) {
  RunningServer first(options_with(stroke_then_idle()));
  ServerOptions o = options_with(stroke_then_idle());
  o.port = first.port();
  Server second(std::move(o));
  EXPECT_THROW(second.start(), IoError);
}

TEST(Server, HelloThenIncreasingStates) {
  RunningServer srv(options_with(stroke_then_idle()));
  Client c(srv.port());
  const json hello = c.read();
  EXPECT_EQ(hello["type"], "hello");
  EXPECT_EQ(hello["proto"], 1);
  std::int64_t last = -1;
  for (int i = 0; i < 30; ++i) {
    const json st = c.read();
    ASSERT_EQ(st["type"], "state");
    EXPECT_GT(st["frame_index"].get<std::int64_t>(), last);
    last = st["frame_index"];
  }
}

TEST(Server, UnknownActionKeepsConnection) {
  RunningServer srv(options_with(stroke_then_idle()));
  Client c(srv.port());
  c.read();
  c.send(R"({"type":"command","action":"foo"})");
  c.send("not json");
  std::vector<std::string> reasons;
  for (int i = 0; i < 200 && reasons.size() < 2; ++i) {
    const json m = c.read();
    if (m["type"] == "error") reasons.push_back(m["reason"]);
  }
  EXPECT_EQ(reasons, (std::vector<std::string>{"unknown_action", "malformed_json"}));
  EXPECT_EQ(c.read()["type"], "state");
}

TEST(Server, ClearRestoresInitialCanvas) {
  RunningServer srv(options_with(stroke_then_idle()));
  Client c(srv.port());
  c.read();
  c.send(R"({"type":"command","action":"set_mode","mode":"draw"})");

  // Wait for the stroke to finish and leave ink behind.
  bool inked = false;
  for (int i = 0; i < 400 && !inked; ++i) {
    const json st = c.read();
    if (st["type"] != "state" || st["frame_index"].get<int>() < kWarmup + 14) continue;
    inked = crop(decode_b64_ppm(st["canvas_b64"]), {0, 40, 720, 420}) != RgbImage(720, 380, 255);
  }
  ASSERT_TRUE(inked);

  c.send(R"({"type":"command","action":"clear"})");
  for (int i = 0; i < 400; ++i) {
    const json st = c.read();
    if (st["type"] != "state" || st["events"].empty()) continue;
    ASSERT_EQ(st["events"][1]["kind"], "Cleared");
    EXPECT_EQ(decode_b64_ppm(st["canvas_b64"]), Board(board_config(test_config())).render(std::nullopt));
    return;
  }
  FAIL() << "no Cleared event received";
}

TEST(Server, DetectResultArrivesInState) {
  RunningServer srv(options_with(stroke_then_idle()));
  Client c(srv.port());
  c.read();
  c.send(R"({"type":"command","action":"detect"})");
  for (int i = 0; i < 400; ++i) {
    const json st = c.read();
    if (st["type"] != "state") continue;
    for (const auto& e : st["events"]) {
      if (e["kind"] == "DetectResult") {
        EXPECT_EQ(e["text"], "HELLO");
        return;
      }
    }
  }
  FAIL() << "no DetectResult event received";
}

TEST(Server, EndAfterMaxFrames) {
  ServerOptions o = options_with(stroke_then_idle());
  o.max_frames = 8;
  RunningServer srv(std::move(o));
  Client c(srv.port());
  c.read();
  int states = 0;
  for (;;) {
    const json m = c.read();
    if (m["type"] == "end") break;
    ++states;
  }
  EXPECT_LE(states, 8);
  EXPECT_GE(states, 1);
}

TEST(Server, DemoSpecIsValid) {
  const SyntheticSpec s = demo_spec(SessionConfig{});
  EXPECT_NO_THROW(s.validate());
  EXPECT_GT(s.frames, s.warmup);
}

}  // namespace
}  // namespace airboard
