#include "airboard/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/core/detail/base64.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <atomic>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include "airboard/ppm.hpp"
#include "json_util.hpp"

namespace airboard {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using detail::json;

// ---------------------------------------------------------------------------
// Messages

std::string base64_encode(std::string_view bytes) {
  std::string out(beast::detail::base64::encoded_size(bytes.size()), '\0');
  out.resize(beast::detail::base64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::string base64_decode(std::string_view text) {
  std::string out(beast::detail::base64::decoded_size(text.size()), '\0');
  const auto [written, read] = beast::detail::base64::decode(out.data(), text.data(), text.size());
  // The decoder stops at padding; anything after it must be the padding itself.
  const auto rest = text.substr(read);
  if (text.size() % 4 != 0 || rest.size() > 2 || rest.find_first_not_of('=') != std::string_view::npos)
    throw ParseError("base64: invalid input");
  out.resize(written);
  return out;
}

namespace {

std::string ppm_b64(const RgbImage& img) {
  const auto bytes = encode_ppm(img);
  return base64_encode(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

json point_json(const std::optional<CanvasPoint>& p) {
  if (!p) return nullptr;
  return {{"x", p->x}, {"y", p->y}};
}

}  // namespace

CommandParse parse_command_message(std::string_view text, int palette_size) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    return {std::nullopt, "malformed_json"};
  }
  if (!j.is_object() || !j.contains("type") || j["type"] != "command" || !j.contains("action") ||
      !j["action"].is_string()) {
    return {std::nullopt, "bad_message"};
  }
  const auto action = j["action"].get<std::string>();
  Command c;
  if (action == "clear") {
    c.kind = Command::Kind::Clear;
  } else if (action == "save") {
    c.kind = Command::Kind::Save;
  } else if (action == "detect") {
    c.kind = Command::Kind::Detect;
  } else if (action == "set_color") {
    if (!j.contains("index") || !j["index"].is_number_integer()) return {std::nullopt, "bad_argument"};
    c.kind = Command::Kind::SetColor;
    c.index = j["index"].get<int>();
    if (c.index < 0 || c.index >= palette_size) return {std::nullopt, "bad_argument"};
  } else if (action == "set_mode") {
    if (!j.contains("mode") || !j["mode"].is_string()) return {std::nullopt, "bad_argument"};
    const auto mode = parse_mode(j["mode"].get<std::string>());
    if (!mode) return {std::nullopt, "bad_argument"};
    c.kind = Command::Kind::SetMode;
    c.mode = *mode;
  } else {
    return {std::nullopt, "unknown_action"};
  }
  return {c, {}};
}

std::string hello_message(const SessionConfig& config) {
  json modes = json::array();
  for (Mode m : kAllModes) modes.push_back(std::string(mode_name(m)));
  json palette = json::array();
  for (const Rgb& c : BoardConfig{}.palette) palette.push_back({c.r, c.g, c.b});
  return json{{"type", "hello"},
              {"proto", kProtocolVersion},
              {"width", config.width},
              {"height", config.height},
              {"roi_select", detail::rect_to_json(config.roi_select)},
              {"roi_draw", detail::rect_to_json(config.roi_draw)},
              {"warmup_frames", config.warmup_frames},
              {"modes", modes},
              {"palette", palette}}
      .dump();
}

std::string error_message(std::string_view reason, std::string_view detail_text) {
  json j{{"type", "error"}, {"reason", reason}};
  if (!detail_text.empty()) j["detail"] = detail_text;
  return j.dump();
}

RgbImage annotate_camera(const RgbImage& frame, const SessionConfig& config) {
  RgbImage out = frame;
  outline_rect(out, config.roi_select, {255, 160, 0}, 2);
  outline_rect(out, config.roi_draw, {0, 200, 0}, 2);
  return out;
}

std::string state_message(const StepResult& step, const Session& session, const RgbImage& camera) {
  json events = json::array();
  for (const auto& e : step.events) events.push_back(detail::event_to_json(e));
  return json{{"type", "state"},
              {"frame_index", step.frame_index},
              {"phase", step.phase == Phase::Warmup ? "Warmup" : "Active"},
              {"camera_b64", ppm_b64(annotate_camera(camera, session.config()))},
              {"canvas_b64", ppm_b64(session.last_render())},
              {"pointer_draw", point_json(step.pointer_draw)},
              {"pointer_select", point_json(step.pointer_select)},
              {"mode", std::string(mode_name(session.board().active_mode()))},
              {"hand_detected", step.hand_detected},
              {"latency_ms", step.latency_ms()},
              {"events", events}}
      .dump();
}

SyntheticSpec demo_spec(const SessionConfig& config) {
  SyntheticSpec s;
  s.width = config.width;
  s.height = config.height;
  s.fps = config.serve.fps;
  s.warmup = config.warmup_frames;
  s.roi_select = config.roi_select;
  s.roi_draw = config.roi_draw;
  s.noise = 2;
  s.seed = config.seed;

  const auto vui = make_vui_layout(config.width, config.vui_height);
  const int rw = config.roi_select.width(), rh = config.roi_select.height();
  // Blob centre whose top maps into the middle of button `m`.
  auto over = [&](Mode m) {
    const auto& r = vui[static_cast<std::size_t>(m)].rect;
    const int bx = (r.x0 + r.x1) / 2, by = (r.y0 + r.y1) / 2;
    const int tx = (bx * rw + config.width - 1) / config.width;
    const int ty = (by * rh + config.height - 1) / config.height;
    return Point{tx, ty + s.blob_radius};
  };
  const int hold = config.dwell_frames + 5;
  const int dw = config.roi_draw.width(), dh = config.roi_draw.height();
  const Point a{dw * 3 / 10, dh * 3 / 10}, b{dw * 7 / 10, dh * 3 / 10}, c{dw * 7 / 10, dh * 7 / 10},
      d{dw * 3 / 10, dh * 7 / 10};

  s.select.segments = {{hold, {over(Mode::Draw)}}, {60, {}},  {hold, {over(Mode::Color)}},
                       {hold, {over(Mode::Draw)}}, {60, {}},  {hold, {over(Mode::Clear)}},
                       {10, {}}};
  s.draw.segments = {{hold, {}}, {60, {a, b, c, d, a}}, {2 * hold, {}}, {60, {a, c}}, {hold + 10, {}}};
  int active = 0;
  for (const auto& seg : s.select.segments) active += seg.frames;
  s.frames = s.warmup + active;
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Connections

namespace {

std::function<std::unique_ptr<FrameSource>()> default_factory(const SessionConfig& config) {
  const auto& serve = config.serve;
  std::function<std::unique_ptr<FrameSource>()> once;
  if (!serve.trace.empty()) {
    once = [dir = serve.trace] { return open_trace(dir); };
  } else {
    SyntheticSpec spec = serve.synthetic.empty() ? demo_spec(config)
                                                 : load_synthetic_spec(serve.synthetic);
    once = [spec] { return open_synthetic(spec); };
  }
  if (!serve.loop) return once;
  return [once]() -> std::unique_ptr<FrameSource> { return std::make_unique<LoopingSource>(once); };
}

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket&& socket, const ServerOptions& options,
               std::function<std::unique_ptr<FrameSource>()> factory, net::any_io_executor pipeline)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        options_(options),
        factory_(std::move(factory)),
        pipeline_(std::move(pipeline)) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    // State messages are a few MB; send each as a single frame.
    ws_.auto_fragment(false);
    ws_.async_accept(req, beast::bind_front_handler(&WsConnection::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    try {
      SessionOptions so;
      so.async_ocr = true;
      session_ = std::make_unique<Session>(options_.config, std::move(so));
      palette_size_ = static_cast<int>(session_->board().config().palette.size());
      source_ = factory_();
    } catch (const std::exception& e) {
      send_control(error_message("session_failed", e.what()));
      closing_ = true;
      return;
    }
    send_control(hello_message(options_.config));
    do_read();
    schedule_tick(std::chrono::milliseconds(0));
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      shutdown();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    const auto parsed = parse_command_message(text, palette_size_);
    if (parsed.command) {
      std::lock_guard lock(commands_mutex_);
      commands_.push_back(*parsed.command);
    } else {
      send_control(error_message(parsed.error));
    }
    do_read();
  }

  void schedule_tick(std::chrono::steady_clock::duration delay) {
    if (closing_) return;
    timer_.expires_after(delay);
    timer_.async_wait(beast::bind_front_handler(&WsConnection::on_tick, shared_from_this()));
  }

  void on_tick(beast::error_code ec) {
    if (ec || closing_) return;
    net::post(pipeline_, [self = shared_from_this()] { self->process_frame(); });
  }

  struct Outcome {
    std::string message;
    bool control = false;
    bool has_events = false;
    bool more = false;
  };

  // Runs on the pipeline pool, one frame at a time per connection, so the
  // strand stays free for socket I/O.
  void process_frame() {
    const auto started = std::chrono::steady_clock::now();
    Outcome out;
    try {
      std::optional<Frame> frame = source_->next();
      if (!frame || (options_.max_frames > 0 && frames_sent_ >= options_.max_frames)) {
        out = {json{{"type", "end"}, {"frames", frames_sent_}}.dump(), true, false, false};
      } else {
        std::vector<Command> commands;
        {
          std::lock_guard lock(commands_mutex_);
          commands.swap(commands_);
        }
        for (const auto& c : commands) session_->submit(c);
        const StepResult r = session_->step(*frame);
        out = {state_message(r, *session_, frame->image), false, !r.events.empty(), true};
        ++frames_sent_;
      }
    } catch (const std::exception& e) {
      out = {error_message("pipeline_failed", e.what()), true, false, false};
    }
    auto delay = std::chrono::steady_clock::duration::zero();
    if (options_.pace) {
      const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.0 / options_.config.serve.fps));
      const auto spent = std::chrono::steady_clock::now() - started;
      if (spent < period) delay = period - spent;
    }
    net::post(ws_.get_executor(), [self = shared_from_this(), out = std::move(out), delay]() mutable {
      if (out.control) {
        self->send_control(std::move(out.message));
      } else {
        self->send_state(std::move(out.message), out.has_events);
      }
      if (out.more) self->schedule_tick(delay);
    });
  }

  // Control messages (hello, errors) are never dropped.
  void send_control(std::string msg) {
    control_.push_back(std::move(msg));
    if (!writing_) do_write();
  }

  // Latest-wins: an unsent state is replaced by a newer one. States that
  // carry events are queued like control messages so no event is lost; the
  // older pending state is dropped to keep frame order.
  void send_state(std::string msg, bool has_events) {
    if (has_events) {
      pending_state_.reset();
      control_.push_back(std::move(msg));
    } else {
      pending_state_ = std::move(msg);
    }
    if (!writing_) do_write();
  }

  void do_write() {
    if (!control_.empty()) {
      outgoing_ = std::move(control_.front());
      control_.pop_front();
    } else if (pending_state_) {
      outgoing_ = std::move(*pending_state_);
      pending_state_.reset();
    } else {
      writing_ = false;
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(outgoing_),
                    beast::bind_front_handler(&WsConnection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      shutdown();
      return;
    }
    do_write();
  }

  void shutdown() {
    closing_ = true;
    timer_.cancel();
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  const ServerOptions& options_;
  std::function<std::unique_ptr<FrameSource>()> factory_;
  net::any_io_executor pipeline_;
  std::unique_ptr<Session> session_;
  std::unique_ptr<FrameSource> source_;
  beast::flat_buffer buffer_;
  std::deque<std::string> control_;
  std::optional<std::string> pending_state_;
  std::string outgoing_;
  std::mutex commands_mutex_;
  std::vector<Command> commands_;
  int palette_size_ = 0;
  bool writing_ = false;
  std::atomic<bool> closing_ = false;
  std::int64_t frames_sent_ = 0;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket&& socket, const ServerOptions& options,
                 std::function<std::unique_ptr<FrameSource>()> factory, net::any_io_executor pipeline)
      : stream_(std::move(socket)),
        options_(options),
        factory_(std::move(factory)),
        pipeline_(std::move(pipeline)) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

 private:
  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/ws") {
        stream_.expires_never();
        std::make_shared<WsConnection>(stream_.release_socket(), options_, factory_, pipeline_)
            ->start(std::move(req_));
        return;
      }
      respond(http::status::not_found, "not found\n");
      return;
    }
    if (req_.method() == http::verb::get && req_.target() == "/healthz") {
      respond(http::status::ok, "ok");
    } else {
      respond(http::status::not_found, "not found\n");
    }
  }

  void respond(http::status status, std::string body) {
    res_ = http::response<http::string_body>(status, req_.version());
    res_.set(http::field::server, "airboard");
    res_.set(http::field::content_type, "text/plain");
    res_.keep_alive(false);
    res_.body() = std::move(body);
    res_.prepare_payload();
    http::async_write(stream_, res_, [self = shared_from_this()](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  const ServerOptions& options_;
  std::function<std::unique_ptr<FrameSource>()> factory_;
  net::any_io_executor pipeline_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  http::response<http::string_body> res_;
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServerOptions o) : options(std::move(o)), acceptor(io) {}

  void do_accept() {
    acceptor.async_accept(net::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec == net::error::operation_aborted) return;
      } else {
        std::make_shared<HttpConnection>(std::move(socket), options, factory, pipeline.get_executor())
            ->start();
      }
      do_accept();
    });
  }

  ServerOptions options;
  std::function<std::unique_ptr<FrameSource>()> factory;
  net::io_context io;
  tcp::acceptor acceptor;
  // Declared after io so pending pipeline work is destroyed while io is alive.
  net::thread_pool pipeline{2};
  std::vector<std::thread> workers;
  bool started = false;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->options.config.validate();
  impl_->factory = impl_->options.source_factory ? impl_->options.source_factory
                                                 : default_factory(impl_->options.config);
}

Server::~Server() { stop(); }

std::uint16_t Server::start() {
  if (impl_->started) return port();
  beast::error_code ec;
  const auto address = net::ip::make_address(impl_->options.address, ec);
  if (ec) throw ConfigError("server: bad address " + impl_->options.address);
  const tcp::endpoint endpoint{address, impl_->options.port};
  auto& acc = impl_->acceptor;
  acc.open(endpoint.protocol(), ec);
  if (!ec) acc.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(endpoint, ec);
  if (!ec) acc.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    beast::error_code ignored;
    acc.close(ignored);
    throw IoError("server: cannot listen on " + impl_->options.address + ":" +
                  std::to_string(impl_->options.port) + ": " + ec.message());
  }
  impl_->started = true;
  impl_->do_accept();
  return port();
}

void Server::run() {
  start();
  const int extra = std::max(0, impl_->options.threads - 1);
  for (int i = 0; i < extra; ++i) impl_->workers.emplace_back([this] { impl_->io.run(); });
  impl_->io.run();
  for (auto& t : impl_->workers) {
    if (t.joinable()) t.join();
  }
  impl_->workers.clear();
}

void Server::stop() {
  if (!impl_) return;
  net::post(impl_->io, [this] {
    beast::error_code ignored;
    impl_->acceptor.close(ignored);
  });
  impl_->io.stop();
  impl_->pipeline.stop();
}

std::uint16_t Server::port() const {
  beast::error_code ec;
  const auto ep = impl_->acceptor.local_endpoint(ec);
  return ec ? 0 : ep.port();
}

}  // namespace airboard
