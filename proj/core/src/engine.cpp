#include "airboard/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "json_util.hpp"

namespace airboard {

using detail::json;

namespace {

using Clock = std::chrono::steady_clock;

// Adds the elapsed time of its scope, in microseconds, to `sink`.
class StageTimer {
 public:
  explicit StageTimer(double& sink) : sink_(sink), start_(Clock::now()) {}
  ~StageTimer() {
    sink_ += std::chrono::duration<double, std::micro>(Clock::now() - start_).count();
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  double& sink_;
  Clock::time_point start_;
};

}  // namespace

double nearest_rank_percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

SessionStats compute_stats(std::span<const StageTimings> timings) {
  SessionStats s;
  s.frames = timings.size();
  if (timings.empty()) return s;
  std::vector<double> latencies;
  latencies.reserve(timings.size());
  StageTimings sum;
  double latency_sum = 0.0;
  for (const auto& t : timings) {
    const double ms = t.total() / 1000.0;
    latencies.push_back(ms);
    latency_sum += ms;
    sum.gate += t.gate;
    sum.subtract += t.subtract;
    sum.contour += t.contour;
    sum.map += t.map;
    sum.board += t.board;
    sum.render += t.render;
  }
  const double n = static_cast<double>(timings.size());
  s.mean_latency_ms = latency_sum / n;
  s.p95_latency_ms = nearest_rank_percentile(std::move(latencies), 95.0);
  const double to_ms_mean = 1.0 / (1000.0 * n);
  s.stage_means_ms = {sum.gate * to_ms_mean,    sum.subtract * to_ms_mean,
                      sum.contour * to_ms_mean, sum.map * to_ms_mean,
                      sum.board * to_ms_mean,   sum.render * to_ms_mean};
  return s;
}

std::unique_ptr<HandGate> make_gate(const GateConfig& cfg) {
  if (cfg.kind == "pass") return std::make_unique<PassThroughGate>();
  if (cfg.kind == "cascade") {
    return std::make_unique<CascadeGate>(load_cascade_file(cfg.model), cfg.stride);
  }
  throw ConfigError("unknown gate kind \"" + cfg.kind + "\"");
}

std::shared_ptr<OcrBackend> make_ocr(const OcrConfig& cfg) {
  if (cfg.kind == "none") return nullptr;
  if (cfg.kind == "mock") return std::make_shared<MockOcr>(cfg.text);
  if (cfg.kind == "external") {
    return std::make_shared<ExternalOcr>(ExternalOcr::resolve_command(
                                             cfg.command.empty() ? kDefaultOcrCommand : cfg.command),
                                         std::chrono::milliseconds(cfg.timeout_ms));
  }
  throw ConfigError("unknown ocr kind \"" + cfg.kind + "\"");
}

BoardConfig board_config(const SessionConfig& cfg) {
  BoardConfig b;
  b.width = cfg.width;
  b.height = cfg.height;
  b.vui_height = cfg.vui_height;
  b.dwell_frames = cfg.dwell_frames;
  b.pointer_diameter = cfg.pointer_diameter;
  b.save_dir = cfg.save_dir;
  return b;
}

namespace {

SessionConfig validated(SessionConfig c) {
  c.validate();
  return c;
}

std::shared_ptr<OcrBackend> pick_ocr(SessionOptions& o, const SessionConfig& c) {
  if (o.ocr) return std::move(o.ocr);
  return o.use_config_ocr ? make_ocr(c.ocr) : nullptr;
}

}  // namespace

Session::Session(SessionConfig config, SessionOptions options)
    : config_(validated(std::move(config))),
      select_model_(config_.roi_select.width(), config_.roi_select.height(), config_.alpha,
                    config_.warmup_frames),
      draw_model_(config_.roi_draw.width(), config_.roi_draw.height(), config_.alpha,
                  config_.warmup_frames),
      draw_gate_(options.draw_gate ? std::move(options.draw_gate) : make_gate(config_.gate)),
      select_gate_(options.select_gate ? std::move(options.select_gate)
                                       : make_gate(config_.gate_select)),
      board_(board_config(config_)),
      ocr_(pick_ocr(options, config_), options.async_ocr),
      last_render_(board_.render(std::nullopt)) {}

void Session::submit(const Command& cmd) { commands_.push_back(cmd); }

std::optional<CanvasPoint> Session::locate(const GrayImage& roi, const BackgroundModel& model,
                                           const Rect& roi_rect, StageTimings& t) const {
  BinaryMask mask;
  {
    StageTimer timer(t.subtract);
    mask = model.residual_mask(roi, static_cast<std::uint8_t>(config_.threshold));
  }
  std::optional<RoiPoint> top;
  {
    StageTimer timer(t.contour);
    top = find_pointer(mask, static_cast<std::size_t>(config_.min_area));
  }
  if (!top) return std::nullopt;
  StageTimer timer(t.map);
  return map_to_canvas(*top, roi_rect, Rect{0, 0, config_.width, config_.height});
}

std::vector<BoardEvent> Session::apply(const Command& cmd, std::int64_t frame_index) {
  switch (cmd.kind) {
    case Command::Kind::Clear: return board_.activate(Mode::Clear, frame_index);
    case Command::Kind::Save: return board_.activate(Mode::Save, frame_index);
    case Command::Kind::Detect: return board_.activate(Mode::Detect, frame_index);
    case Command::Kind::SetColor: return board_.set_color(cmd.index, frame_index);
    case Command::Kind::SetMode: return board_.activate(cmd.mode, frame_index);
  }
  return {};
}

void Session::dispatch_detects(std::vector<BoardEvent>& events, std::int64_t frame_index) {
  std::vector<BoardEvent> extra;
  for (const auto& e : events) {
    if (e.kind != EventKind::DetectRequested) continue;
    auto out = ocr_.submit(e.image, frame_index);
    extra.insert(extra.end(), std::make_move_iterator(out.begin()),
                 std::make_move_iterator(out.end()));
  }
  events.insert(events.end(), std::make_move_iterator(extra.begin()),
                std::make_move_iterator(extra.end()));
}

StepResult Session::step(const Frame& frame) {
  if (!frame.image.same_size(config_.width, config_.height)) {
    throw DimensionError("session: frame is " + std::to_string(frame.image.width()) + "x" +
                         std::to_string(frame.image.height()) + ", expected " +
                         std::to_string(config_.width) + "x" + std::to_string(config_.height));
  }
  if (last_index_ && frame.index <= *last_index_) {
    throw StateError("session: frame indices must strictly increase");
  }
  last_index_ = frame.index;

  StepResult r;
  r.frame_index = frame.index;
  StageTimings& t = r.timings;

  GrayImage select_roi, draw_roi;
  {
    StageTimer timer(t.subtract);
    const GrayImage gray = to_grayscale(frame.image);
    select_roi = crop(gray, config_.roi_select);
    draw_roi = crop(gray, config_.roi_draw);
  }

  if (!draw_model_.frozen() || !select_model_.frozen()) {
    {
      StageTimer timer(t.subtract);
      if (!select_model_.frozen()) select_model_.accumulate(select_roi);
      if (!draw_model_.frozen()) draw_model_.accumulate(draw_roi);
    }
    r.phase = Phase::Warmup;
    {
      StageTimer timer(t.board);
      r.events = ocr_.poll(frame.index);
    }
    {
      StageTimer timer(t.render);
      last_render_ = board_.render(std::nullopt);
    }
    timings_.push_back(t);
    return r;
  }

  r.phase = Phase::Active;
  bool select_present = false;
  {
    StageTimer timer(t.gate);
    r.hand_detected = draw_gate_->present(draw_roi, frame.index);
    select_present = select_gate_->present(select_roi, frame.index);
  }
  if (select_present) r.pointer_select = locate(select_roi, select_model_, config_.roi_select, t);
  if (r.hand_detected) r.pointer_draw = locate(draw_roi, draw_model_, config_.roi_draw, t);

  {
    StageTimer timer(t.board);
    for (const auto& cmd : commands_) {
      try {
        auto ev = apply(cmd, frame.index);
        r.events.insert(r.events.end(), ev.begin(), ev.end());
      } catch (const ConfigError&) {
        // Rejected command (e.g. palette index out of range); nothing to apply.
      }
    }
    commands_.clear();
    auto hover_events = board_.hover(r.pointer_select, frame.index);
    r.events.insert(r.events.end(), hover_events.begin(), hover_events.end());
    board_.paint(r.pointer_draw);
    dispatch_detects(r.events, frame.index);
    auto done = ocr_.poll(frame.index);
    r.events.insert(r.events.end(), done.begin(), done.end());
  }
  {
    StageTimer timer(t.render);
    last_render_ = board_.render(r.pointer_draw, r.pointer_select);
  }
  timings_.push_back(t);
  return r;
}

std::vector<BoardEvent> Session::finish() {
  return ocr_.drain(last_index_.value_or(0));
}

RunResult run(Session& session, FrameSource& source) {
  RunResult out{{}, {}, {}, session.board()};
  while (auto frame = source.next()) {
    StepResult r = session.step(*frame);
    out.events.insert(out.events.end(), std::make_move_iterator(r.events.begin()),
                      std::make_move_iterator(r.events.end()));
    r.events.clear();
    out.steps.push_back(std::move(r));
  }
  auto tail = session.finish();
  out.events.insert(out.events.end(), tail.begin(), tail.end());
  out.stats = session.stats();
  out.board = session.board();
  return out;
}

namespace detail {

json stages_json(const StageTimings& s) {
  return {{"gate", s.gate},     {"subtract", s.subtract}, {"contour", s.contour},
          {"map", s.map},       {"board", s.board},       {"render", s.render}};
}

json event_to_json(const BoardEvent& e) {
  json j{{"frame", e.frame_index}, {"kind", std::string(event_kind_name(e.kind))}};
  switch (e.kind) {
    case EventKind::ModeChanged: j["mode"] = std::string(mode_name(e.mode)); break;
    case EventKind::ColorChanged: j["color"] = {e.color.r, e.color.g, e.color.b}; break;
    case EventKind::Saved: j["path"] = e.path; break;
    case EventKind::DetectRequested: j["region"] = detail::rect_to_json(e.region); break;
    case EventKind::DetectResult:
      j["text"] = e.text;
      j["confidence"] = e.confidence ? json(*e.confidence) : json(nullptr);
      break;
    case EventKind::DetectFailed:
    case EventKind::Busy: j["reason"] = e.text; break;
    case EventKind::Cleared: break;
  }
  return j;
}

}  // namespace detail

std::string stats_json(const SessionStats& s, int indent) {
  return json{{"frames", s.frames},
              {"mean_latency_ms", s.mean_latency_ms},
              {"p95_latency_ms", s.p95_latency_ms},
              {"stages", detail::stages_json(s.stage_means_ms)}}
      .dump(indent);
}

std::string events_json(std::span<const BoardEvent> events, int indent) {
  json arr = json::array();
  for (const auto& e : events) arr.push_back(detail::event_to_json(e));
  return arr.dump(indent);
}

}  // namespace airboard
