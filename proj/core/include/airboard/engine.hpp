#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airboard/background.hpp"
#include "airboard/board.hpp"
#include "airboard/config.hpp"
#include "airboard/handgate.hpp"
#include "airboard/ocr.hpp"
#include "airboard/trace.hpp"

namespace airboard {

// Per-frame processing time by pipeline stage, in microseconds.
struct StageTimings {
  double gate = 0.0;
  double subtract = 0.0;  // grayscale, crop, accumulate or residual mask
  double contour = 0.0;
  double map = 0.0;
  double board = 0.0;
  double render = 0.0;

  double total() const { return gate + subtract + contour + map + board + render; }
};

enum class Phase { Warmup, Active };

struct StepResult {
  std::int64_t frame_index = 0;
  Phase phase = Phase::Warmup;
  std::optional<CanvasPoint> pointer_draw;
  std::optional<CanvasPoint> pointer_select;
  bool hand_detected = false;
  std::vector<BoardEvent> events;
  StageTimings timings;

  double latency_ms() const { return timings.total() / 1000.0; }
};

struct SessionStats {
  std::size_t frames = 0;
  double mean_latency_ms = 0.0;
  double p95_latency_ms = 0.0;  // nearest rank
  StageTimings stage_means_ms;  // same fields, milliseconds
};

// Aggregates per-frame timings; latency of a frame is the sum of its stages.
SessionStats compute_stats(std::span<const StageTimings> timings);

// Nearest-rank percentile (p in (0, 100]) of unsorted values; 0 when empty.
double nearest_rank_percentile(std::vector<double> values, double p);

// Board action requested from outside the pointer loop (UI buttons).
struct Command {
  enum class Kind { Clear, Save, Detect, SetColor, SetMode };
  Kind kind = Kind::Clear;
  int index = 0;          // SetColor
  Mode mode = Mode::Move;  // SetMode
};

// Overrides for collaborators normally built from the config.
struct SessionOptions {
  std::unique_ptr<HandGate> draw_gate;
  std::unique_ptr<HandGate> select_gate;
  std::shared_ptr<OcrBackend> ocr;
  bool use_config_ocr = true;  // build the backend from config when `ocr` is empty
  bool async_ocr = false;
};

std::unique_ptr<HandGate> make_gate(const GateConfig& cfg);
// nullptr for kind "none".
std::shared_ptr<OcrBackend> make_ocr(const OcrConfig& cfg);
BoardConfig board_config(const SessionConfig& cfg);

// One air-drawing session: two ROI background models, the hand gate, the
// board and the OCR dispatcher.
//
// Each step converts the frame to grayscale and crops both ROIs. While the
// background models warm up the crops are accumulated and nothing else
// happens. Afterwards each ROI goes through gate, residual mask, largest
// contour and top point, and the point is mapped onto the canvas. The select
// pointer drives VUI hover, the draw pointer drives the canvas.
class Session {
 public:
  explicit Session(SessionConfig config, SessionOptions options = {});

  // Throws DimensionError if the frame size differs from the config.
  StepResult step(const Frame& frame);

  // Queued and applied at the next active step.
  void submit(const Command& cmd);

  // Waits for an in-flight OCR request; returns its event, if any.
  std::vector<BoardEvent> finish();

  const SessionConfig& config() const { return config_; }
  const Board& board() const { return board_; }
  const RgbImage& last_render() const { return last_render_; }
  const BackgroundModel& select_model() const { return select_model_; }
  const BackgroundModel& draw_model() const { return draw_model_; }
  std::span<const StageTimings> timings() const { return timings_; }
  SessionStats stats() const { return compute_stats(timings_); }
  std::int64_t frames_processed() const { return static_cast<std::int64_t>(timings_.size()); }

 private:
  std::optional<CanvasPoint> locate(const GrayImage& roi, const BackgroundModel& model,
                                    const Rect& roi_rect, StageTimings& t) const;
  std::vector<BoardEvent> apply(const Command& cmd, std::int64_t frame_index);
  void dispatch_detects(std::vector<BoardEvent>& events, std::int64_t frame_index);

  SessionConfig config_;
  BackgroundModel select_model_;
  BackgroundModel draw_model_;
  std::unique_ptr<HandGate> draw_gate_;
  std::unique_ptr<HandGate> select_gate_;
  Board board_;
  OcrDispatcher ocr_;
  RgbImage last_render_;
  std::vector<StageTimings> timings_;
  std::vector<Command> commands_;
  std::optional<std::int64_t> last_index_;
};

struct RunResult {
  SessionStats stats;
  std::vector<BoardEvent> events;
  std::vector<StepResult> steps;  // events are moved into `events`
  Board board;
};

// Steps the session through every frame of the source.
RunResult run(Session& session, FrameSource& source);

std::string stats_json(const SessionStats& stats, int indent = 2);
std::string events_json(std::span<const BoardEvent> events, int indent = 2);

}  // namespace airboard
