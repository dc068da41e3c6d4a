#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "airboard/image.hpp"
#include "airboard/segmentation.hpp"

namespace airboard {

using CanvasPoint = Point;

// Pointer operation modes, in VUI button order.
enum class Mode { Clear, Color, Detect, Draw, Erase, Move, Save };

inline constexpr std::array<Mode, 7> kAllModes = {Mode::Clear, Mode::Color, Mode::Detect,
                                                  Mode::Draw,  Mode::Erase, Mode::Move,
                                                  Mode::Save};

std::string_view mode_name(Mode m);
// Case-insensitive; nullopt for unknown names.
std::optional<Mode> parse_mode(std::string_view name);
// Clear, Color, Detect and Save run once and hand control back to Move.
bool is_one_shot(Mode m);

struct VuiRegion {
  Rect rect;
  Mode mode;
  std::string label;
};

enum class EventKind {
  ModeChanged,
  Cleared,
  Saved,
  DetectRequested,
  ColorChanged,
  // Raised by the session once OCR finishes or is refused.
  DetectResult,
  DetectFailed,
  Busy,
};

std::string_view event_kind_name(EventKind k);

struct BoardEvent {
  EventKind kind = EventKind::ModeChanged;
  std::int64_t frame_index = 0;
  Mode mode = Mode::Move;            // ModeChanged
  Rgb color{};                       // ColorChanged
  std::string path;                  // Saved: file name relative to the save directory
  std::string text;                  // DetectResult text, DetectFailed/Busy reason
  std::optional<double> confidence;  // DetectResult
  double elapsed_ms = 0.0;           // DetectResult
  Rect region{};                     // DetectRequested: canvas region handed to OCR
  // Saved / DetectRequested: canvas content without the VUI strip.
  std::shared_ptr<const RgbImage> image;
};

struct BoardConfig {
  int width = 720;
  int height = 420;
  int vui_height = 40;
  int dwell_frames = 15;
  int pointer_diameter = 4;
  std::vector<Rgb> palette = {{0, 0, 0}, {255, 0, 0}, {0, 255, 0}, {0, 0, 255}};
  // When set, Save writes canvas-<frame_index>.ppm here.
  std::optional<std::filesystem::path> save_dir;
};

// Maps a pointer in ROI coordinates onto the frame/canvas:
//
//   c_x = floor((f_x1 - f_x0) / (r_x1 - r_x0) * r_x), likewise for y.
//
// Evaluated in exact integer arithmetic. Throws BoundsError if p lies outside
// [0, roi.width()] x [0, roi.height()].
CanvasPoint map_to_canvas(RoiPoint p, const Rect& roi, const Rect& frame);

// Equal-width buttons, one per mode, across a strip of the given height at
// the top of a canvas of the given width.
std::vector<VuiRegion> make_vui_layout(int canvas_width, int strip_height);

// Canvas, VUI and the mode state machine.
//
// Two pointer inputs drive a board. The select pointer only hovers: keeping
// it over one VUI button for `dwell_frames` consecutive frames activates that
// button's mode. The draw pointer only acts on the canvas according to the
// active mode: Draw stamps a disc in the draw colour, Erase stamps white,
// every other mode leaves the canvas alone. Strokes are clipped to the area
// below the VUI strip.
class Board {
 public:
  explicit Board(BoardConfig config = {});

  const BoardConfig& config() const { return config_; }
  const RgbImage& canvas() const { return canvas_; }
  const std::vector<VuiRegion>& vui() const { return vui_; }
  Mode active_mode() const { return mode_; }
  Rgb draw_color() const { return config_.palette[palette_index_]; }
  int palette_index() const { return palette_index_; }
  Rect frame_rect() const { return canvas_.extent(); }
  Rect drawing_area() const { return {0, config_.vui_height, config_.width, config_.height}; }
  const VuiRegion* dwell_region() const { return dwell_index_ < 0 ? nullptr : &vui_[dwell_index_]; }
  int dwell_count() const { return dwell_count_; }

  const VuiRegion* hit_test(CanvasPoint c) const;

  // Select-pointer input. Returns the events of a completed dwell, if any.
  std::vector<BoardEvent> hover(std::optional<CanvasPoint> c, std::int64_t frame_index);

  // Draw-pointer input.
  void paint(std::optional<CanvasPoint> c);

  // Single-pointer form: over the VUI the pointer hovers, elsewhere it paints
  // (and any dwell in progress is reset).
  std::vector<BoardEvent> step_pointer(std::optional<CanvasPoint> c, std::int64_t frame_index);

  // Activates a mode as if its button had been dwelled on.
  std::vector<BoardEvent> activate(Mode m, std::int64_t frame_index);

  // Selects a palette entry directly. Throws ConfigError for a bad index.
  std::vector<BoardEvent> set_color(int index, std::int64_t frame_index);

  // Canvas without the VUI strip; what Save persists and Detect reads.
  RgbImage content() const;

  // Canvas + VUI strip + pointer overlays. Pure function of the board state
  // and its arguments.
  RgbImage render(std::optional<CanvasPoint> draw_pointer,
                  std::optional<CanvasPoint> select_pointer = std::nullopt) const;

 private:
  CanvasPoint clamp(CanvasPoint c) const;

  BoardConfig config_;
  RgbImage canvas_;
  std::vector<VuiRegion> vui_;
  Mode mode_ = Mode::Move;
  int palette_index_ = 0;
  int dwell_index_ = -1;
  int dwell_count_ = 0;
};

}  // namespace airboard
