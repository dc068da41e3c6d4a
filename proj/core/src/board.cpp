#include "airboard/board.hpp"

#include <algorithm>
#include <cctype>

#include "airboard/font.hpp"
#include "airboard/ppm.hpp"

namespace airboard {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Clear: return "Clear";
    case Mode::Color: return "Color";
    case Mode::Detect: return "Detect";
    case Mode::Draw: return "Draw";
    case Mode::Erase: return "Erase";
    case Mode::Move: return "Move";
    case Mode::Save: return "Save";
  }
  return "Move";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : kAllModes) {
    const auto candidate = mode_name(m);
    if (candidate.size() != name.size()) continue;
    bool equal = true;
    for (std::size_t i = 0; i < name.size() && equal; ++i) {
      equal = std::tolower(static_cast<unsigned char>(name[i])) ==
              std::tolower(static_cast<unsigned char>(candidate[i]));
    }
    if (equal) return m;
  }
  return std::nullopt;
}

bool is_one_shot(Mode m) {
  return m == Mode::Clear || m == Mode::Color || m == Mode::Detect || m == Mode::Save;
}

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::ModeChanged: return "ModeChanged";
    case EventKind::Cleared: return "Cleared";
    case EventKind::Saved: return "Saved";
    case EventKind::DetectRequested: return "DetectRequested";
    case EventKind::ColorChanged: return "ColorChanged";
    case EventKind::DetectResult: return "DetectResult";
    case EventKind::DetectFailed: return "DetectFailed";
    case EventKind::Busy: return "Busy";
  }
  return "Unknown";
}

CanvasPoint map_to_canvas(RoiPoint p, const Rect& roi, const Rect& frame) {
  const long long rw = roi.width();
  const long long rh = roi.height();
  if (rw <= 0 || rh <= 0) throw BoundsError("map_to_canvas: degenerate roi");
  if (p.x < 0 || p.y < 0 || p.x > rw || p.y > rh) {
    throw BoundsError("map_to_canvas: point outside roi extent");
  }
  // Operands are non-negative, so integer division is floor.
  const long long cx = static_cast<long long>(frame.width()) * p.x / rw;
  const long long cy = static_cast<long long>(frame.height()) * p.y / rh;
  return {static_cast<int>(cx), static_cast<int>(cy)};
}

std::vector<VuiRegion> make_vui_layout(int canvas_width, int strip_height) {
  std::vector<VuiRegion> out;
  const int n = static_cast<int>(kAllModes.size());
  for (int i = 0; i < n; ++i) {
    const int x0 = i * canvas_width / n;
    const int x1 = (i + 1) * canvas_width / n;
    std::string label(mode_name(kAllModes[i]));
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    out.push_back({Rect{x0, 0, x1, strip_height}, kAllModes[i], std::move(label)});
  }
  return out;
}

Board::Board(BoardConfig config)
    : config_(std::move(config)), canvas_(config_.width, config_.height, 255) {
  if (config_.vui_height < 1 || config_.vui_height >= config_.height) {
    throw ConfigError("board: VUI strip must be shorter than the canvas");
  }
  if (config_.dwell_frames < 1) throw ConfigError("board: dwell_frames must be >= 1");
  if (config_.pointer_diameter < 1) throw ConfigError("board: pointer_diameter must be >= 1");
  if (config_.palette.empty()) throw ConfigError("board: palette is empty");
  vui_ = make_vui_layout(config_.width, config_.vui_height);
}

const VuiRegion* Board::hit_test(CanvasPoint c) const {
  for (const auto& r : vui_) {
    if (r.rect.contains(c)) return &r;
  }
  return nullptr;
}

CanvasPoint Board::clamp(CanvasPoint c) const {
  return {std::clamp(c.x, 0, config_.width - 1), std::clamp(c.y, 0, config_.height - 1)};
}

std::vector<BoardEvent> Board::hover(std::optional<CanvasPoint> c, std::int64_t frame_index) {
  const VuiRegion* region = c ? hit_test(*c) : nullptr;
  if (region == nullptr) {
    dwell_index_ = -1;
    dwell_count_ = 0;
    return {};
  }
  const int index = static_cast<int>(region - vui_.data());
  if (index == dwell_index_) {
    ++dwell_count_;
  } else {
    dwell_index_ = index;
    dwell_count_ = 1;
  }
  // Fires once per continuous hover; the count keeps rising afterwards.
  if (dwell_count_ != config_.dwell_frames) return {};
  return activate(region->mode, frame_index);
}

void Board::paint(std::optional<CanvasPoint> c) {
  if (!c) return;
  if (mode_ != Mode::Draw && mode_ != Mode::Erase) return;
  const Rgb color = mode_ == Mode::Draw ? draw_color() : kWhite;
  stamp_disc(canvas_, clamp(*c), config_.pointer_diameter, color, drawing_area());
}

std::vector<BoardEvent> Board::step_pointer(std::optional<CanvasPoint> c,
                                            std::int64_t frame_index) {
  if (c && hit_test(*c) != nullptr) return hover(c, frame_index);
  hover(std::nullopt, frame_index);
  paint(c);
  return {};
}

std::vector<BoardEvent> Board::activate(Mode m, std::int64_t frame_index) {
  std::vector<BoardEvent> events;
  mode_ = m;
  events.push_back({.kind = EventKind::ModeChanged, .frame_index = frame_index, .mode = m});

  switch (m) {
    case Mode::Clear:
      canvas_ = RgbImage(config_.width, config_.height, 255);
      events.push_back({.kind = EventKind::Cleared, .frame_index = frame_index});
      break;
    case Mode::Color:
      palette_index_ = (palette_index_ + 1) % static_cast<int>(config_.palette.size());
      events.push_back(
          {.kind = EventKind::ColorChanged, .frame_index = frame_index, .color = draw_color()});
      break;
    case Mode::Save: {
      auto image = std::make_shared<const RgbImage>(content());
      const std::string name = "canvas-" + std::to_string(frame_index) + ".ppm";
      if (config_.save_dir) write_ppm(*config_.save_dir / name, *image);
      events.push_back({.kind = EventKind::Saved,
                        .frame_index = frame_index,
                        .path = name,
                        .image = std::move(image)});
      break;
    }
    case Mode::Detect:
      events.push_back({.kind = EventKind::DetectRequested,
                        .frame_index = frame_index,
                        .region = drawing_area(),
                        .image = std::make_shared<const RgbImage>(content())});
      break;
    case Mode::Draw:
    case Mode::Erase:
    case Mode::Move:
      break;
  }
  if (is_one_shot(m)) mode_ = Mode::Move;
  return events;
}

std::vector<BoardEvent> Board::set_color(int index, std::int64_t frame_index) {
  if (index < 0 || index >= static_cast<int>(config_.palette.size())) {
    throw ConfigError("board: palette index out of range");
  }
  palette_index_ = index;
  return {{.kind = EventKind::ColorChanged, .frame_index = frame_index, .color = draw_color()}};
}

RgbImage Board::content() const { return crop(canvas_, drawing_area()); }

namespace {

constexpr Rgb kStripColor{232, 232, 232};
constexpr Rgb kButtonBorder{90, 90, 90};
constexpr Rgb kActiveFill{255, 214, 102};
constexpr Rgb kLabelColor{20, 20, 20};
constexpr Rgb kDwellBar{0, 150, 136};
constexpr Rgb kSelectPointer{255, 128, 0};
constexpr Rgb kMovePointer{30, 110, 230};
constexpr Rgb kErasePointer{150, 150, 150};

}  // namespace

RgbImage Board::render(std::optional<CanvasPoint> draw_pointer,
                       std::optional<CanvasPoint> select_pointer) const {
  RgbImage out = canvas_;
  fill_rect(out, {0, 0, config_.width, config_.vui_height}, kStripColor);

  const int label_scale = config_.vui_height >= 30 ? 2 : 1;
  for (std::size_t i = 0; i < vui_.size(); ++i) {
    const auto& region = vui_[i];
    if (region.mode == mode_) fill_rect(out, region.rect, kActiveFill);
    outline_rect(out, region.rect, kButtonBorder);

    const int tw = text_width(region.label, label_scale);
    const int th = kGlyphHeight * label_scale;
    draw_text(out,
              {region.rect.x0 + (region.rect.width() - tw) / 2,
               region.rect.y0 + (region.rect.height() - th) / 2},
              region.label, label_scale, kLabelColor);

    if (region.mode == Mode::Color) {
      fill_rect(out, {region.rect.x0 + 4, region.rect.y0 + 4, region.rect.x0 + 12,
                      region.rect.y0 + 12},
                draw_color());
    }
    if (static_cast<int>(i) == dwell_index_ && dwell_count_ > 0) {
      const int filled = region.rect.width() * std::min(dwell_count_, config_.dwell_frames) /
                         config_.dwell_frames;
      fill_rect(out, {region.rect.x0, region.rect.y1 - 4, region.rect.x0 + filled, region.rect.y1},
                kDwellBar);
    }
  }

  if (select_pointer) stamp_disc(out, clamp(*select_pointer), 10, kSelectPointer);
  if (draw_pointer) {
    const Rgb c = mode_ == Mode::Draw    ? draw_color()
                  : mode_ == Mode::Erase ? kErasePointer
                                         : kMovePointer;
    stamp_disc(out, clamp(*draw_pointer), config_.pointer_diameter + 6, c);
  }
  return out;
}

}  // namespace airboard
