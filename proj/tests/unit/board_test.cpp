#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "airboard/board.hpp"
#include "airboard/ppm.hpp"
#include "oracles.hpp"

namespace airboard {
namespace {

const Rect kRoi{0, 0, 200, 200};
const Rect kFrame{0, 0, 720, 420};

CanvasPoint centre_of(const Board& b, Mode m) {
  for (const auto& r : b.vui())
    if (r.mode == m) return {(r.rect.x0 + r.rect.x1) / 2, (r.rect.y0 + r.rect.y1) / 2};
  return {-1, -1};
}

void dwell(Board& b, Mode m, std::int64_t& frame) {
  for (int i = 0; i < b.config().dwell_frames; ++i) b.hover(centre_of(b, m), frame++);
  b.hover(std::nullopt, frame++);
}

std::set<std::pair<int, int>> inked(const RgbImage& img) {
  std::set<std::pair<int, int>> s;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (pixel(img, x, y) != kWhite) s.insert({x, y});
  return s;
}

TEST(Mapping, Examples) {
  EXPECT_EQ(map_to_canvas({100, 100}, kRoi, kFrame), (CanvasPoint{360, 210}));
  EXPECT_EQ(map_to_canvas({0, 0}, kRoi, kFrame), (CanvasPoint{0, 0}));
  EXPECT_EQ(map_to_canvas({200, 200}, kRoi, kFrame), (CanvasPoint{720, 420}));
  EXPECT_EQ(map_to_canvas({100, 92}, kRoi, kFrame), (CanvasPoint{360, 193}));
  EXPECT_THROW(map_to_canvas({201, 0}, kRoi, kFrame), BoundsError);
  EXPECT_THROW(map_to_canvas({0, -1}, kRoi, kFrame), BoundsError);
}

TEST(Mapping, RandomPointsMatchRationalOracle) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> c(0, 200);
  for (int i = 0; i < 1000; ++i) {
    const Point p{c(rng), c(rng)};
    ASSERT_EQ(map_to_canvas(p, kRoi, kFrame), oracle::map_oracle(p, kRoi, kFrame));
  }
  const Rect odd{290, 210, 427, 363};
  std::uniform_int_distribution<int> cx(0, odd.width()), cy(0, odd.height());
  for (int i = 0; i < 1000; ++i) {
    const Point p{cx(rng), cy(rng)};
    ASSERT_EQ(map_to_canvas(p, odd, kFrame), oracle::map_oracle(p, odd, kFrame));
  }
}

TEST(Mapping, Monotone) {
  for (int x = 1; x <= 200; ++x) {
    EXPECT_LE(map_to_canvas({x - 1, 0}, kRoi, kFrame).x, map_to_canvas({x, 0}, kRoi, kFrame).x);
    EXPECT_LE(map_to_canvas({0, x - 1}, kRoi, kFrame).y, map_to_canvas({0, x}, kRoi, kFrame).y);
  }
}

TEST(Vui, LayoutIsDisjointOrderedStrip) {
  const auto vui = make_vui_layout(720, 40);
  ASSERT_EQ(vui.size(), 7u);
  for (std::size_t i = 0; i < vui.size(); ++i) {
    EXPECT_EQ(vui[i].mode, kAllModes[i]);
    EXPECT_EQ(vui[i].rect.y0, 0);
    EXPECT_EQ(vui[i].rect.y1, 40);
    if (i > 0) {
      EXPECT_EQ(vui[i].rect.x0, vui[i - 1].rect.x1);
    }
  }
  EXPECT_EQ(vui.front().rect.x0, 0);
  EXPECT_EQ(vui.back().rect.x1, 720);
  EXPECT_EQ(vui.front().label, "CLEAR");
}

TEST(Vui, HitTestEdges) {
  const Board b;
  const auto& clear = b.vui()[0].rect;
  ASSERT_NE(b.hit_test({5, 5}), nullptr);
  EXPECT_EQ(b.hit_test({5, 5})->mode, Mode::Clear);
  EXPECT_EQ(b.hit_test({300, 200}), nullptr);
  EXPECT_EQ(b.hit_test({clear.x0, clear.y0})->mode, Mode::Clear);
  EXPECT_EQ(b.hit_test({clear.x1, clear.y1}), nullptr);
  EXPECT_EQ(b.hit_test({clear.x1, 0})->mode, Mode::Color);
  EXPECT_EQ(b.hit_test({719, 40}), nullptr);
  EXPECT_EQ(b.hit_test({719, 39})->mode, Mode::Save);
}

TEST(Board, InitialState) {
  const Board b;
  EXPECT_EQ(b.canvas(), RgbImage(720, 420, 255));
  EXPECT_EQ(b.active_mode(), Mode::Move);
  EXPECT_EQ(b.draw_color(), kBlack);
  EXPECT_EQ(b.config().pointer_diameter, 4);
  EXPECT_EQ(b.config().dwell_frames, 15);
}

TEST(Board, DwellRule) {
  Board b;
  b.activate(Mode::Draw, 0);
  b.paint(CanvasPoint{100, 100});
  const RgbImage drawn = b.canvas();

  Board short_hover = b;
  for (int i = 0; i < 14; ++i) EXPECT_TRUE(short_hover.hover(CanvasPoint{20, 20}, i).empty());
  EXPECT_EQ(short_hover.canvas(), drawn);
  EXPECT_EQ(short_hover.active_mode(), Mode::Draw);

  std::vector<BoardEvent> events;
  for (int i = 0; i < 15; ++i) {
    auto ev = b.hover(CanvasPoint{20, 20}, 100 + i);
    events.insert(events.end(), ev.begin(), ev.end());
  }
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].kind, EventKind::ModeChanged);
  EXPECT_EQ(events[0].mode, Mode::Clear);
  EXPECT_EQ(events[0].frame_index, 114);
  EXPECT_EQ(events[1].kind, EventKind::Cleared);
  EXPECT_EQ(b.canvas(), RgbImage(720, 420, 255));
  EXPECT_EQ(b.active_mode(), Mode::Move);

  // Continued hovering does not fire again.
  for (int i = 0; i < 40; ++i) EXPECT_TRUE(b.hover(CanvasPoint{20, 20}, 200 + i).empty());
}

TEST(Board, DwellResetsWhenRegionChangesOrPointerLeaves) {
  Board b;
  const auto draw = centre_of(b, Mode::Draw), erase = centre_of(b, Mode::Erase);
  for (int round = 0; round < 5; ++round) {
    for (int i = 0; i < 10; ++i) EXPECT_TRUE(b.hover(draw, 0).empty());
    for (int i = 0; i < 10; ++i) EXPECT_TRUE(b.hover(erase, 0).empty());
    for (int i = 0; i < 14; ++i) EXPECT_TRUE(b.hover(draw, 0).empty());
    EXPECT_TRUE(b.hover(std::nullopt, 0).empty());
    EXPECT_TRUE(b.hover(CanvasPoint{300, 300}, 0).empty());
  }
  EXPECT_EQ(b.active_mode(), Mode::Move);
}

TEST(Board, DrawStampsOracleDisc) {
  Board b;
  b.activate(Mode::Draw, 0);
  b.paint(CanvasPoint{360, 210});
  EXPECT_EQ(inked(b.canvas()), oracle::disc_pixels(720, 420, {360, 210}, 4));
  for (const auto& [x, y] : inked(b.canvas())) EXPECT_EQ(pixel(b.canvas(), x, y), kBlack);
}

TEST(Board, MoveAndOneShotModesDoNotPaint) {
  Board b;
  b.paint(CanvasPoint{360, 210});
  b.activate(Mode::Save, 0);
  b.paint(CanvasPoint{360, 210});
  EXPECT_EQ(b.canvas(), RgbImage(720, 420, 255));
}

TEST(Board, DrawThenEraseRestoresCanvas) {
  std::mt19937 rng(22);
  std::uniform_int_distribution<int> xs(-10, 730), ys(-10, 430);
  for (int trial = 0; trial < 20; ++trial) {
    Board b;
    std::vector<CanvasPoint> path;
    for (int i = 0; i < 40; ++i) path.push_back({xs(rng), ys(rng)});
    b.activate(Mode::Draw, 0);
    for (auto p : path) b.paint(p);
    b.activate(Mode::Erase, 1);
    for (auto p : path) b.paint(p);
    EXPECT_EQ(b.canvas(), RgbImage(720, 420, 255));
  }
}

TEST(Board, StrokesNeverTouchTheStrip) {
  Board b;
  b.activate(Mode::Draw, 0);
  for (int x = 0; x < 720; x += 3) b.paint(CanvasPoint{x, 41});
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 720; ++x) ASSERT_EQ(pixel(b.canvas(), x, y), kWhite);
  EXPECT_EQ(pixel(b.canvas(), 0, 40), kBlack);
  // The rendered strip is identical to a fresh board's.
  const RgbImage strip = crop(b.render(std::nullopt), {0, 0, 720, 40});
  Board fresh;
  fresh.activate(Mode::Draw, 0);
  EXPECT_EQ(strip, crop(fresh.render(std::nullopt), {0, 0, 720, 40}));
}

TEST(Board, BoundaryPointIsClampedAtDrawTime) {
  Board b;
  b.activate(Mode::Draw, 0);
  b.paint(map_to_canvas({200, 200}, kRoi, kFrame));
  EXPECT_EQ(inked(b.canvas()), oracle::disc_pixels(720, 420, {719, 419}, 4));
}

TEST(Board, ClearIsAbsorbing) {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> xs(0, 719), ys(40, 419);
  Board b;
  std::int64_t frame = 0;
  for (int round = 0; round < 3; ++round) {
    b.activate(Mode::Draw, frame++);
    for (int i = 0; i < 30; ++i) b.paint(CanvasPoint{xs(rng), ys(rng)});
    b.activate(Mode::Color, frame++);
    for (int i = 0; i < 30; ++i) b.paint(CanvasPoint{xs(rng), ys(rng)});
    b.activate(Mode::Clear, frame++);
    EXPECT_EQ(b.canvas(), RgbImage(720, 420, 255));
    b.activate(Mode::Clear, frame++);
    EXPECT_EQ(b.canvas(), RgbImage(720, 420, 255));
  }
}

TEST(Board, ColorCyclesPalette) {
  Board b;
  std::int64_t frame = 0;
  const std::vector<Rgb> expected = {{255, 0, 0}, {0, 255, 0}, {0, 0, 255}, {0, 0, 0}};
  for (const Rgb& c : expected) {
    b.activate(Mode::Draw, frame);
    dwell(b, Mode::Color, frame);
    EXPECT_EQ(b.draw_color(), c);
    EXPECT_EQ(b.active_mode(), Mode::Move);
  }
  EXPECT_EQ(b.set_color(2, 0).front().color, (Rgb{0, 255, 0}));
  EXPECT_THROW(b.set_color(4, 0), ConfigError);
}

TEST(Board, SaveWritesContentWithoutStrip) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "board_save";
  std::filesystem::create_directories(dir);
  BoardConfig cfg;
  cfg.save_dir = dir;
  Board b(cfg);
  b.activate(Mode::Draw, 0);
  b.paint(CanvasPoint{50, 60});
  const auto events = b.activate(Mode::Save, 77);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].kind, EventKind::Saved);
  EXPECT_EQ(events[1].path, "canvas-77.ppm");
  const RgbImage saved = read_ppm(dir / "canvas-77.ppm");
  EXPECT_EQ(saved.width(), 720);
  EXPECT_EQ(saved.height(), 380);
  EXPECT_EQ(saved, b.content());
  EXPECT_EQ(pixel(saved, 50, 20), kBlack);
  EXPECT_EQ(decode_ppm(encode_ppm(saved)), saved);
}

TEST(Board, DetectCarriesContent) {
  Board b;
  const auto events = b.activate(Mode::Detect, 3);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].kind, EventKind::DetectRequested);
  EXPECT_EQ(events[1].region, (Rect{0, 40, 720, 420}));
  ASSERT_TRUE(events[1].image);
  EXPECT_EQ(*events[1].image, RgbImage(720, 380, 255));
  EXPECT_EQ(b.active_mode(), Mode::Move);
}

TEST(Board, StepPointerRoutesBetweenStripAndCanvas) {
  Board b;
  b.activate(Mode::Draw, 0);
  std::vector<BoardEvent> events;
  for (int i = 0; i < 15; ++i) {
    auto ev = b.step_pointer(centre_of(b, Mode::Erase), i);
    events.insert(events.end(), ev.begin(), ev.end());
  }
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(b.active_mode(), Mode::Erase);
  b.step_pointer(CanvasPoint{100, 100}, 20);
  EXPECT_EQ(b.dwell_count(), 0);
  EXPECT_EQ(b.canvas(), RgbImage(720, 420, 255));
}

TEST(Board, RenderIsPureAndOverlaysAreNotPersisted) {
  Board b;
  b.activate(Mode::Draw, 0);
  b.paint(CanvasPoint{200, 200});
  const RgbImage before = b.canvas();
  const RgbImage r1 = b.render(CanvasPoint{300, 300}, CanvasPoint{100, 20});
  const RgbImage r2 = b.render(CanvasPoint{300, 300}, CanvasPoint{100, 20});
  EXPECT_EQ(r1, r2);
  EXPECT_EQ(b.canvas(), before);
  const RgbImage bare = b.render(std::nullopt);
  EXPECT_NE(bare, r1);
  EXPECT_EQ(pixel(bare, 300, 300), kWhite);
  EXPECT_EQ(crop(bare, b.drawing_area()), b.content());
}

TEST(Board, FreshRenderIsWhiteCanvasPlusStrip) {
  const Board b;
  const RgbImage r = b.render(std::nullopt);
  EXPECT_EQ(crop(r, b.drawing_area()), RgbImage(720, 380, 255));
  EXPECT_NE(crop(r, {0, 0, 720, 40}), RgbImage(720, 40, 255));
}

TEST(Board, ModeNames) {
  for (Mode m : kAllModes) EXPECT_EQ(parse_mode(mode_name(m)), m);
  EXPECT_EQ(parse_mode("dRaW"), Mode::Draw);
  EXPECT_FALSE(parse_mode("paint").has_value());
}

TEST(Board, ConfigValidation) {
  BoardConfig c;
  c.vui_height = 420;
  EXPECT_THROW(Board{c}, ConfigError);
  c = {};
  c.pointer_diameter = 0;
  EXPECT_THROW(Board{c}, ConfigError);
  c = {};
  c.palette.clear();
  EXPECT_THROW(Board{c}, ConfigError);
}

}  // namespace
}  // namespace airboard
