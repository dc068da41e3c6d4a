#include <filesystem>

#include <gtest/gtest.h>
#include <json.hpp>

#include "airboard/ppm.hpp"
#include "airboard/trace.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

namespace airboard {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::path(::testing::TempDir()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(TraceDir, ReadsFramesInOrder) {
  const auto dir = fresh_dir("trace_three");
  for (int i = 0; i < 3; ++i) {
    write_ppm(dir / ("f" + std::to_string(i) + ".ppm"), RgbImage(4, 2, static_cast<std::uint8_t>(i)));
  }
  write_file(dir / "manifest.json",
             std::string(R"({"width": 4, "height": 2, "fps": 10, "frames": ["f0.ppm", "f1.ppm", "f2.ppm"]})"));
  TraceDirSource src(dir);
  EXPECT_EQ(src.size(), 3u);
  EXPECT_EQ(src.fps(), 10.0);
  for (int i = 0; i < 3; ++i) {
    const auto f = src.next();
    ASSERT_TRUE(f.has_value());
    EXPECT_EQ(f->index, i);
    EXPECT_EQ(f->image, RgbImage(4, 2, static_cast<std::uint8_t>(i)));
    EXPECT_DOUBLE_EQ(f->timestamp_ms, 100.0 * i);
  }
  EXPECT_FALSE(src.next().has_value());
}

TEST(TraceDir, EmptyManifestEndsImmediately) {
  const auto dir = fresh_dir("trace_empty");
  write_file(dir / "manifest.json", std::string(R"({"width": 4, "height": 2, "frames": []})"));
  EXPECT_FALSE(TraceDirSource(dir).next().has_value());
}

TEST(TraceDir, Errors) {
  const auto dir = fresh_dir("trace_bad");
  EXPECT_THROW(TraceDirSource{dir}, IoError);
  write_file(dir / "manifest.json", std::string("{\"width\": 4}"));
  EXPECT_THROW(TraceDirSource{dir}, ParseError);
  write_file(dir / "manifest.json",
             std::string(R"({"width": 4, "height": 2, "frames": ["a.ppm", "b.ppm"]})"));
  write_ppm(dir / "a.ppm", RgbImage(5, 2));
  TraceDirSource src(dir);
  EXPECT_THROW(src.next(), ParseError);
}

TEST(Synthetic, FrameCountAndWarmupBackground) {
  SyntheticSpec spec;
  spec.frames = 10;
  spec.warmup = 5;
  spec.draw.segments.push_back({5, {{50, 50}}});
  SyntheticSource src(spec);
  int n = 0;
  while (auto f = src.next()) {
    EXPECT_EQ(f->index, n);
    if (n < 5) {
      EXPECT_EQ(f->image, RgbImage(720, 420, 60));
    }
    ++n;
  }
  EXPECT_EQ(n, 10);
}

TEST(Synthetic, DegenerateAndLinearPaths) {
  BlobTrack still{{{40, {{10, 10}, {10, 10}}}}};
  for (int k = 0; k < 40; ++k) EXPECT_EQ(blob_center(still, k), (Point{10, 10}));

  BlobTrack line{{{101, {{0, 0}, {100, 100}}}}};
  for (int k = 0; k <= 100; ++k) EXPECT_EQ(blob_center(line, k), (Point{k, k}));
  EXPECT_FALSE(blob_center(line, 101).has_value());
}

TEST(Synthetic, InterpolationMatchesRationalOracle) {
  const std::vector<Point> wps = {{20, 30}, {150, 47}, {33, 180}, {199, 0}};
  for (int n : {1, 2, 7, 40, 77}) {
    BlobTrack t{{{n, wps}}};
    for (int k = 0; k < n; ++k) ASSERT_EQ(blob_center(t, k), scene::centre_oracle(wps, n, k));
  }
}

TEST(Synthetic, SegmentsAndAbsence) {
  BlobTrack t{{{3, {}}, {2, {{5, 6}}}}};
  EXPECT_FALSE(blob_center(t, 0).has_value());
  EXPECT_EQ(blob_center(t, 3), (Point{5, 6}));
  EXPECT_FALSE(blob_center(t, 5).has_value());
}

TEST(Synthetic, BlobPixelsMatchDiscOracle) {
  SyntheticSpec spec;
  spec.frames = 20;
  spec.warmup = 10;
  spec.draw.segments.push_back({10, {{5, 100}, {195, 60}}});
  for (int index : {10, 14, 19}) {
    const RgbImage img = synthesize_frame(spec, index);
    const Point c = *blob_center(spec.draw, index - 10);
    const Point abs{spec.roi_draw.x0 + c.x, spec.roi_draw.y0 + c.y};
    std::set<std::pair<int, int>> expected;
    for (const auto& p : oracle::disc_pixels(720, 420, abs, 16))
      if (spec.roi_draw.contains({p.first, p.second})) expected.insert(p);
    std::set<std::pair<int, int>> got;
    for (int y = 0; y < 420; ++y)
      for (int x = 0; x < 720; ++x) {
        const Rgb p = pixel(img, x, y);
        ASSERT_TRUE(p == (Rgb{60, 60, 60}) || p == (Rgb{200, 200, 200}));
        if (p.r == 200) got.insert({x, y});
      }
    EXPECT_EQ(got, expected) << "frame " << index;
  }
}

TEST(Synthetic, NoiseIsSeededAndBounded) {
  SyntheticSpec spec;
  spec.frames = 3;
  spec.warmup = 3;
  spec.noise = 4;
  spec.seed = 99;
  const RgbImage a = synthesize_frame(spec, 1);
  EXPECT_EQ(a, synthesize_frame(spec, 1));
  EXPECT_NE(a, synthesize_frame(spec, 2));
  for (auto v : a.data()) {
    EXPECT_GE(v, 56);
    EXPECT_LE(v, 64);
  }
  spec.seed = 100;
  EXPECT_NE(a, synthesize_frame(spec, 1));
}

TEST(Synthetic, ValidationAndParsing) {
  EXPECT_THROW(parse_synthetic_spec(R"({"frames": 10, "warmup": 5, "draw": {"waypoints": [[250, 10]]}})"),
               ConfigError);
  EXPECT_THROW(parse_synthetic_spec(R"({"frames": 10, "warmup": 5,
      "draw": {"segments": [{"frames": 9, "waypoints": [[5, 5]]}]}})"),
               ConfigError);
  EXPECT_THROW(parse_synthetic_spec(R"({"frames": 10, "bogus": 1})"), ConfigError);
  EXPECT_THROW(parse_synthetic_spec("[1, 2"), ParseError);

  const SyntheticSpec s = parse_synthetic_spec(
      R"({"frames": 12, "warmup": 2, "noise": 3, "draw": {"waypoints": [[0, 0], [9, 9]]}})", 5);
  EXPECT_EQ(s.seed, 5u);
  ASSERT_EQ(s.draw.segments.size(), 1u);
  EXPECT_EQ(s.draw.segments[0].frames, 10);
  const SyntheticSpec again = parse_synthetic_spec(synthetic_spec_json(s));
  EXPECT_EQ(synthetic_spec_json(again), synthetic_spec_json(s));
}

TEST(Synthetic, WriteTraceIsDeterministic) {
  SyntheticSpec spec;
  spec.frames = 10;
  spec.warmup = 4;
  spec.noise = 2;
  spec.seed = 3;
  spec.draw.segments.push_back({6, {{30, 40}, {60, 90}}});
  const auto a = fresh_dir("write_a"), b = fresh_dir("write_b");
  write_trace(spec, a);
  write_trace(spec, b);
  const auto manifest = nlohmann::json::parse(std::string(
      reinterpret_cast<const char*>(read_file(a / "manifest.json").data()),
      read_file(a / "manifest.json").size()));
  ASSERT_EQ(manifest["frames"].size(), 10u);
  EXPECT_EQ(manifest["width"], 720);
  for (const auto& name : manifest["frames"]) {
    EXPECT_EQ(read_file(a / name.get<std::string>()), read_file(b / name.get<std::string>()));
  }
  TraceDirSource replay(a);
  SyntheticSource direct(spec);
  while (auto f = direct.next()) EXPECT_EQ(replay.next()->image, f->image);
}

TEST(Synthetic, LoopingKeepsIndicesIncreasing) {
  SyntheticSpec spec;
  spec.frames = 3;
  spec.warmup = 3;
  LoopingSource src([spec] { return open_synthetic(spec); });
  for (int i = 0; i < 10; ++i) EXPECT_EQ(src.next()->index, i);
}

}  // namespace
}  // namespace airboard
