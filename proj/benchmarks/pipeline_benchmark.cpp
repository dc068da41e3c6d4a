#include <random>

#include <benchmark/benchmark.h>

#include "airboard/engine.hpp"
#include "airboard/handgate.hpp"
#include "airboard/segmentation.hpp"
#include "airboard/trace.hpp"

namespace airboard {
namespace {

GrayImage noise_image(int w, int h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> v(0, 255);
  GrayImage img(w, h);
  for (auto& p : img.data()) p = static_cast<std::uint8_t>(v(rng));
  return img;
}

// Full per-frame pipeline on a blob moving through the draw ROI.
void BM_Step(benchmark::State& state) {
  SyntheticSpec spec;
  spec.warmup = 100;
  spec.frames = 400;
  spec.draw.segments.push_back({300, {{30, 40}, {170, 60}, {100, 180}}});
  std::vector<Frame> frames;
  for (int i = 0; i < spec.frames; ++i) frames.push_back({i, synthesize_frame(spec, i), 0.0});

  SessionConfig config;
  config.ocr.kind = "mock";
  Session session(config);
  std::int64_t index = 0;
  for (int i = 0; i < spec.warmup; ++i) session.step({index++, frames[i].image, 0.0});
  int k = spec.warmup;
  for (auto _ : state) {
    benchmark::DoNotOptimize(session.step({index++, frames[k].image, 0.0}));
    if (++k == spec.frames) k = spec.warmup;
  }
}
BENCHMARK(BM_Step)->Unit(benchmark::kMillisecond);

void BM_ExtractContours(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::mt19937 rng(3);
  std::bernoulli_distribution on(0.3);
  BinaryMask mask(side, side);
  for (auto& p : mask.data()) p = on(rng) ? 1 : 0;
  for (auto _ : state) benchmark::DoNotOptimize(extract_contours(mask));
}
BENCHMARK(BM_ExtractContours)->Arg(16)->Arg(64)->Arg(200);

void BM_Integral(benchmark::State& state) {
  const GrayImage img = noise_image(200, 200, 5);
  for (auto _ : state) benchmark::DoNotOptimize(integral(img));
}
BENCHMARK(BM_Integral);

void BM_Detect(benchmark::State& state) {
  CascadeModel model;
  model.window_w = model.window_h = 24;
  const HaarFeature edge{{{Rect{0, 0, 12, 24}, 1.0}, {Rect{12, 0, 24, 24}, -1.0}}};
  const HaarFeature centre{{{Rect{6, 6, 18, 18}, 4.0}, {Rect{0, 0, 24, 24}, -1.0}}};
  model.stages.push_back({{{edge, 4000.0, 1.0, 0.0}}, 1.0});
  model.stages.push_back({{{centre, 8000.0, 1.0, 0.0}}, 1.0});
  const GrayImage img = noise_image(200, 200, 9);
  const int stride = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(detect(model, img, stride));
}
BENCHMARK(BM_Detect)->Arg(1)->Arg(4);

}  // namespace
}  // namespace airboard

BENCHMARK_MAIN();
