#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "airboard/image.hpp"

namespace airboard {

struct WeightedRect {
  Rect rect;  // relative to the detection window origin
  double weight = 1.0;
};

// Feature value = sum over rects of weight * (pixel sum over rect).
struct HaarFeature {
  std::vector<WeightedRect> rects;
};

// Decision stump: votes `above` when the feature value is strictly greater
// than `threshold`, otherwise `below`.
struct WeakClassifier {
  HaarFeature feature;
  double threshold = 0.0;
  double above = 0.0;
  double below = 0.0;
};

struct CascadeStage {
  std::vector<WeakClassifier> classifiers;
  double threshold = 0.0;  // stage passes iff vote sum >= threshold
};

struct CascadeModel {
  int window_w = 0;
  int window_h = 0;
  std::vector<CascadeStage> stages;
};

// Parses the JSON cascade format:
//
//   {"window": [w, h],
//    "stages": [{"threshold": s,
//                "classifiers": [{"rects": [{"x":..,"y":..,"w":..,"h":..,"weight":..}],
//                                 "threshold": t, "above": a, "below": b}]}]}
//
// Throws ParseError on malformed JSON or missing fields and ConfigError on
// structural violations (no stages, empty stage, 0 or >4 rects, rect outside
// the window).
CascadeModel load_cascade(std::string_view json_text);
CascadeModel load_cascade_file(const std::filesystem::path& path);
std::string dump_cascade(const CascadeModel& model);

double feature_value(const HaarFeature& f, const IntegralImage& ii, Point origin);

// Runs every stage on the window anchored at `origin`. Throws BoundsError if
// the window leaves the image.
bool eval_window(const CascadeModel& model, const IntegralImage& ii, Point origin);

// Single-scale sliding-window scan with the given stride; true as soon as any
// window passes. Throws BoundsError if roi is smaller than the window and
// ConfigError if stride < 1.
bool detect(const CascadeModel& model, const GrayImage& roi, int stride);

inline constexpr int kDefaultGateStride = 4;

// Hand-presence gate applied to an ROI before segmentation.
class HandGate {
 public:
  virtual ~HandGate() = default;
  virtual bool present(const GrayImage& roi, std::int64_t frame_index) = 0;
  virtual std::string name() const = 0;
};

class PassThroughGate final : public HandGate {
 public:
  bool present(const GrayImage&, std::int64_t) override { return true; }
  std::string name() const override { return "pass"; }
};

class CascadeGate final : public HandGate {
 public:
  CascadeGate(CascadeModel model, int stride);
  bool present(const GrayImage& roi, std::int64_t frame_index) override;
  std::string name() const override { return "cascade"; }
  const CascadeModel& model() const { return model_; }

 private:
  CascadeModel model_;
  int stride_;
};

// Test gate whose answer is a function of the frame index.
class ScriptedGate final : public HandGate {
 public:
  explicit ScriptedGate(std::function<bool(std::int64_t)> script) : script_(std::move(script)) {}
  bool present(const GrayImage&, std::int64_t frame_index) override { return script_(frame_index); }
  std::string name() const override { return "scripted"; }

 private:
  std::function<bool(std::int64_t)> script_;
};

}  // namespace airboard
