#pragma once

#include <cstdint>

#include "airboard/image.hpp"

namespace airboard {

// Running-average background for one ROI.
//
// The first accumulated frame seeds the accumulator; every later frame is
// blended as
//
//   acc(x, y) = (1 - alpha) * acc(x, y) + alpha * src(x, y)
//
// until `warmup_frames` frames have been seen. After that the model is
// frozen: it only serves as the reference for residual masks and rejects
// further accumulation.
class BackgroundModel {
 public:
  static constexpr double kDefaultAlpha = 0.8;
  static constexpr int kDefaultWarmupFrames = 100;
  static constexpr std::uint8_t kDefaultThreshold = 15;

  // Throws ConfigError unless 0 < alpha <= 1 and warmup_frames >= 1.
  BackgroundModel(int width, int height, double alpha = kDefaultAlpha,
                  int warmup_frames = kDefaultWarmupFrames);

  // Throws StateError when frozen, DimensionError on size mismatch.
  void accumulate(const GrayImage& src);

  // threshold_binary(abs_diff(live, round(accumulator)), t). Throws
  // StateError until the model is frozen.
  BinaryMask residual_mask(const GrayImage& live, std::uint8_t t) const;

  bool frozen() const { return frames_seen_ >= warmup_frames_; }
  bool ready() const { return frozen(); }
  int frames_seen() const { return frames_seen_; }
  int warmup_frames() const { return warmup_frames_; }
  double alpha() const { return alpha_; }
  int width() const { return accumulator_.width(); }
  int height() const { return accumulator_.height(); }
  const FloatImage& accumulator() const { return accumulator_; }

 private:
  FloatImage accumulator_;
  double alpha_;
  int warmup_frames_;
  int frames_seen_ = 0;
};

}  // namespace airboard
