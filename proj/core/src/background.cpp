#include "airboard/background.hpp"

#include <string>

namespace airboard {

BackgroundModel::BackgroundModel(int width, int height, double alpha, int warmup_frames)
    : accumulator_(width, height, 0.0), alpha_(alpha), warmup_frames_(warmup_frames) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("background alpha must be in (0, 1], got " + std::to_string(alpha));
  }
  if (warmup_frames < 1) {
    throw ConfigError("warmup_frames must be >= 1, got " + std::to_string(warmup_frames));
  }
}

void BackgroundModel::accumulate(const GrayImage& src) {
  if (frozen()) throw StateError("background model is frozen");
  if (!src.same_size(accumulator_)) throw DimensionError("background: frame size mismatch");

  auto acc = accumulator_.data();
  auto in = src.data();
  if (frames_seen_ == 0) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = in[i];
  } else {
    const double keep = 1.0 - alpha_;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = keep * acc[i] + alpha_ * in[i];
  }
  ++frames_seen_;
}

BinaryMask BackgroundModel::residual_mask(const GrayImage& live, std::uint8_t t) const {
  if (!frozen()) throw StateError("background model still warming up");
  return threshold_binary(abs_diff(live, accumulator_), t);
}

}  // namespace airboard
