#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "airboard/image.hpp"

namespace airboard {

struct Frame {
  std::int64_t index = 0;
  RgbImage image;
  double timestamp_ms = 0.0;
};

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  // nullopt at end of stream.
  virtual std::optional<Frame> next() = 0;
  virtual int width() const = 0;
  virtual int height() const = 0;
  virtual double fps() const = 0;
};

// Replays a directory holding manifest.json
//   {"width": 720, "height": 420, "fps": 28, "frames": ["f000000.ppm", ...]}
// and the listed P6 frames.
class TraceDirSource final : public FrameSource {
 public:
  // Throws IoError when the manifest is missing, ParseError when malformed.
  explicit TraceDirSource(std::filesystem::path dir);

  std::optional<Frame> next() override;
  int width() const override { return width_; }
  int height() const override { return height_; }
  double fps() const override { return fps_; }
  std::size_t size() const { return files_.size(); }

 private:
  std::filesystem::path dir_;
  int width_ = 0;
  int height_ = 0;
  double fps_ = 0.0;
  std::vector<std::string> files_;
  std::size_t cursor_ = 0;
};

// One stretch of a blob path. The blob centre moves linearly between
// consecutive waypoints with the stretch's frames spread evenly over the
// legs; no waypoints means the blob is absent for the stretch.
struct BlobSegment {
  int frames = 0;
  std::vector<Point> waypoints;  // ROI coordinates
};

struct BlobTrack {
  std::vector<BlobSegment> segments;
};

// Parameters of a generated trace. Frames [0, warmup) show only background;
// from frame `warmup` on, each ROI shows a filled disc that follows its
// track. With noise > 0 every pixel gets a uniform offset in
// [-noise, +noise] drawn from an mt19937_64 seeded per frame.
struct SyntheticSpec {
  int width = 720;
  int height = 420;
  double fps = 28.0;
  int frames = 0;
  int warmup = 100;
  std::uint8_t background = 60;
  std::uint8_t blob_intensity = 200;
  int blob_radius = 8;
  int noise = 0;
  std::uint64_t seed = 0;
  Rect roi_select{290, 210, 490, 410};
  Rect roi_draw{510, 210, 710, 410};
  BlobTrack select;
  BlobTrack draw;

  // Throws ConfigError for inconsistent counts or waypoints outside an ROI.
  void validate() const;
};

// Reads the JSON form. A track may be given as {"waypoints": [[x, y], ...]}
// (one segment spanning every active frame) or as
// {"segments": [{"frames": n, "waypoints": [...]}, ...]}. `default_seed`
// applies when the document has no "seed".
SyntheticSpec parse_synthetic_spec(std::string_view json_text, std::uint64_t default_seed = 0);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);
std::string synthetic_spec_json(const SyntheticSpec& spec);

// Blob centre for active frame k (0-based after warmup), or nullopt when the
// track has no blob there. Coordinates are rounded half up.
std::optional<Point> blob_center(const BlobTrack& track, int k);

// Renders frame `index` of the spec.
RgbImage synthesize_frame(const SyntheticSpec& spec, int index);

class SyntheticSource final : public FrameSource {
 public:
  explicit SyntheticSource(SyntheticSpec spec);
  std::optional<Frame> next() override;
  int width() const override { return spec_.width; }
  int height() const override { return spec_.height; }
  double fps() const override { return spec_.fps; }

 private:
  SyntheticSpec spec_;
  int cursor_ = 0;
};

// Restarts the wrapped source whenever it ends; frame indices keep
// increasing across restarts.
class LoopingSource final : public FrameSource {
 public:
  explicit LoopingSource(std::function<std::unique_ptr<FrameSource>()> factory);
  std::optional<Frame> next() override;
  int width() const override { return inner_->width(); }
  int height() const override { return inner_->height(); }
  double fps() const override { return inner_->fps(); }

 private:
  std::function<std::unique_ptr<FrameSource>()> factory_;
  std::unique_ptr<FrameSource> inner_;
  std::int64_t next_index_ = 0;
};

std::unique_ptr<FrameSource> open_trace(const std::filesystem::path& dir);
std::unique_ptr<FrameSource> open_synthetic(const SyntheticSpec& spec);

// Writes manifest.json and f%06d.ppm frames into out_dir (created if needed).
void write_trace(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

}  // namespace airboard
