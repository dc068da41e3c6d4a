#include "airboard/trace.hpp"

#include <cstdio>
#include <random>

#include "airboard/ppm.hpp"
#include "json_util.hpp"

namespace airboard {

using detail::json;

// ---------------------------------------------------------------------------
// Trace directories

TraceDirSource::TraceDirSource(std::filesystem::path dir) : dir_(std::move(dir)) {
  const auto manifest_path = dir_ / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    throw IoError("trace: missing manifest " + manifest_path.string());
  }
  const auto bytes = read_file(manifest_path);
  const json j = detail::parse_json(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), "manifest");
  if (!j.is_object() || !j.contains("width") || !j.contains("height") || !j.contains("frames")) {
    throw ParseError("manifest: width, height and frames are required");
  }
  detail::read_opt(j, "width", width_, "manifest");
  detail::read_opt(j, "height", height_, "manifest");
  fps_ = 28.0;
  detail::read_opt(j, "fps", fps_, "manifest");
  detail::read_opt(j, "frames", files_, "manifest");
  if (width_ <= 0 || height_ <= 0 || !(fps_ > 0.0)) throw ParseError("manifest: bad dimensions or fps");
}

std::optional<Frame> TraceDirSource::next() {
  if (cursor_ >= files_.size()) return std::nullopt;
  const auto index = static_cast<std::int64_t>(cursor_);
  RgbImage img = read_ppm(dir_ / files_[cursor_]);
  if (!img.same_size(width_, height_)) {
    throw ParseError("trace: frame " + files_[cursor_] + " does not match manifest size");
  }
  ++cursor_;
  return Frame{index, std::move(img), static_cast<double>(index) * 1000.0 / fps_};
}

// ---------------------------------------------------------------------------
// Synthetic traces

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// round_half_up((base * den + rem * delta) / den)
int lerp_round(int base, int delta, long long rem, long long den) {
  const long long numer = static_cast<long long>(base) * den + rem * delta;
  return static_cast<int>(floor_div(2 * numer + den, 2 * den));
}

void validate_track(const BlobTrack& t, const Rect& roi, int active, const char* name) {
  long long total = 0;
  for (const auto& seg : t.segments) {
    if (seg.frames < 0) throw ConfigError(std::string("synthetic: negative frame count in ") + name);
    total += seg.frames;
    for (const auto& p : seg.waypoints) {
      if (p.x < 0 || p.y < 0 || p.x >= roi.width() || p.y >= roi.height()) {
        throw ConfigError(std::string("synthetic: waypoint outside ROI in ") + name);
      }
    }
  }
  if (total > active) {
    throw ConfigError(std::string("synthetic: ") + name + " segments exceed the active frames");
  }
}

BlobTrack track_from_json(const json& j, int active, const char* name) {
  detail::reject_unknown_keys(j, {"waypoints", "segments"}, name);
  auto points = [&](const json& arr) {
    if (!arr.is_array()) throw ParseError(std::string(name) + ": waypoints must be an array");
    std::vector<Point> out;
    for (const auto& p : arr) out.push_back(detail::point_from_json(p, name));
    return out;
  };
  BlobTrack t;
  if (j.contains("waypoints") && j.contains("segments")) {
    throw ConfigError(std::string(name) + ": give waypoints or segments, not both");
  }
  if (j.contains("waypoints")) {
    t.segments.push_back({active, points(j["waypoints"])});
  } else if (j.contains("segments")) {
    if (!j["segments"].is_array()) throw ParseError(std::string(name) + ": segments must be an array");
    for (const auto& s : j["segments"]) {
      detail::reject_unknown_keys(s, {"frames", "waypoints"}, name);
      BlobSegment seg;
      detail::read_opt(s, "frames", seg.frames, name);
      if (s.contains("waypoints")) seg.waypoints = points(s["waypoints"]);
      t.segments.push_back(std::move(seg));
    }
  }
  return t;
}

json track_to_json(const BlobTrack& t) {
  json segments = json::array();
  for (const auto& seg : t.segments) {
    json wps = json::array();
    for (const auto& p : seg.waypoints) wps.push_back({p.x, p.y});
    segments.push_back({{"frames", seg.frames}, {"waypoints", wps}});
  }
  return {{"segments", segments}};
}

}  // namespace

void SyntheticSpec::validate() const {
  if (width <= 0 || height <= 0) throw ConfigError("synthetic: frame size must be positive");
  if (!(fps > 0.0)) throw ConfigError("synthetic: fps must be positive");
  if (frames < 0) throw ConfigError("synthetic: frames must be >= 0");
  if (warmup < 1 || warmup > frames) throw ConfigError("synthetic: need 1 <= warmup <= frames");
  if (blob_radius < 1) throw ConfigError("synthetic: blob_radius must be >= 1");
  if (noise < 0 || noise > 127) throw ConfigError("synthetic: noise must be 0-127");
  for (const Rect* r : {&roi_select, &roi_draw}) {
    if (r->x0 >= r->x1 || r->y0 >= r->y1 || !r->inside(width, height)) {
      throw ConfigError("synthetic: ROI outside frame");
    }
  }
  validate_track(select, roi_select, frames - warmup, "select");
  validate_track(draw, roi_draw, frames - warmup, "draw");
}

SyntheticSpec parse_synthetic_spec(std::string_view json_text, std::uint64_t default_seed) {
  const json j = detail::parse_json(json_text, "synthetic spec");
  detail::reject_unknown_keys(j,
                              {"width", "height", "fps", "frames", "warmup", "background",
                               "blob_intensity", "blob_radius", "noise", "seed", "roi_select",
                               "roi_draw", "select", "draw"},
                              "synthetic spec");
  SyntheticSpec s;
  s.seed = default_seed;
  detail::read_opt(j, "width", s.width, "synthetic spec");
  detail::read_opt(j, "height", s.height, "synthetic spec");
  detail::read_opt(j, "fps", s.fps, "synthetic spec");
  detail::read_opt(j, "frames", s.frames, "synthetic spec");
  detail::read_opt(j, "warmup", s.warmup, "synthetic spec");
  int background = s.background, blob = s.blob_intensity;
  detail::read_opt(j, "background", background, "synthetic spec");
  detail::read_opt(j, "blob_intensity", blob, "synthetic spec");
  if (background < 0 || background > 255 || blob < 0 || blob > 255) {
    throw ConfigError("synthetic spec: intensities must be 0-255");
  }
  s.background = static_cast<std::uint8_t>(background);
  s.blob_intensity = static_cast<std::uint8_t>(blob);
  detail::read_opt(j, "blob_radius", s.blob_radius, "synthetic spec");
  detail::read_opt(j, "noise", s.noise, "synthetic spec");
  detail::read_opt(j, "seed", s.seed, "synthetic spec");
  if (j.contains("roi_select")) s.roi_select = detail::rect_from_json(j["roi_select"], "synthetic spec");
  if (j.contains("roi_draw")) s.roi_draw = detail::rect_from_json(j["roi_draw"], "synthetic spec");
  const int active = s.frames - s.warmup;
  if (j.contains("select")) s.select = track_from_json(j["select"], active, "select");
  if (j.contains("draw")) s.draw = track_from_json(j["draw"], active, "draw");
  s.validate();
  return s;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_synthetic_spec(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string synthetic_spec_json(const SyntheticSpec& s) {
  return json{{"width", s.width},
              {"height", s.height},
              {"fps", s.fps},
              {"frames", s.frames},
              {"warmup", s.warmup},
              {"background", s.background},
              {"blob_intensity", s.blob_intensity},
              {"blob_radius", s.blob_radius},
              {"noise", s.noise},
              {"seed", s.seed},
              {"roi_select", detail::rect_to_json(s.roi_select)},
              {"roi_draw", detail::rect_to_json(s.roi_draw)},
              {"select", track_to_json(s.select)},
              {"draw", track_to_json(s.draw)}}
      .dump(2);
}

std::optional<Point> blob_center(const BlobTrack& track, int k) {
  if (k < 0) return std::nullopt;
  int offset = k;
  for (const auto& seg : track.segments) {
    if (offset >= seg.frames) {
      offset -= seg.frames;
      continue;
    }
    if (seg.waypoints.empty()) return std::nullopt;
    const long long legs = static_cast<long long>(seg.waypoints.size()) - 1;
    if (legs == 0 || seg.frames == 1) return seg.waypoints.front();
    // Position parameter s = offset * legs / (frames - 1), split into leg
    // index and remainder.
    const long long den = seg.frames - 1;
    const long long numer = static_cast<long long>(offset) * legs;
    long long leg = numer / den;
    long long rem = numer % den;
    if (leg >= legs) {
      leg = legs - 1;
      rem = den;
    }
    const Point a = seg.waypoints[leg];
    const Point b = seg.waypoints[leg + 1];
    return Point{lerp_round(a.x, b.x - a.x, rem, den), lerp_round(a.y, b.y - a.y, rem, den)};
  }
  return std::nullopt;
}

RgbImage synthesize_frame(const SyntheticSpec& spec, int index) {
  GrayImage gray(spec.width, spec.height, spec.background);
  if (index >= spec.warmup) {
    const int k = index - spec.warmup;
    const int diameter = 2 * spec.blob_radius;
    for (const auto& [track, roi] : {std::pair{&spec.select, spec.roi_select},
                                     std::pair{&spec.draw, spec.roi_draw}}) {
      if (const auto c = blob_center(*track, k)) {
        stamp_disc(gray, {roi.x0 + c->x, roi.y0 + c->y}, diameter, spec.blob_intensity, roi);
      }
    }
  }
  if (spec.noise > 0) {
    std::mt19937_64 rng(spec.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1));
    const std::uint64_t span = 2 * static_cast<std::uint64_t>(spec.noise) + 1;
    for (auto& v : gray.data()) {
      const int offset = static_cast<int>(rng() % span) - spec.noise;
      v = static_cast<std::uint8_t>(std::clamp(static_cast<int>(v) + offset, 0, 255));
    }
  }
  RgbImage out(spec.width, spec.height);
  auto src = gray.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  return out;
}

SyntheticSource::SyntheticSource(SyntheticSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

std::optional<Frame> SyntheticSource::next() {
  if (cursor_ >= spec_.frames) return std::nullopt;
  const int index = cursor_++;
  return Frame{index, synthesize_frame(spec_, index), index * 1000.0 / spec_.fps};
}

LoopingSource::LoopingSource(std::function<std::unique_ptr<FrameSource>()> factory)
    : factory_(std::move(factory)), inner_(factory_()) {
  if (!inner_) throw StateError("looping source: factory returned no source");
}

std::optional<Frame> LoopingSource::next() {
  auto f = inner_->next();
  if (!f) {
    inner_ = factory_();
    f = inner_->next();
    if (!f) return std::nullopt;  // empty source, nothing to loop
  }
  f->index = next_index_++;
  f->timestamp_ms = static_cast<double>(f->index) * 1000.0 / inner_->fps();
  return f;
}

std::unique_ptr<FrameSource> open_trace(const std::filesystem::path& dir) {
  return std::make_unique<TraceDirSource>(dir);
}

std::unique_ptr<FrameSource> open_synthetic(const SyntheticSpec& spec) {
  return std::make_unique<SyntheticSource>(spec);
}

void write_trace(const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);
  json files = json::array();
  for (int i = 0; i < spec.frames; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "f%06d.ppm", i);
    write_ppm(out_dir / name, synthesize_frame(spec, i));
    files.push_back(name);
  }
  const json manifest{
      {"width", spec.width}, {"height", spec.height}, {"fps", spec.fps}, {"frames", files}};
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace airboard
