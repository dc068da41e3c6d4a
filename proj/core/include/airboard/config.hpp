#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "airboard/image.hpp"

namespace airboard {

struct GateConfig {
  std::string kind = "pass";  // "pass" or "cascade"
  std::filesystem::path model;  // cascade JSON, required for "cascade"
  int stride = 4;
};

struct OcrConfig {
  std::string kind = "mock";  // "mock", "external" or "none"
  std::string text;           // mock answer
  std::string command;        // external template; empty = env or default
  int timeout_ms = 10'000;
};

// Frame source for `serve`: exactly one of trace / synthetic.
struct ServeConfig {
  std::filesystem::path trace;
  std::filesystem::path synthetic;
  double fps = 28.0;
  bool loop = true;
};

struct SessionConfig {
  int width = 720;
  int height = 420;
  Rect roi_select{290, 210, 490, 410};
  Rect roi_draw{510, 210, 710, 410};
  double alpha = 0.8;
  int warmup_frames = 100;
  int threshold = 15;
  int min_area = 50;
  int dwell_frames = 15;
  int pointer_diameter = 4;
  int vui_height = 40;
  GateConfig gate;         // draw ROI
  GateConfig gate_select;  // select ROI
  OcrConfig ocr;
  std::optional<std::filesystem::path> save_dir;
  std::uint64_t seed = 0;
  ServeConfig serve;

  // Throws ConfigError when any field is out of range or the ROIs overlap or
  // leave the frame.
  void validate() const;
};

// Strict JSON reader: unknown keys are rejected. Relative paths are resolved
// against base_dir. Missing keys keep their defaults.
SessionConfig parse_config(std::string_view json_text,
                           const std::filesystem::path& base_dir = {});
SessionConfig load_config(const std::filesystem::path& path);
std::string config_json(const SessionConfig& cfg);

}  // namespace airboard
