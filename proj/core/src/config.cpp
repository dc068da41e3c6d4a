#include "airboard/config.hpp"

#include "airboard/ppm.hpp"
#include "json_util.hpp"

namespace airboard {

using detail::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

GateConfig gate_from_json(const json& j, const std::filesystem::path& base) {
  detail::reject_unknown_keys(j, {"kind", "model", "stride"}, "config.gate");
  GateConfig g;
  detail::read_opt(j, "kind", g.kind, "config.gate");
  std::string model;
  detail::read_opt(j, "model", model, "config.gate");
  g.model = resolve(model, base);
  detail::read_opt(j, "stride", g.stride, "config.gate");
  return g;
}

json gate_to_json(const GateConfig& g) {
  json j{{"kind", g.kind}, {"stride", g.stride}};
  if (!g.model.empty()) j["model"] = g.model.string();
  return j;
}

}  // namespace

void SessionConfig::validate() const {
  if (width <= 0 || height <= 0) throw ConfigError("config: frame size must be positive");
  for (const Rect* r : {&roi_select, &roi_draw}) {
    if (r->x0 >= r->x1 || r->y0 >= r->y1) throw ConfigError("config: degenerate ROI");
    if (!r->inside(width, height)) throw ConfigError("config: ROI outside frame");
  }
  if (roi_select.overlaps(roi_draw)) throw ConfigError("config: ROIs overlap");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("config: alpha must be in (0, 1]");
  if (warmup_frames < 1) throw ConfigError("config: warmup_frames must be >= 1");
  if (threshold < 0 || threshold > 255) throw ConfigError("config: threshold must be 0-255");
  if (min_area < 1) throw ConfigError("config: min_area must be >= 1");
  if (dwell_frames < 1) throw ConfigError("config: dwell_frames must be >= 1");
  if (pointer_diameter < 1) throw ConfigError("config: pointer_diameter must be >= 1");
  if (vui_height < 1 || vui_height >= height) throw ConfigError("config: bad vui_height");
  for (const GateConfig* g : {&gate, &gate_select}) {
    if (g->kind != "pass" && g->kind != "cascade") {
      throw ConfigError("config: gate kind must be \"pass\" or \"cascade\"");
    }
    if (g->kind == "cascade" && g->model.empty()) throw ConfigError("config: cascade gate needs a model");
    if (g->stride < 1) throw ConfigError("config: gate stride must be >= 1");
  }
  if (ocr.kind != "mock" && ocr.kind != "external" && ocr.kind != "none") {
    throw ConfigError("config: ocr kind must be mock, external or none");
  }
  if (ocr.timeout_ms <= 0) throw ConfigError("config: ocr timeout must be positive");
  if (!(serve.fps > 0.0)) throw ConfigError("config: serve fps must be positive");
  if (!serve.trace.empty() && !serve.synthetic.empty()) {
    throw ConfigError("config: serve takes either a trace or a synthetic spec, not both");
  }
}

SessionConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  const json j = detail::parse_json(json_text, "config");
  detail::reject_unknown_keys(
      j,
      {"width", "height", "roi_select", "roi_draw", "alpha", "warmup_frames", "threshold",
       "min_area", "dwell_frames", "pointer_diameter", "vui_height", "gate", "gate_select", "ocr",
       "save_dir", "seed", "serve"},
      "config");

  SessionConfig c;
  detail::read_opt(j, "width", c.width, "config");
  detail::read_opt(j, "height", c.height, "config");
  if (j.contains("roi_select")) c.roi_select = detail::rect_from_json(j["roi_select"], "config.roi_select");
  if (j.contains("roi_draw")) c.roi_draw = detail::rect_from_json(j["roi_draw"], "config.roi_draw");
  detail::read_opt(j, "alpha", c.alpha, "config");
  detail::read_opt(j, "warmup_frames", c.warmup_frames, "config");
  detail::read_opt(j, "threshold", c.threshold, "config");
  detail::read_opt(j, "min_area", c.min_area, "config");
  detail::read_opt(j, "dwell_frames", c.dwell_frames, "config");
  detail::read_opt(j, "pointer_diameter", c.pointer_diameter, "config");
  detail::read_opt(j, "vui_height", c.vui_height, "config");
  if (j.contains("gate")) c.gate = gate_from_json(j["gate"], base_dir);
  if (j.contains("gate_select")) c.gate_select = gate_from_json(j["gate_select"], base_dir);
  if (j.contains("ocr")) {
    const auto& o = j["ocr"];
    detail::reject_unknown_keys(o, {"kind", "text", "command", "timeout_ms"}, "config.ocr");
    detail::read_opt(o, "kind", c.ocr.kind, "config.ocr");
    detail::read_opt(o, "text", c.ocr.text, "config.ocr");
    detail::read_opt(o, "command", c.ocr.command, "config.ocr");
    detail::read_opt(o, "timeout_ms", c.ocr.timeout_ms, "config.ocr");
  }
  if (j.contains("save_dir")) {
    std::string dir;
    detail::read_opt(j, "save_dir", dir, "config");
    c.save_dir = resolve(dir, base_dir);
  }
  detail::read_opt(j, "seed", c.seed, "config");
  if (j.contains("serve")) {
    const auto& s = j["serve"];
    detail::reject_unknown_keys(s, {"trace", "synthetic", "fps", "loop"}, "config.serve");
    std::string trace, synthetic;
    detail::read_opt(s, "trace", trace, "config.serve");
    detail::read_opt(s, "synthetic", synthetic, "config.serve");
    c.serve.trace = resolve(trace, base_dir);
    c.serve.synthetic = resolve(synthetic, base_dir);
    detail::read_opt(s, "fps", c.serve.fps, "config.serve");
    detail::read_opt(s, "loop", c.serve.loop, "config.serve");
  }
  c.validate();
  return c;
}

SessionConfig load_config(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                      path.parent_path());
}

std::string config_json(const SessionConfig& c) {
  json j{{"width", c.width},
         {"height", c.height},
         {"roi_select", detail::rect_to_json(c.roi_select)},
         {"roi_draw", detail::rect_to_json(c.roi_draw)},
         {"alpha", c.alpha},
         {"warmup_frames", c.warmup_frames},
         {"threshold", c.threshold},
         {"min_area", c.min_area},
         {"dwell_frames", c.dwell_frames},
         {"pointer_diameter", c.pointer_diameter},
         {"vui_height", c.vui_height},
         {"gate", gate_to_json(c.gate)},
         {"gate_select", gate_to_json(c.gate_select)},
         {"ocr",
          {{"kind", c.ocr.kind},
           {"text", c.ocr.text},
           {"command", c.ocr.command},
           {"timeout_ms", c.ocr.timeout_ms}}},
         {"seed", c.seed},
         {"serve",
          {{"trace", c.serve.trace.string()},
           {"synthetic", c.serve.synthetic.string()},
           {"fps", c.serve.fps},
           {"loop", c.serve.loop}}}};
  if (c.save_dir) j["save_dir"] = c.save_dir->string();
  return j.dump(2);
}

}  // namespace airboard
