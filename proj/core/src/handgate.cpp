#include "airboard/handgate.hpp"

#include <json.hpp>

#include "airboard/ppm.hpp"

namespace airboard {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError("cascade: missing \"" + std::string(key) + "\" in " + where);
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError("cascade: bad \"" + std::string(key) + "\" in " + where + ": " + e.what());
  }
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError("cascade: missing \"" + std::string(key) + "\" in " + where);
  }
  return j.at(key);
}

void validate(const CascadeModel& m) {
  if (m.window_w <= 0 || m.window_h <= 0) throw ConfigError("cascade: window must be positive");
  if (m.stages.empty()) throw ConfigError("cascade: no stages");
  for (std::size_t s = 0; s < m.stages.size(); ++s) {
    const auto& stage = m.stages[s];
    if (stage.classifiers.empty()) {
      throw ConfigError("cascade: stage " + std::to_string(s) + " has no classifiers");
    }
    for (const auto& wc : stage.classifiers) {
      const auto n = wc.feature.rects.size();
      if (n < 1 || n > 4) throw ConfigError("cascade: feature must have 1-4 rects");
      for (const auto& wr : wc.feature.rects) {
        const Rect& r = wr.rect;
        if (r.x0 >= r.x1 || r.y0 >= r.y1 || !r.inside(m.window_w, m.window_h)) {
          throw ConfigError("cascade: feature rect outside window in stage " + std::to_string(s));
        }
      }
    }
  }
}

}  // namespace

CascadeModel load_cascade(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("cascade: ") + e.what());
  }
  CascadeModel m;
  const auto window = field<std::vector<int>>(doc, "window", "model");
  if (window.size() != 2) throw ParseError("cascade: window must be [w, h]");
  m.window_w = window[0];
  m.window_h = window[1];
  const auto& stages = member(doc, "stages", "model");
  if (!stages.is_array()) throw ParseError("cascade: stages must be an array");
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const std::string where = "stage " + std::to_string(s);
    CascadeStage stage;
    stage.threshold = field<double>(stages[s], "threshold", where);
    const auto& classifiers = member(stages[s], "classifiers", where);
    if (!classifiers.is_array()) throw ParseError("cascade: classifiers must be an array");
    for (const auto& c : classifiers) {
      WeakClassifier wc;
      wc.threshold = field<double>(c, "threshold", where);
      wc.above = field<double>(c, "above", where);
      wc.below = field<double>(c, "below", where);
      const auto& rects = member(c, "rects", where);
      if (!rects.is_array()) throw ParseError("cascade: rects must be an array");
      for (const auto& r : rects) {
        const int x = field<int>(r, "x", where);
        const int y = field<int>(r, "y", where);
        const int w = field<int>(r, "w", where);
        const int h = field<int>(r, "h", where);
        wc.feature.rects.push_back({Rect{x, y, x + w, y + h}, field<double>(r, "weight", where)});
      }
      stage.classifiers.push_back(std::move(wc));
    }
    m.stages.push_back(std::move(stage));
  }
  validate(m);
  return m;
}

CascadeModel load_cascade_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return load_cascade(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string dump_cascade(const CascadeModel& m) {
  json stages = json::array();
  for (const auto& stage : m.stages) {
    json classifiers = json::array();
    for (const auto& wc : stage.classifiers) {
      json rects = json::array();
      for (const auto& wr : wc.feature.rects) {
        rects.push_back({{"x", wr.rect.x0}, {"y", wr.rect.y0}, {"w", wr.rect.width()},
                         {"h", wr.rect.height()}, {"weight", wr.weight}});
      }
      classifiers.push_back(
          {{"rects", rects}, {"threshold", wc.threshold}, {"above", wc.above}, {"below", wc.below}});
    }
    stages.push_back({{"threshold", stage.threshold}, {"classifiers", classifiers}});
  }
  return json{{"window", {m.window_w, m.window_h}}, {"stages", stages}}.dump(2);
}

double feature_value(const HaarFeature& f, const IntegralImage& ii, Point origin) {
  double value = 0.0;
  for (const auto& wr : f.rects) {
    const auto sum = ii.rect_sum_unchecked(origin.x + wr.rect.x0, origin.y + wr.rect.y0,
                                           origin.x + wr.rect.x1, origin.y + wr.rect.y1);
    value += wr.weight * static_cast<double>(sum);
  }
  return value;
}

namespace {

bool eval_unchecked(const CascadeModel& model, const IntegralImage& ii, Point origin) {
  for (const auto& stage : model.stages) {
    double votes = 0.0;
    for (const auto& wc : stage.classifiers) {
      votes += feature_value(wc.feature, ii, origin) > wc.threshold ? wc.above : wc.below;
    }
    if (votes < stage.threshold) return false;
  }
  return true;
}

}  // namespace

bool eval_window(const CascadeModel& model, const IntegralImage& ii, Point origin) {
  const Rect window{origin.x, origin.y, origin.x + model.window_w, origin.y + model.window_h};
  if (!window.inside(ii.width(), ii.height())) {
    throw BoundsError("eval_window: window leaves the image");
  }
  return eval_unchecked(model, ii, origin);
}

bool detect(const CascadeModel& model, const GrayImage& roi, int stride) {
  if (stride < 1) throw ConfigError("detect: stride must be >= 1");
  if (roi.width() < model.window_w || roi.height() < model.window_h) {
    throw BoundsError("detect: roi smaller than detection window");
  }
  const IntegralImage ii(roi);
  for (int y = 0; y + model.window_h <= roi.height(); y += stride) {
    for (int x = 0; x + model.window_w <= roi.width(); x += stride) {
      if (eval_unchecked(model, ii, {x, y})) return true;
    }
  }
  return false;
}

CascadeGate::CascadeGate(CascadeModel model, int stride) : model_(std::move(model)), stride_(stride) {
  validate(model_);
  if (stride_ < 1) throw ConfigError("cascade gate stride must be >= 1");
}

bool CascadeGate::present(const GrayImage& roi, std::int64_t) { return detect(model_, roi, stride_); }

}  // namespace airboard
