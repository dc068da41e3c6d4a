#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "airboard/board.hpp"
#include "airboard/errors.hpp"
#include "airboard/image.hpp"

namespace airboard::detail {

using nlohmann::json;

inline json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

inline void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                                const char* what) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError(std::string(what) + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out, const char* what) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": bad value for \"" + key + "\": " + e.what());
  }
}

inline Rect rect_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError(std::string(what) + ": rect must be [x0, y0, x1, y1]");
  }
  try {
    return Rect::make(j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>());
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

inline json rect_to_json(const Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

inline Point point_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw ParseError(std::string(what) + ": point must be [x, y]");
  try {
    return {j[0].get<int>(), j[1].get<int>()};
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

json event_to_json(const BoardEvent& e);

}  // namespace airboard::detail
