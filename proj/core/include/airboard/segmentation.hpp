#pragma once

#include <optional>
#include <vector>

#include "airboard/image.hpp"

namespace airboard {

// One 8-connected foreground component of a binary mask.
struct Contour {
  // Component pixels in raster order (row by row, left to right).
  std::vector<Point> pixels;
  // Minimal y, then minimal x. Always pixels.front().
  Point top;

  std::size_t area() const { return pixels.size(); }
};

using RoiPoint = Point;

inline constexpr int kDefaultMinArea = 50;

// Components ordered by the raster position of their first pixel.
std::vector<Contour> extract_contours(const BinaryMask& mask);

// Largest component with area >= min_area. Ties go to the smaller top point
// (y first, then x), so the result does not depend on input order.
std::optional<Contour> largest_contour(const std::vector<Contour>& contours, std::size_t min_area);

RoiPoint pointer_from_contour(const Contour& c);

// Convenience: extract, pick the largest qualifying component, return its top.
std::optional<RoiPoint> find_pointer(const BinaryMask& mask, std::size_t min_area);

}  // namespace airboard
