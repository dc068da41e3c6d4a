#include "airboard/segmentation.hpp"

#include <numeric>

namespace airboard {

namespace {

// Disjoint-set forest over provisional labels.
class LabelForest {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the older label as root so the root is always the component's
    // first-seen label.
    if (a < b) parent_[b] = a; else parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

std::vector<Contour> extract_contours(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> labels(static_cast<std::size_t>(w) * h, -1);
  LabelForest forest;

  // First pass: provisional labels from the already-visited 8-neighbours
  // (W, NW, N, NE).
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      int label = -1;
      auto visit = [&](int nx, int ny) {
        if (nx < 0 || nx >= w || ny < 0) return;
        const int l = labels[static_cast<std::size_t>(ny) * w + nx];
        if (l < 0) return;
        if (label < 0) label = l; else forest.unite(label, l);
      };
      visit(x - 1, y);
      visit(x - 1, y - 1);
      visit(x, y - 1);
      visit(x + 1, y - 1);
      labels[static_cast<std::size_t>(y) * w + x] = label < 0 ? forest.make() : label;
    }
  }

  // Second pass: resolve roots and bucket pixels. Roots are met in raster
  // order of their component's first pixel.
  std::vector<Contour> out;
  std::vector<int> slot_of_root;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int l = labels[static_cast<std::size_t>(y) * w + x];
      if (l < 0) continue;
      const int root = forest.find(l);
      if (static_cast<std::size_t>(root) >= slot_of_root.size()) {
        slot_of_root.resize(root + 1, -1);
      }
      if (slot_of_root[root] < 0) {
        slot_of_root[root] = static_cast<int>(out.size());
        out.push_back(Contour{{}, Point{x, y}});
      }
      out[slot_of_root[root]].pixels.push_back(Point{x, y});
    }
  }
  return out;
}

std::optional<Contour> largest_contour(const std::vector<Contour>& contours,
                                       std::size_t min_area) {
  const Contour* best = nullptr;
  for (const auto& c : contours) {
    if (c.area() < min_area || c.area() == 0) continue;
    if (best == nullptr || c.area() > best->area() ||
        (c.area() == best->area() &&
         (c.top.y < best->top.y || (c.top.y == best->top.y && c.top.x < best->top.x)))) {
      best = &c;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

RoiPoint pointer_from_contour(const Contour& c) {
  if (c.pixels.empty()) throw StateError("pointer_from_contour: empty contour");
  // Scan rather than trust c.top so hand-built contours work too.
  Point top = c.pixels.front();
  for (const auto& p : c.pixels) {
    if (p.y < top.y || (p.y == top.y && p.x < top.x)) top = p;
  }
  return top;
}

std::optional<RoiPoint> find_pointer(const BinaryMask& mask, std::size_t min_area) {
  const auto contours = extract_contours(mask);
  const auto best = largest_contour(contours, min_area);
  if (!best) return std::nullopt;
  return pointer_from_contour(*best);
}

}  // namespace airboard
