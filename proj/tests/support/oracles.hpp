#pragma once

// Reference implementations used only by tests. Each one takes the most
// direct route to the answer (brute force, exact rationals, explicit flood
// fill) and shares no code with the library path it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "airboard/handgate.hpp"
#include "airboard/image.hpp"

namespace airboard::oracle {

// --- images ----------------------------------------------------------------

inline GrayImage random_gray(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> d(0, 255);
  GrayImage img(w, h);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(d(rng));
  return img;
}

inline BinaryMask random_mask(std::mt19937& rng, int w, int h, double density) {
  std::bernoulli_distribution d(density);
  BinaryMask m(w, h);
  for (auto& v : m.data()) v = d(rng) ? 1 : 0;
  return m;
}

inline std::uint64_t naive_rect_sum(const GrayImage& img, const Rect& r) {
  std::uint64_t s = 0;
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) s += img.at(x, y);
  return s;
}

// Disc membership stated with a real-valued radius.
inline std::set<std::pair<int, int>> disc_pixels(int w, int h, Point c, int diameter) {
  std::set<std::pair<int, int>> out;
  const double radius = diameter / 2.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = x - c.x, dy = y - c.y;
      if (dx * dx + dy * dy <= radius * radius) out.insert({x, y});
    }
  return out;
}

// --- connected components ----------------------------------------------------

struct Component {
  std::set<std::pair<int, int>> pixels;  // (x, y)
  Point top;
};

// Explicit-stack flood fill with 8-connectivity; components are listed in
// raster order of their first pixel.
inline std::vector<Component> flood_fill(const BinaryMask& m) {
  const int w = m.width(), h = m.height();
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<Component> out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y) || seen[y * w + x]) continue;
      Component c;
      c.top = {x, y};
      std::vector<std::pair<int, int>> stack{{x, y}};
      seen[y * w + x] = 1;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        c.pixels.insert({cx, cy});
        if (cy < c.top.y || (cy == c.top.y && cx < c.top.x)) c.top = {cx, cy};
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (!m.at(nx, ny) || seen[ny * w + nx]) continue;
            seen[ny * w + nx] = 1;
            stack.push_back({nx, ny});
          }
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

// --- exact rational mapping --------------------------------------------------

struct Fraction {
  long long num;
  long long den;

  Fraction(long long n, long long d) : num(n), den(d) {
    if (den < 0) num = -num, den = -den;
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) num /= g, den /= g;
  }
  Fraction operator*(const Fraction& o) const { return {num * o.num, den * o.den}; }
  long long floor() const {
    long long q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
  }
};

// c = (f_x1 - f_x0) / (r_x1 - r_x0) * r_x, floored.
inline Point map_oracle(Point p, const Rect& roi, const Rect& frame) {
  const Fraction sx(frame.x1 - frame.x0, roi.x1 - roi.x0);
  const Fraction sy(frame.y1 - frame.y0, roi.y1 - roi.y0);
  return {static_cast<int>((sx * Fraction(p.x, 1)).floor()),
          static_cast<int>((sy * Fraction(p.y, 1)).floor())};
}

// --- Haar cascade ----------------------------------------------------------

inline double naive_feature(const HaarFeature& f, const GrayImage& img, Point o) {
  double v = 0.0;
  for (const auto& wr : f.rects) {
    const Rect r{o.x + wr.rect.x0, o.y + wr.rect.y0, o.x + wr.rect.x1, o.y + wr.rect.y1};
    v += wr.weight * static_cast<double>(naive_rect_sum(img, r));
  }
  return v;
}

inline bool naive_window(const CascadeModel& m, const GrayImage& img, Point o) {
  for (const auto& stage : m.stages) {
    double votes = 0.0;
    for (const auto& wc : stage.classifiers) {
      votes += naive_feature(wc.feature, img, o) > wc.threshold ? wc.above : wc.below;
    }
    if (votes < stage.threshold) return false;
  }
  return true;
}

// Every window position on the stride grid, no early exit.
inline bool naive_detect(const CascadeModel& m, const GrayImage& img, int stride) {
  bool any = false;
  for (int y = 0; y + m.window_h <= img.height(); y += stride)
    for (int x = 0; x + m.window_w <= img.width(); x += stride)
      any = naive_window(m, img, {x, y}) || any;
  return any;
}

// --- background ----------------------------------------------------------

// Accumulator value after k frames: first frame c0, then k-1 frames of c.
inline double background_closed_form(double c0, double c, double alpha, int k) {
  return c + std::pow(1.0 - alpha, k - 1) * (c0 - c);
}

}  // namespace airboard::oracle
