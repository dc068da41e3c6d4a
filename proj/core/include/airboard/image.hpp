#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "airboard/errors.hpp"

namespace airboard {

// Pixel coordinate, x = column, y = row, origin top-left.
struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Axis-aligned rectangle with inclusive top-left (x0, y0) and exclusive
// bottom-right (x1, y1).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 1;
  int y1 = 1;

  // Throws ConfigError unless x0 < x1 and y0 < y1.
  static Rect make(int x0, int y0, int x1, int y1);

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool contains(Point p) const { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }
  bool overlaps(const Rect& o) const {
    return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }
  bool inside(int width, int height) const {
    return x0 >= 0 && y0 >= 0 && x1 <= width && y1 <= height;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};

// Row-major pixel buffer with `Channels` interleaved samples per pixel.
// The Tag parameter keeps semantically different buffers (e.g. a binary mask
// and a grayscale image) from converting into each other silently.
template <typename T, int Channels, typename Tag = void>
class Image {
 public:
  using value_type = T;
  static constexpr int kChannels = Channels;

  Image() = default;

  Image(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw DimensionError("image dimensions must be positive, got " + std::to_string(width) +
                           "x" + std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
  }

  Image(int width, int height, std::vector<T> data) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw DimensionError("image dimensions must be positive");
    }
    if (data.size() != static_cast<std::size_t>(width) * height * Channels) {
      throw DimensionError("pixel buffer length does not match dimensions");
    }
    data_ = std::move(data);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  Rect extent() const { return Rect{0, 0, width_, height_}; }

  T& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::span<T> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_ * Channels,
            static_cast<std::size_t>(width_) * Channels};
  }
  std::span<const T> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_ * Channels,
            static_cast<std::size_t>(width_) * Channels};
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool same_size(int w, int h) const { return width_ == w && height_ == h; }
  template <typename U, int C2, typename Tag2>
  bool same_size(const Image<U, C2, Tag2>& o) const {
    return width_ == o.width() && height_ == o.height();
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * Channels + c;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct MaskTag {};

using GrayImage = Image<std::uint8_t, 1>;
using FloatImage = Image<double, 1>;
using RgbImage = Image<std::uint8_t, 3>;
// 1 = foreground, 0 = background.
using BinaryMask = Image<std::uint8_t, 1, MaskTag>;

inline Rgb pixel(const RgbImage& img, int x, int y) {
  return {img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)};
}
inline void set_pixel(RgbImage& img, int x, int y, Rgb c) {
  img.at(x, y, 0) = c.r;
  img.at(x, y, 1) = c.g;
  img.at(x, y, 2) = c.b;
}

// Inclusive 2-D prefix sums: at(x, y) = sum of intensities over i <= x, j <= y.
class IntegralImage {
 public:
  explicit IntegralImage(const GrayImage& img);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint64_t at(int x, int y) const {
    return sums_[static_cast<std::size_t>(y + 1) * stride() + (x + 1)];
  }

  // Sum over r via inclusion-exclusion. Throws BoundsError if r leaves the image.
  std::uint64_t rect_sum(const Rect& r) const;

  // Same as rect_sum without the bounds check; for hot loops that validated
  // the window once.
  std::uint64_t rect_sum_unchecked(int x0, int y0, int x1, int y1) const {
    const std::size_t s = stride();
    const std::size_t top = static_cast<std::size_t>(y0) * s;
    const std::size_t bottom = static_cast<std::size_t>(y1) * s;
    return sums_[bottom + x1] - sums_[bottom + x0] - sums_[top + x1] + sums_[top + x0];
  }

 private:
  std::size_t stride() const { return static_cast<std::size_t>(width_) + 1; }

  int width_ = 0;
  int height_ = 0;
  // Zero-padded (width+1) x (height+1) table.
  std::vector<std::uint64_t> sums_;
};

// BT.601 luma, rounded half up: (299 R + 587 G + 114 B + 500) / 1000.
GrayImage to_grayscale(const RgbImage& img);

// Sub-image over roi; throws BoundsError if roi is not fully inside img.
GrayImage crop(const GrayImage& img, const Rect& roi);
RgbImage crop(const RgbImage& img, const Rect& roi);

// Per-pixel |a - b|. Throws DimensionError on size mismatch.
GrayImage abs_diff(const GrayImage& a, const GrayImage& b);
// b is rounded half up and clamped to 0..255 before differencing.
GrayImage abs_diff(const GrayImage& a, const FloatImage& b);

// Foreground iff intensity > t.
BinaryMask threshold_binary(const GrayImage& img, std::uint8_t t);

std::size_t count_foreground(const BinaryMask& mask);

inline IntegralImage integral(const GrayImage& img) { return IntegralImage(img); }
inline std::uint64_t rect_sum(const IntegralImage& ii, const Rect& r) { return ii.rect_sum(r); }

// True when pixel p lies in the disc of the given diameter centred on c:
// (p.x - c.x)^2 + (p.y - c.y)^2 <= (diameter / 2)^2.
bool in_disc(Point p, Point center, int diameter);

// Paints the disc into img, clipped to `clip` (which is itself clipped to the
// image). Diameter must be >= 1.
void stamp_disc(RgbImage& img, Point center, int diameter, Rgb color, const Rect& clip);
void stamp_disc(RgbImage& img, Point center, int diameter, Rgb color);
void stamp_disc(GrayImage& img, Point center, int diameter, std::uint8_t value, const Rect& clip);

// Copying variant of stamp_disc.
RgbImage draw_disc(const RgbImage& img, Point center, int diameter, Rgb color);

void fill_rect(RgbImage& img, const Rect& r, Rgb color);
void outline_rect(RgbImage& img, const Rect& r, Rgb color, int thickness = 1);

}  // namespace airboard
