#include "airboard/image.hpp"

#include <algorithm>
#include <cmath>

namespace airboard {

Rect Rect::make(int x0, int y0, int x1, int y1) {
  if (x0 >= x1 || y0 >= y1) {
    throw ConfigError("rect requires x0 < x1 and y0 < y1");
  }
  return Rect{x0, y0, x1, y1};
}

IntegralImage::IntegralImage(const GrayImage& img)
    : width_(img.width()), height_(img.height()),
      sums_(static_cast<std::size_t>(img.width() + 1) * (img.height() + 1), 0) {
  const std::size_t s = stride();
  for (int y = 0; y < height_; ++y) {
    std::uint64_t row_sum = 0;
    auto src = img.row(y);
    std::uint64_t* out = sums_.data() + static_cast<std::size_t>(y + 1) * s;
    const std::uint64_t* above = sums_.data() + static_cast<std::size_t>(y) * s;
    for (int x = 0; x < width_; ++x) {
      row_sum += src[x];
      out[x + 1] = row_sum + above[x + 1];
    }
  }
}

std::uint64_t IntegralImage::rect_sum(const Rect& r) const {
  if (r.x0 >= r.x1 || r.y0 >= r.y1 || !r.inside(width_, height_)) {
    throw BoundsError("rect_sum: rectangle outside integral image");
  }
  return rect_sum_unchecked(r.x0, r.y0, r.x1, r.y1);
}

GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const unsigned r = src[3 * i];
    const unsigned g = src[3 * i + 1];
    const unsigned b = src[3 * i + 2];
    dst[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return out;
}

namespace {

template <typename ImageT>
ImageT crop_impl(const ImageT& img, const Rect& roi) {
  if (roi.x0 >= roi.x1 || roi.y0 >= roi.y1 || !roi.inside(img.width(), img.height())) {
    throw BoundsError("crop: roi outside image");
  }
  constexpr int c = ImageT::kChannels;
  ImageT out(roi.width(), roi.height());
  for (int y = 0; y < roi.height(); ++y) {
    auto src = img.row(roi.y0 + y).subspan(static_cast<std::size_t>(roi.x0) * c,
                                           static_cast<std::size_t>(roi.width()) * c);
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

std::uint8_t round_clamp(double v) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace

GrayImage crop(const GrayImage& img, const Rect& roi) { return crop_impl(img, roi); }
RgbImage crop(const RgbImage& img, const Rect& roi) { return crop_impl(img, roi); }

GrayImage abs_diff(const GrayImage& a, const GrayImage& b) {
  if (!a.same_size(b)) throw DimensionError("abs_diff: size mismatch");
  GrayImage out(a.width(), a.height());
  auto pa = a.data();
  auto pb = b.data();
  auto po = out.data();
  for (std::size_t i = 0; i < po.size(); ++i) {
    po[i] = static_cast<std::uint8_t>(pa[i] > pb[i] ? pa[i] - pb[i] : pb[i] - pa[i]);
  }
  return out;
}

GrayImage abs_diff(const GrayImage& a, const FloatImage& b) {
  if (!a.same_size(b)) throw DimensionError("abs_diff: size mismatch");
  GrayImage out(a.width(), a.height());
  auto pa = a.data();
  auto pb = b.data();
  auto po = out.data();
  for (std::size_t i = 0; i < po.size(); ++i) {
    const int bv = round_clamp(pb[i]);
    const int d = static_cast<int>(pa[i]) - bv;
    po[i] = static_cast<std::uint8_t>(d < 0 ? -d : d);
  }
  return out;
}

BinaryMask threshold_binary(const GrayImage& img, std::uint8_t t) {
  BinaryMask out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] > t ? 1 : 0;
  return out;
}

std::size_t count_foreground(const BinaryMask& mask) {
  auto d = mask.data();
  return static_cast<std::size_t>(std::count(d.begin(), d.end(), std::uint8_t{1}));
}

bool in_disc(Point p, Point center, int diameter) {
  const long long dx = p.x - center.x;
  const long long dy = p.y - center.y;
  // (d/2)^2 compared exactly by scaling both sides by 4.
  return 4 * (dx * dx + dy * dy) <= static_cast<long long>(diameter) * diameter;
}

namespace {

template <typename ImageT, typename Paint>
void disc_span(ImageT& img, Point center, int diameter, const Rect& clip, Paint paint) {
  if (diameter < 1) throw ConfigError("disc diameter must be >= 1");
  const Rect c{std::max(clip.x0, 0), std::max(clip.y0, 0), std::min(clip.x1, img.width()),
               std::min(clip.y1, img.height())};
  const int reach = diameter / 2 + 1;
  const int y_lo = std::max(c.y0, center.y - reach);
  const int y_hi = std::min(c.y1, center.y + reach + 1);
  const int x_lo = std::max(c.x0, center.x - reach);
  const int x_hi = std::min(c.x1, center.x + reach + 1);
  for (int y = y_lo; y < y_hi; ++y) {
    for (int x = x_lo; x < x_hi; ++x) {
      if (in_disc({x, y}, center, diameter)) paint(x, y);
    }
  }
}

}  // namespace

void stamp_disc(RgbImage& img, Point center, int diameter, Rgb color, const Rect& clip) {
  disc_span(img, center, diameter, clip, [&](int x, int y) { set_pixel(img, x, y, color); });
}

void stamp_disc(RgbImage& img, Point center, int diameter, Rgb color) {
  stamp_disc(img, center, diameter, color, img.extent());
}

void stamp_disc(GrayImage& img, Point center, int diameter, std::uint8_t value, const Rect& clip) {
  disc_span(img, center, diameter, clip, [&](int x, int y) { img.at(x, y) = value; });
}

RgbImage draw_disc(const RgbImage& img, Point center, int diameter, Rgb color) {
  RgbImage out = img;
  stamp_disc(out, center, diameter, color);
  return out;
}

void fill_rect(RgbImage& img, const Rect& r, Rgb color) {
  const int x0 = std::max(r.x0, 0), x1 = std::min(r.x1, img.width());
  const int y0 = std::max(r.y0, 0), y1 = std::min(r.y1, img.height());
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) set_pixel(img, x, y, color);
}

void outline_rect(RgbImage& img, const Rect& r, Rgb color, int thickness) {
  fill_rect(img, {r.x0, r.y0, r.x1, r.y0 + thickness}, color);
  fill_rect(img, {r.x0, r.y1 - thickness, r.x1, r.y1}, color);
  fill_rect(img, {r.x0, r.y0, r.x0 + thickness, r.y1}, color);
  fill_rect(img, {r.x1 - thickness, r.y0, r.x1, r.y1}, color);
}

}  // namespace airboard
