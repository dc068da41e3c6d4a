#include "airboard/ppm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

namespace airboard {

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out;
  out.reserve(header.size() + img.data().size());
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), img.data().begin(), img.data().end());
  return out;
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> b) : bytes_(b) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* what) {
    skip_space_and_comments();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000) throw ParseError(std::string("ppm: ") + what + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw ParseError(std::string("ppm: expected ") + what);
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }
  std::uint8_t peek() const { return bytes_[pos_]; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

RgbImage decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw ParseError("ppm: missing P6 magic");
  }
  HeaderReader r(bytes.subspan(2));
  const long w = r.read_uint("width");
  const long h = r.read_uint("height");
  const long maxval = r.read_uint("maxval");
  if (w <= 0 || h <= 0) throw ParseError("ppm: zero dimension");
  if (maxval != 255) throw ParseError("ppm: only maxval 255 is supported");
  // Exactly one whitespace byte separates the header from the raster.
  if (r.at_end() || !std::isspace(r.peek())) throw ParseError("ppm: truncated header");
  r.advance();
  const std::size_t offset = 2 + r.pos();
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() - offset < need) throw ParseError("ppm: truncated payload");
  std::vector<std::uint8_t> data(bytes.begin() + offset, bytes.begin() + offset + need);
  return RgbImage(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                 text.size()));
}

RgbImage read_ppm(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_ppm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
  write_file(path, encode_ppm(img));
}

}  // namespace airboard
