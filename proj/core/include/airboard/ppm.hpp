#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "airboard/image.hpp"

namespace airboard {

// Binary PPM (P6, maxval 255). The encoder always writes the canonical
// header "P6\n<w> <h>\n255\n".
std::vector<std::uint8_t> encode_ppm(const RgbImage& img);

// Accepts any whitespace/comment layout the P6 grammar allows; maxval must be
// 255. Throws ParseError on a malformed header or truncated payload.
RgbImage decode_ppm(std::span<const std::uint8_t> bytes);

RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace airboard
