#pragma once

#include <string_view>

#include "airboard/image.hpp"

namespace airboard {

// 5x7 bitmap glyphs for A-Z, 0-9 and space; other characters render blank.
inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

bool glyph_bit(char ch, int col, int row);

// Width in pixels of `text` at `scale` with one scaled column between glyphs.
int text_width(std::string_view text, int scale);

// Draws text with its top-left corner at `origin`, each glyph cell `scale`
// pixels square, clipped to the image.
void draw_text(RgbImage& img, Point origin, std::string_view text, int scale, Rgb color);

}  // namespace airboard
