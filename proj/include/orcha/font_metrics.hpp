#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace orcha {

/// Advance widths of the bundled default face (Helvetica-compatible metrics,
/// 1/1000 em). Geometry never depends on fonts installed on the host.
double glyph_advance_em(char32_t code_point);

/// Splits UTF-8 text into code points. Invalid bytes decode as U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view text);
std::string encode_utf8(char32_t code_point);

/// ASCII letters upper-cased; other code points pass through.
std::string to_upper(std::string_view text);

/// Width in px of `text` set at `font_px`, measured as rendered (upper case).
double text_width_px(std::string_view text, double font_px);

}  // namespace orcha
