#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace orcha {

/// sRGB color with channels in [0, 1]. Kept in double precision so that
/// lightness shifts round-trip through HSL without quantization drift.
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Hsl {
  double h = 0.0;  // degrees in [0, 360)
  double s = 0.0;  // [0, 1]
  double l = 0.0;  // [0, 1]
};

/// Parses "#rgb", "#rrggbb" (CSS shorthand expansion for the former) or a CSS
/// named color, case-insensitively. Returns nullopt for anything else.
std::optional<Rgb> parse_color(std::string_view text);

/// Lower-case-free "#RRGGBB" with channels rounded to the nearest 8-bit value.
std::string to_hex(const Rgb& color);

Hsl to_hsl(const Rgb& color);
Rgb from_hsl(const Hsl& color);

/// Lightness-shifted shade for a stream nested `depth` levels deep. Depth 0 is
/// the identity; every further level moves lightness by 12 points with the
/// sign alternating per level (+12, -12, +12, ...). Hue is preserved.
Rgb nested_shade(const Rgb& color, int depth);

/// Fallback palette used when a stream leaves its color cell blank.
Rgb palette_color(std::size_t index);

}  // namespace orcha
