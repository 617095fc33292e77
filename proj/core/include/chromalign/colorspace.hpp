#pragma once

#include <string>
#include <string_view>

namespace chromalign {

/// 8-bit sRGB triple. Stored as int so out-of-range input can be rejected
/// instead of silently wrapping.
struct Srgb {
  int r = 0;
  int g = 0;
  int b = 0;

  friend bool operator==(const Srgb&, const Srgb&) = default;
};

/// CIELAB coordinates under D65 / 2 degree observer.
struct LabPoint {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const LabPoint&, const LabPoint&) = default;
};

namespace d65 {
// Reference white, normalised so Y = 1.
inline constexpr double kWhiteX = 0.95047;
inline constexpr double kWhiteY = 1.00000;
inline constexpr double kWhiteZ = 1.08883;
}  // namespace d65

/// sRGB (gamma-encoded, 0..255) -> linear RGB -> XYZ(D65) -> CIELAB.
/// Throws DomainError if any channel is outside [0, 255].
LabPoint srgb_to_lab(const Srgb& rgb);

/// CIE76 colour difference: Euclidean distance in Lab.
double delta_e(const LabPoint& p, const LabPoint& q) noexcept;

/// Parses `#RRGGBB` (case-insensitive). Throws FormatError otherwise.
Srgb parse_hex(std::string_view text);

/// Formats as upper-case `#RRGGBB`.
std::string to_hex(const Srgb& rgb);

}  // namespace chromalign
