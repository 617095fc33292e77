#include "chromalign/colorspace.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "chromalign/error.hpp"

namespace chromalign {
namespace {

// IEC 61966-2-1 linear sRGB -> XYZ, D65.
constexpr std::array<std::array<double, 3>, 3> kRgbToXyz{{
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
}};

// CIE constants in their exact rational form.
constexpr double kLabEpsilon = 216.0 / 24389.0;
constexpr double kLabKappa = 24389.0 / 27.0;

double expand_gamma(int channel) {
  const double c = channel / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  return t > kLabEpsilon ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

LabPoint srgb_to_lab(const Srgb& rgb) {
  for (int c : {rgb.r, rgb.g, rgb.b}) {
    if (c < 0 || c > 255) {
      throw DomainError("sRGB channel out of range [0,255]: " + std::to_string(c));
    }
  }
  const std::array<double, 3> lin{expand_gamma(rgb.r), expand_gamma(rgb.g), expand_gamma(rgb.b)};
  std::array<double, 3> xyz{};
  for (std::size_t i = 0; i < 3; ++i) {
    xyz[i] = kRgbToXyz[i][0] * lin[0] + kRgbToXyz[i][1] * lin[1] + kRgbToXyz[i][2] * lin[2];
  }
  const double fx = lab_f(xyz[0] / d65::kWhiteX);
  const double fy = lab_f(xyz[1] / d65::kWhiteY);
  const double fz = lab_f(xyz[2] / d65::kWhiteZ);
  return LabPoint{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double delta_e(const LabPoint& p, const LabPoint& q) noexcept {
  const double dl = p.L - q.L;
  const double da = p.a - q.a;
  const double db = p.b - q.b;
  return std::sqrt(dl * dl + da * da + db * db);
}

Srgb parse_hex(std::string_view text) {
  if (text.size() != 7 || text[0] != '#') {
    throw FormatError("expected #RRGGBB, got '" + std::string(text) + "'");
  }
  std::array<int, 3> ch{};
  for (std::size_t i = 0; i < 3; ++i) {
    const int hi = hex_digit(text[1 + 2 * i]);
    const int lo = hex_digit(text[2 + 2 * i]);
    if (hi < 0 || lo < 0) {
      throw FormatError("invalid hex digit in '" + std::string(text) + "'");
    }
    ch[i] = hi * 16 + lo;
  }
  return Srgb{ch[0], ch[1], ch[2]};
}

std::string to_hex(const Srgb& rgb) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", rgb.r & 0xFF, rgb.g & 0xFF, rgb.b & 0xFF);
  return buf;
}

}  // namespace chromalign
