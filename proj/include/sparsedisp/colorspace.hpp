#pragma once

#include <algorithm>
#include <cmath>

#include "sparsedisp/grid.hpp"

namespace sparsedisp {

struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};

namespace detail {

/// sRGB transfer function inverse (gamma expansion), input in [0,255].
inline double srgb_to_linear(std::uint8_t v) {
  const double c = v / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// D65 reference white.
inline constexpr double kXn = 0.95047;
inline constexpr double kYn = 1.00000;
inline constexpr double kZn = 1.08883;

}  // namespace detail

/// sRGB (D65) to CIELAB.
inline Lab rgb_to_lab(const Rgb& px) {
  const double r = detail::srgb_to_linear(px[0]);
  const double g = detail::srgb_to_linear(px[1]);
  const double b = detail::srgb_to_linear(px[2]);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = detail::lab_f(x / detail::kXn);
  const double fy = detail::lab_f(y / detail::kYn);
  const double fz = detail::lab_f(z / detail::kZn);
  return {std::clamp(116.0 * fy - 16.0, 0.0, 100.0), 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

/// Per-pixel CIELAB L; chroma is discarded.
inline LightnessMap rgb_to_lightness(const RgbImage& image) {
  LightnessMap out(image.width(), image.height());
  auto dst = out.begin();
  for (const auto& px : image) *dst++ = rgb_to_lab(px).l;
  return out;
}

}  // namespace sparsedisp
