#pragma once

#include "brdflab/math.hpp"

namespace brdflab {

/// Linear-to-sRGB gamma map on [0,1]:
/// 323/25 c below the 0.0031308 breakpoint, 211/200 c^(5/12) - 11/200 above.
inline double srgb_gamma(double c) {
    return c <= 0.0031308 ? (323.0 / 25.0) * c
                          : (211.0 / 200.0) * std::pow(c, 5.0 / 12.0) - 11.0 / 200.0;
}

inline double srgb_gamma_deriv(double c) {
    return c <= 0.0031308 ? 323.0 / 25.0
                          : (211.0 / 200.0) * (5.0 / 12.0) * std::pow(c, 5.0 / 12.0 - 1.0);
}

inline double srgb_gamma_inverse(double s) {
    return s <= srgb_gamma(0.0031308) ? s * (25.0 / 323.0)
                                      : std::pow((s + 11.0 / 200.0) / (211.0 / 200.0), 12.0 / 5.0);
}

inline RGB srgb_gamma(const RGB &c) {
    return {srgb_gamma(c.r), srgb_gamma(c.g), srgb_gamma(c.b)};
}

/// HDR linear value to an 8-bit sRGB code (clamped).
inline unsigned char linear_to_srgb8(double c) {
    double s = srgb_gamma(clamp01(c));
    return static_cast<unsigned char>(std::lround(std::clamp(s, 0.0, 1.0) * 255.0));
}

}  // namespace brdflab
