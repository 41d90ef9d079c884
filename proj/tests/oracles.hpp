#pragma once

// Independent reference implementations used only as test oracles. They are
// deliberately written against different primitives than the library paths
// they check (explicit rotation matrices instead of the in-frame rotations,
// scalar loops instead of batched algebra).

#include <functional>
#include <vector>

#include "brdflab/math.hpp"
#include "brdflab/rng.hpp"

namespace oracles {

using brdflab::LocalFrame;
using brdflab::Mat3;
using brdflab::Vec3;

// Rusinkiewicz angles via explicit Rodrigues rotation matrices,
// d = rot(b, -theta_h) * rot(n, -phi_h) * l.
struct RusinkiewiczRef {
    double theta_h, theta_d, phi_d;
};

inline RusinkiewiczRef rusinkiewicz_rotation_matrices(const LocalFrame &f, const Vec3 &v,
                                                      const Vec3 &l) {
    Vec3 h = (v + l).normalized();
    double cos_th = std::clamp(brdflab::dot(f.n, h), -1.0, 1.0);
    double theta_h = std::acos(cos_th);

    Vec3 h_tan = h - f.n * brdflab::dot(f.n, h);
    double phi_h = h_tan.norm() > 1e-12
                       ? std::atan2(brdflab::dot(h_tan, f.b), brdflab::dot(h_tan, f.t))
                       : 0.0;

    Mat3 r1 = Mat3::rotation(f.n, -phi_h);
    Mat3 r2 = Mat3::rotation(f.b, -theta_h);
    Vec3 d = r2 * (r1 * l);

    double theta_d = std::acos(std::clamp(brdflab::dot(d, f.n), -1.0, 1.0));
    Vec3 d_tan = d - f.n * brdflab::dot(d, f.n);
    double phi_d = 0.0;
    if (d_tan.norm() > 1e-9) {
        phi_d = std::atan2(brdflab::dot(d_tan, f.b), brdflab::dot(d_tan, f.t));
        if (phi_d < 0.0) phi_d += brdflab::kTwoPi;
    }
    return {theta_h, theta_d, phi_d};
}

// Cosine-weighted Monte Carlo estimate of integral_H g(w) cos(theta) dw for a
// scalar integrand given in local (z-up) coordinates. Returns the estimate
// and the standard error.
struct McEstimate {
    double value;
    double sigma;
};

inline McEstimate cosine_mc(const std::function<double(const Vec3 &)> &g, int n,
                            brdflab::Rng &rng) {
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec3 w = rng.sample_cosine_hemisphere();
        double f = brdflab::kPi * g(w);  // f/pdf with pdf = cos/pi
        sum += f;
        sum2 += f * f;
    }
    double mean = sum / n;
    double var = std::max(0.0, sum2 / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

// Same estimator with the radial disk coordinate stratified; all the
// variation of a peaked isotropic lobe lives along that axis, which brings
// sharp NDFs within tight tolerance at modest sample counts.
inline double stratified_cosine_mc(const std::function<double(const Vec3 &)> &g, int n,
                                   brdflab::Rng &rng) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double u1 = (i + rng.uniform()) / n;
        double u2 = rng.uniform();
        double r = std::sqrt(u1), phi = brdflab::kTwoPi * u2;
        double x = r * std::cos(phi), y = r * std::sin(phi);
        Vec3 w{x, y, std::sqrt(std::max(0.0, 1.0 - x * x - y * y))};
        sum += brdflab::kPi * g(w);
    }
    return sum / n;
}

}  // namespace oracles
