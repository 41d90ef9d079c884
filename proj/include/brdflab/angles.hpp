#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "brdflab/math.hpp"

namespace brdflab {

/// Half/difference angle parametrization of an isotropic direction pair.
/// theta_h, theta_d in [0, pi/2]; phi_d in [0, 2*pi).
struct RusinkiewiczAngles {
    double theta_h = 0.0;
    double theta_d = 0.0;
    double phi_d = 0.0;
};

/// Reciprocity-safe image of the Rusinkiewicz angles: phi_d is collapsed to
/// its value modulo pi and re-expanded as the pair (phi, phi + pi), which is
/// invariant under exchanging view and light.
struct ReciprocalAngles {
    double theta_h = 0.0;
    double theta_d = 0.0;
    double phi_d_mod_pi = 0.0;           // in [0, pi)
    double phi_d_mod_pi_plus_pi = 0.0;   // = phi_d_mod_pi + pi
};

inline Vec3 half_vector(const Vec3 &v, const Vec3 &l) {
    Vec3 s = v + l;
    double n2 = s.squared_norm();
    if (n2 < 1e-24) throw std::invalid_argument("half_vector: v and l are opposite");
    return s / std::sqrt(n2);
}

namespace detail {

// Rotation taking the half vector (given in local frame coordinates) onto the
// local z axis: rot_y(-theta_h) * rot_z(-phi_h). Returned as the two pairs of
// sines/cosines; derived from h only, so it is identical for (v,l) and (l,v).
struct HalfVectorRotation {
    double cos_ph = 1.0, sin_ph = 0.0;
    double cos_th = 1.0, sin_th = 0.0;

    explicit HalfVectorRotation(const Vec3 &h_local) {
        cos_th = std::clamp(h_local.z, -1.0, 1.0);
        double s = std::hypot(h_local.x, h_local.y);
        sin_th = s;
        if (s > 1e-12) {
            cos_ph = h_local.x / s;
            sin_ph = h_local.y / s;
        }
        // theta_h ~ 0: phi_h is undefined; the identity azimuth is used.
    }

    Vec3 apply(const Vec3 &w) const {
        // rot_z(-phi_h)
        Vec3 a{cos_ph * w.x + sin_ph * w.y, -sin_ph * w.x + cos_ph * w.y, w.z};
        // rot_y(-theta_h)
        return {cos_th * a.x - sin_th * a.z, a.y, sin_th * a.x + cos_th * a.z};
    }

    Vec3 apply_inverse(const Vec3 &w) const {
        // rot_y(theta_h)
        Vec3 a{cos_th * w.x + sin_th * w.z, w.y, -sin_th * w.x + cos_th * w.z};
        // rot_z(phi_h)
        return {cos_ph * a.x - sin_ph * a.y, sin_ph * a.x + cos_ph * a.y, a.z};
    }
};

inline void require_upper_hemisphere(const LocalFrame &frame, const Vec3 &v, const Vec3 &l) {
    if (dot(frame.n, v) <= 0.0 || dot(frame.n, l) <= 0.0)
        throw std::domain_error("direction below the surface hemisphere");
}

}  // namespace detail

/// Rusinkiewicz angles of an upper-hemisphere direction pair. When the
/// difference azimuth is geometrically undefined (theta_h = 0 with the half
/// vector on the normal, or theta_d = 0) it is set to 0.
inline RusinkiewiczAngles rusinkiewicz_from_dirs(const LocalFrame &frame, const Vec3 &v,
                                                 const Vec3 &l) {
    detail::require_upper_hemisphere(frame, v, l);
    Vec3 lv = frame.to_local(v);
    Vec3 ll = frame.to_local(l);
    Vec3 h = half_vector(lv, ll);

    detail::HalfVectorRotation rot(h);
    RusinkiewiczAngles a;
    a.theta_h = safe_acos(h.z);

    Vec3 d = rot.apply(ll);
    a.theta_d = safe_acos(d.z);
    double s = std::hypot(d.x, d.y);
    if (s > 1e-12) {
        a.phi_d = std::atan2(d.y, d.x);
        if (a.phi_d < 0.0) a.phi_d += kTwoPi;
        if (a.phi_d >= kTwoPi) a.phi_d -= kTwoPi;
    }
    return a;
}

/// Reciprocity-safe angles computed directly from the direction pair. Every
/// floating point operation here is symmetric in (v, l) -- the half vector
/// uses a commutative sum, theta_d averages the two mathematically equal
/// dot products, and the folded difference azimuth is built from the exact
/// difference of the two rotated tangential parts -- so swapping the inputs
/// reproduces the same bits.
inline ReciprocalAngles reciprocal_from_dirs(const LocalFrame &frame, const Vec3 &v,
                                             const Vec3 &l) {
    detail::require_upper_hemisphere(frame, v, l);
    Vec3 lv = frame.to_local(v);
    Vec3 ll = frame.to_local(l);
    Vec3 h = half_vector(lv, ll);

    detail::HalfVectorRotation rot(h);
    ReciprocalAngles a;
    a.theta_h = safe_acos(h.z);

    Vec3 dl = rot.apply(ll);
    Vec3 dv = rot.apply(lv);
    a.theta_d = safe_acos(0.5 * (dl.z + dv.z));

    // dv's tangential part is the exact negation of dl's under exchange, so
    // the difference below flips sign bit-for-bit; folding it to the upper
    // half plane cancels the flip.
    double ux = dl.x - dv.x;
    double uy = dl.y - dv.y;
    if (uy < 0.0 || (uy == 0.0 && ux < 0.0)) {
        ux = -ux;
        uy = -uy;
    }
    if (std::hypot(ux, uy) > 1e-12) {
        a.phi_d_mod_pi = std::atan2(uy, ux);
        if (a.phi_d_mod_pi >= kPi) a.phi_d_mod_pi = 0.0;
    }
    a.phi_d_mod_pi_plus_pi = a.phi_d_mod_pi + kPi;
    return a;
}

/// Angle-level reciprocity mapping. phi_d in [pi, 2*pi) is reduced by an
/// exact subtraction, so two inputs that are exact +/- pi translates of each
/// other map to identical bits.
inline ReciprocalAngles reciprocity_map(const RusinkiewiczAngles &a) {
    ReciprocalAngles out;
    out.theta_h = a.theta_h;
    out.theta_d = a.theta_d;
    out.phi_d_mod_pi = a.phi_d < kPi ? a.phi_d : a.phi_d - kPi;
    out.phi_d_mod_pi_plus_pi = out.phi_d_mod_pi + kPi;
    return out;
}

/// Inverse of rusinkiewicz_from_dirs for a chosen (irrelevant for isotropic
/// BRDFs) half-vector azimuth. Outputs may land below the hemisphere for
/// grazing angle combinations; callers filter.
inline std::pair<Vec3, Vec3> rusinkiewicz_to_dirs(const LocalFrame &frame,
                                                  const RusinkiewiczAngles &a, double phi_h) {
    double sh = std::sin(a.theta_h), ch = std::cos(a.theta_h);
    double sd = std::sin(a.theta_d), cd = std::cos(a.theta_d);
    Vec3 d{sd * std::cos(a.phi_d), sd * std::sin(a.phi_d), cd};
    Vec3 dm{-d.x, -d.y, d.z};

    detail::HalfVectorRotation rot{Vec3{sh * std::cos(phi_h), sh * std::sin(phi_h), ch}};
    Vec3 l = rot.apply_inverse(d);
    Vec3 v = rot.apply_inverse(dm);
    return {frame.to_world(v), frame.to_world(l)};
}

struct PositionalEncodingConfig {
    int num_frequencies = 3;
    bool include_raw = true;
};

inline int encoded_dim(int num_inputs, const PositionalEncodingConfig &cfg) {
    return num_inputs * ((cfg.include_raw ? 1 : 0) + 2 * cfg.num_frequencies);
}

/// NeRF-style positional encoding: per input a, features
/// [a (optional), sin(2^k a), cos(2^k a)] for k = 0..F-1, appended to out.
inline void positional_encode_append(std::span<const double> values,
                                     const PositionalEncodingConfig &cfg,
                                     std::vector<double> &out) {
    for (double a : values) {
        if (cfg.include_raw) out.push_back(a);
        double scale = 1.0;
        for (int k = 0; k < cfg.num_frequencies; ++k) {
            out.push_back(std::sin(scale * a));
            out.push_back(std::cos(scale * a));
            scale *= 2.0;
        }
    }
}

inline std::vector<double> positional_encode(std::span<const double> values,
                                             const PositionalEncodingConfig &cfg) {
    std::vector<double> out;
    out.reserve(encoded_dim(int(values.size()), cfg));
    positional_encode_append(values, cfg, out);
    return out;
}

}  // namespace brdflab
