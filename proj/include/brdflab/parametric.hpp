#pragma once

#include <span>
#include <stdexcept>
#include <variant>

#include "brdflab/angles.hpp"
#include "brdflab/dual.hpp"
#include "brdflab/math.hpp"

namespace brdflab {

// The analytic models are templated over the parameter scalar type. With
// T = double they evaluate normally; with T = Dual<N> they also produce the
// exact Jacobian of the BRDF value with respect to the parameters, which is
// what the parameter-prediction heads backpropagate through.

template <typename T>
struct RPParamsT {
    TColor<T> k_full;  // combined reflectivity per channel, in [0,1]
    TColor<T> zeta;    // diffuse fraction, in [0,1]; k_d = zeta*k_full
    T n;               // specular exponent, >= 1
};
using RPParams = RPParamsT<double>;

template <typename T>
struct TSParamsT {
    T r;                // perceptual roughness in [0,1]; alpha = r^2
    TColor<T> rho_d;    // diffuse albedo
    TColor<T> F0;       // characteristic specular reflectance
};
using TSParams = TSParamsT<double>;

template <typename T>
struct DisneyParamsT {
    TColor<T> base_color;
    T metallic, subsurface, specular, specular_tint;
    T roughness, sheen, sheen_tint, clearcoat, clearcoat_gloss;
    // anisotropic is fixed at 0: every model in the zoo is isotropic.
};
using DisneyParams = DisneyParamsT<double>;

enum class ParametricModel { RealisticPhong, TorranceSparrow, Disney };

inline int param_arity(ParametricModel m) {
    switch (m) {
        case ParametricModel::RealisticPhong: return 7;
        case ParametricModel::TorranceSparrow: return 7;
        case ParametricModel::Disney: return 12;
    }
    return 0;
}

inline const char *model_name(ParametricModel m) {
    switch (m) {
        case ParametricModel::RealisticPhong: return "rp";
        case ParametricModel::TorranceSparrow: return "ts";
        case ParametricModel::Disney: return "disney";
    }
    return "?";
}

template <typename A, typename B>
A mix(const A &a, const A &b, const B &t) {
    return a + (b - a) * t;
}

/// Trowbridge-Reitz/GGX normal distribution,
/// D = alpha^2 / (pi ((n.h)^2 (alpha^2 - 1) + 1)^2).
template <typename T>
T ggx_ndf(double cos_nh, const T &alpha) {
    T a2 = alpha * alpha;
    T t = sqr(cos_nh) * (a2 - 1.0) + 1.0;
    return a2 / (kPi * t * t);
}

/// One factor of Smith's separable shadowing term for GGX.
template <typename T>
T smith_g1(double cos_nw, const T &alpha) {
    T a2 = alpha * alpha;
    using std::sqrt;
    using brdflab::sqrt;
    return 2.0 * cos_nw / (cos_nw + sqrt(a2 + (1.0 - a2) * sqr(cos_nw)));
}

template <typename T>
T smith_g(double cos_nl, double cos_nv, const T &alpha) {
    return smith_g1(cos_nl, alpha) * smith_g1(cos_nv, alpha);
}

/// Schlick's Fresnel approximation, F = F0 + (1 - F0)(1 - cos)^5. A channel
/// with F0 exactly 0 means "no interface" and yields F = 0 rather than the
/// grazing ramp; sigmoid-activated parameters never reach the boundary, so
/// this only affects hand-built materials (and makes F0 = 0 reduce the
/// microfacet models to pure Lambertian).
template <typename T>
TColor<T> schlick_fresnel(double cos_vh, const TColor<T> &F0) {
    double w = sqr(sqr(1.0 - cos_vh)) * (1.0 - cos_vh);
    auto one = [&](const T &f0) {
        return value_of(f0) == 0.0 ? T(0.0) : T(f0 + (1.0 - f0) * w);
    };
    return {one(F0.r), one(F0.g), one(F0.b)};
}

namespace detail {

// Shared per-pair geometry. cos_hd averages the two mathematically equal
// half-vector dot products so that every model evaluates bit-identically
// under exchange of v and l.
struct PairGeometry {
    double cos_nl, cos_nv, cos_nh, cos_hd;

    PairGeometry(const LocalFrame &frame, const Vec3 &v, const Vec3 &l) {
        cos_nv = dot(frame.n, v);
        cos_nl = dot(frame.n, l);
        if (cos_nv <= 0.0 || cos_nl <= 0.0)
            throw std::domain_error("BRDF evaluated below the surface hemisphere");
        Vec3 h = half_vector(v, l);
        cos_nh = std::clamp(dot(frame.n, h), 0.0, 1.0);
        cos_hd = std::clamp(0.5 * (dot(h, l) + dot(h, v)), 0.0, 1.0);
    }
};

inline constexpr double kCosGuard = 1e-6;  // grazing guard for specular denominators

}  // namespace detail

/// Energy-preserving Phong: Lambertian part plus a normalized mirror lobe,
/// f = k_d/pi + k_s (n+2)/(2 pi) max(0, <r,v>)^n with r = reflect(l, n).
/// The hemispherical reflectance never exceeds k_d + k_s = k_full.
template <typename T>
TColor<T> eval_realistic_phong(const RPParamsT<T> &p, const LocalFrame &frame, const Vec3 &v,
                               const Vec3 &l) {
    detail::PairGeometry geo(frame, v, l);
    TColor<T> k_d = p.zeta * p.k_full;
    TColor<T> one_minus_zeta{1.0 - p.zeta.r, 1.0 - p.zeta.g, 1.0 - p.zeta.b};
    TColor<T> k_s = one_minus_zeta * p.k_full;

    // Both reflection orders are evaluated and averaged; they agree exactly
    // in real arithmetic, and the symmetric sum keeps reciprocity bitwise.
    double c = 0.5 * (dot(reflect(l, frame.n), v) + dot(reflect(v, frame.n), l));

    T lobe(0.0);
    if (c > 0.0) {
        using std::pow;
        using brdflab::pow;
        lobe = (p.n + 2.0) / kTwoPi * pow(std::min(c, 1.0), p.n);
    }
    return k_d * kInvPi + k_s * lobe;
}

/// Torrance-Sparrow microfacet model with GGX distribution, Smith shadowing
/// and Schlick Fresnel; the Lambertian part is diminished by 1 - F.
template <typename T>
TColor<T> eval_torrance_sparrow(const TSParamsT<T> &p, const LocalFrame &frame, const Vec3 &v,
                                const Vec3 &l) {
    detail::PairGeometry geo(frame, v, l);
    using brdflab::max;
    using std::max;
    T alpha = max(p.r * p.r, T(1e-7));

    T D = ggx_ndf(geo.cos_nh, alpha);
    T G = smith_g(geo.cos_nl, geo.cos_nv, alpha);
    TColor<T> F = schlick_fresnel(geo.cos_hd, p.F0);

    double denom = 4.0 * std::max(geo.cos_nl, detail::kCosGuard) *
                   std::max(geo.cos_nv, detail::kCosGuard);
    TColor<T> spec = F * (D * G / denom);
    TColor<T> one_minus_F{1.0 - F.r, 1.0 - F.g, 1.0 - F.b};
    return one_minus_F * p.rho_d * kInvPi + spec;
}

namespace detail {

// Generalized Trowbridge-Reitz with exponent 1 (clearcoat distribution).
template <typename T>
T gtr1(double cos_nh, const T &a) {
    if (value_of(a) >= 1.0) return T(kInvPi);
    using std::log;
    using brdflab::log;
    T a2 = a * a;
    return (a2 - 1.0) / (kPi * log(a2) * (1.0 + (a2 - 1.0) * sqr(cos_nh)));
}

}  // namespace detail

/// Isotropic Disney principled BRDF (Burley 2012): subsurface-blended diffuse,
/// GTR2 specular, GTR1 clearcoat and sheen. Transmission and anisotropy are
/// not modeled.
template <typename T>
TColor<T> eval_disney_iso(const DisneyParamsT<T> &p, const LocalFrame &frame, const Vec3 &v,
                          const Vec3 &l) {
    detail::PairGeometry geo(frame, v, l);
    using brdflab::max;
    using std::max;

    const TColor<T> white(T(1.0));
    TColor<T> Cdlin = p.base_color;
    T Cdlum = 0.3 * Cdlin.r + 0.6 * Cdlin.g + 0.1 * Cdlin.b;
    TColor<T> Ctint = value_of(Cdlum) > 0.0
                          ? TColor<T>{Cdlin.r / Cdlum, Cdlin.g / Cdlum, Cdlin.b / Cdlum}
                          : white;
    TColor<T> Cspec0 =
        mix(mix(white, Ctint, p.specular_tint) * (0.08 * p.specular), Cdlin, p.metallic);
    TColor<T> Csheen = mix(white, Ctint, p.sheen_tint);

    double FL = sqr(sqr(1.0 - geo.cos_nl)) * (1.0 - geo.cos_nl);
    double FV = sqr(sqr(1.0 - geo.cos_nv)) * (1.0 - geo.cos_nv);
    double FH = sqr(sqr(1.0 - geo.cos_hd)) * (1.0 - geo.cos_hd);

    // Burley diffuse with the retro-reflection driven Fd90.
    T Fd90 = 0.5 + 2.0 * sqr(geo.cos_hd) * p.roughness;
    T Fd = mix(T(1.0), Fd90, FL) * mix(T(1.0), Fd90, FV);

    // Hanrahan-Krueger inspired subsurface lobe.
    T Fss90 = sqr(geo.cos_hd) * p.roughness;
    T Fss = mix(T(1.0), Fss90, FL) * mix(T(1.0), Fss90, FV);
    T ss = 1.25 * (Fss * (1.0 / (geo.cos_nl + geo.cos_nv) - 0.5) + 0.5);

    T a = max(T(0.001), p.roughness * p.roughness);
    T Ds = ggx_ndf(geo.cos_nh, a);
    TColor<T> Fs = mix(Cspec0, white, T(FH));
    double denom = 4.0 * std::max(geo.cos_nl, detail::kCosGuard) *
                   std::max(geo.cos_nv, detail::kCosGuard);
    T Gs = smith_g(geo.cos_nl, geo.cos_nv, a) / denom;

    T Dr = detail::gtr1(geo.cos_nh, mix(T(0.1), T(0.001), p.clearcoat_gloss));
    double Fr = 0.04 + 0.96 * FH;
    T Gr = smith_g(geo.cos_nl, geo.cos_nv, T(0.25)) / denom;

    TColor<T> sheen = Csheen * (FH * p.sheen);
    TColor<T> diffuse = (Cdlin * (kInvPi * mix(Fd, ss, p.subsurface)) + sheen) *
                        (1.0 - p.metallic);
    TColor<T> specular = Fs * (Ds * Gs);
    T coat = 0.25 * p.clearcoat * Gr * Fr * Dr;
    return diffuse + specular + TColor<T>(coat);
}

// ---------------------------------------------------------------------------
// Raw-output activation maps for the parameter-prediction heads.

template <typename T>
T sigmoid_t(const T &x) {
    using std::exp;
    using brdflab::exp;
    if (value_of(x) >= 0.0) {
        T e = exp(-x);
        return 1.0 / (1.0 + e);
    }
    T e = exp(x);
    return e / (1.0 + e);
}

template <typename T>
T softplus_t(const T &x) {
    using std::exp;
    using std::log;
    using brdflab::exp;
    using brdflab::log;
    if (value_of(x) > 30.0) return x;
    if (value_of(x) < -30.0) return exp(x);
    return log(1.0 + exp(x));
}

template <typename T>
TColor<T> sigmoid3(const T *raw) {
    return {sigmoid_t(raw[0]), sigmoid_t(raw[1]), sigmoid_t(raw[2])};
}

template <typename T>
RPParamsT<T> activate_rp(const T *raw) {
    RPParamsT<T> p;
    p.k_full = sigmoid3(raw);
    p.zeta = sigmoid3(raw + 3);
    p.n = softplus_t(raw[6]) + 1.0;
    return p;
}

template <typename T>
TSParamsT<T> activate_ts(const T *raw) {
    TSParamsT<T> p;
    p.r = sigmoid_t(0.5 * raw[0]);  // roughness input halved for stability
    p.rho_d = sigmoid3(raw + 1);
    p.F0 = sigmoid3(raw + 4);
    return p;
}

template <typename T>
DisneyParamsT<T> activate_disney(const T *raw) {
    DisneyParamsT<T> p;
    p.base_color = sigmoid3(raw);
    p.metallic = sigmoid_t(raw[3]);
    p.subsurface = sigmoid_t(raw[4]);
    p.specular = sigmoid_t(raw[5]);
    p.specular_tint = sigmoid_t(raw[6]);
    p.roughness = sigmoid_t(0.5 * raw[7]);
    p.sheen = sigmoid_t(raw[8]);
    p.sheen_tint = sigmoid_t(raw[9]);
    p.clearcoat = sigmoid_t(raw[10]);
    p.clearcoat_gloss = sigmoid_t(raw[11]);
    return p;
}

using ParametricParams = std::variant<RPParams, TSParams, DisneyParams>;

inline ParametricParams activate_params(std::span<const double> raw, ParametricModel kind) {
    if (int(raw.size()) != param_arity(kind))
        throw std::invalid_argument("activate_params: raw vector length does not match model");
    switch (kind) {
        case ParametricModel::RealisticPhong: return activate_rp(raw.data());
        case ParametricModel::TorranceSparrow: return activate_ts(raw.data());
        case ParametricModel::Disney: return activate_disney(raw.data());
    }
    throw std::logic_error("unreachable");
}

inline RGB eval_parametric(const ParametricParams &params, const LocalFrame &frame, const Vec3 &v,
                           const Vec3 &l) {
    return std::visit(
        [&](const auto &p) -> RGB {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RPParams>) return eval_realistic_phong(p, frame, v, l);
            if constexpr (std::is_same_v<P, TSParams>)
                return eval_torrance_sparrow(p, frame, v, l);
            if constexpr (std::is_same_v<P, DisneyParams>) return eval_disney_iso(p, frame, v, l);
        },
        params);
}

}  // namespace brdflab
