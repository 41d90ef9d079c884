#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace brdflab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kInvPi = 1.0 / kPi;

inline double sqr(double x) { return x * x; }

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

/// acos with the argument clamped to [-1, 1]; keeps roundoff from
/// producing NaNs at the poles.
inline double safe_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

inline double sigmoid(double x) {
    if (x >= 0.0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

inline double sigmoid_deriv(double x) {
    double s = sigmoid(x);
    return s * (1.0 - s);
}

/// log(1 + e^x) without overflow; for x > 30 the correction term is below
/// double precision and the identity softplus(x) ~= x is used.
inline double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

inline double softplus_deriv(double x) { return sigmoid(x); }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 &operator+=(const Vec3 &o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    double squared_norm() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(squared_norm()); }
    Vec3 normalized() const { return *this / norm(); }
};

inline Vec3 operator*(double s, const Vec3 &v) { return v * s; }

inline double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline Vec3 min(const Vec3 &a, const Vec3 &b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}

inline Vec3 max(const Vec3 &a, const Vec3 &b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

/// Mirror reflection of direction w about the normal n (both unit).
inline Vec3 reflect(const Vec3 &w, const Vec3 &n) { return n * (2.0 * dot(n, w)) - w; }

template <typename T>
struct TColor {
    T r{}, g{}, b{};

    TColor() = default;
    TColor(T r_, T g_, T b_) : r(r_), g(g_), b(b_) {}
    explicit TColor(T v) : r(v), g(v), b(v) {}

    TColor operator+(const TColor &o) const { return {r + o.r, g + o.g, b + o.b}; }
    TColor operator-(const TColor &o) const { return {r - o.r, g - o.g, b - o.b}; }
    TColor operator*(const TColor &o) const { return {r * o.r, g * o.g, b * o.b}; }
    template <typename S>
    TColor operator*(S s) const {
        return {r * s, g * s, b * s};
    }
    TColor &operator+=(const TColor &o) {
        r = r + o.r;
        g = g + o.g;
        b = b + o.b;
        return *this;
    }
    T operator[](int i) const { return i == 0 ? r : (i == 1 ? g : b); }
};

template <typename T, typename S>
TColor<T> operator*(S s, const TColor<T> &c) {
    return c * s;
}

using RGB = TColor<double>;

inline double max_channel(const RGB &c) { return std::max(c.r, std::max(c.g, c.b)); }

inline bool all_finite(const RGB &c) {
    return std::isfinite(c.r) && std::isfinite(c.g) && std::isfinite(c.b);
}

inline RGB clamp(const RGB &c, double lo, double hi) {
    return {std::clamp(c.r, lo, hi), std::clamp(c.g, lo, hi), std::clamp(c.b, lo, hi)};
}

/// Right-handed orthonormal shading frame; b = n x t holds by construction.
struct LocalFrame {
    Vec3 n, t, b;

    Vec3 to_local(const Vec3 &w) const { return {dot(w, t), dot(w, b), dot(w, n)}; }
    Vec3 to_world(const Vec3 &w) const { return t * w.x + b * w.y + n * w.z; }
};

/// Deterministic frame from a unit normal: the coordinate axis least aligned
/// with n is projected to the tangent plane and normalized. Isotropic BRDFs
/// do not depend on the choice; a fixed rule keeps results reproducible.
inline LocalFrame make_frame(const Vec3 &n) {
    double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
    Vec3 e = (ax <= ay && ax <= az) ? Vec3{1, 0, 0} : (ay <= az ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    Vec3 t = (e - n * dot(n, e)).normalized();
    return {n, t, cross(n, t)};
}

struct Mat3 {
    // row-major
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return {}; }

    static Mat3 from_rows(const Vec3 &r0, const Vec3 &r1, const Vec3 &r2) {
        Mat3 out;
        out.m = {r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z};
        return out;
    }

    static Mat3 from_cols(const Vec3 &c0, const Vec3 &c1, const Vec3 &c2) {
        Mat3 out;
        out.m = {c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z};
        return out;
    }

    Vec3 operator*(const Vec3 &v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 operator*(const Mat3 &o) const {
        Mat3 out;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += m[3 * i + k] * o.m[3 * k + j];
                out.m[3 * i + j] = s;
            }
        return out;
    }

    Mat3 transposed() const {
        Mat3 out;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out.m[3 * i + j] = m[3 * j + i];
        return out;
    }

    /// Rodrigues rotation about a unit axis.
    static Mat3 rotation(const Vec3 &axis, double angle) {
        double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
        const Vec3 &a = axis;
        Mat3 out;
        out.m = {t * a.x * a.x + c,       t * a.x * a.y - s * a.z, t * a.x * a.z + s * a.y,
                 t * a.x * a.y + s * a.z, t * a.y * a.y + c,       t * a.y * a.z - s * a.x,
                 t * a.x * a.z - s * a.y, t * a.y * a.z + s * a.x, t * a.z * a.z + c};
        return out;
    }
};

}  // namespace brdflab
