#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace brdflab {

/// Forward-mode dual number carrying N partial derivatives. Used to get
/// exact Jacobians of the analytic BRDF models with respect to their
/// parameters without hand-deriving each formula.
template <int N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT: implicit from constants

    static Dual variable(double value, int slot) {
        Dual out(value);
        out.d[slot] = 1.0;
        return out;
    }

    Dual operator-() const {
        Dual out(-v);
        for (int i = 0; i < N; ++i) out.d[i] = -d[i];
        return out;
    }
    Dual operator+(const Dual &o) const {
        Dual out(v + o.v);
        for (int i = 0; i < N; ++i) out.d[i] = d[i] + o.d[i];
        return out;
    }
    Dual operator-(const Dual &o) const {
        Dual out(v - o.v);
        for (int i = 0; i < N; ++i) out.d[i] = d[i] - o.d[i];
        return out;
    }
    Dual operator*(const Dual &o) const {
        Dual out(v * o.v);
        for (int i = 0; i < N; ++i) out.d[i] = d[i] * o.v + v * o.d[i];
        return out;
    }
    Dual operator/(const Dual &o) const {
        Dual out(v / o.v);
        double inv2 = 1.0 / (o.v * o.v);
        for (int i = 0; i < N; ++i) out.d[i] = (d[i] * o.v - v * o.d[i]) * inv2;
        return out;
    }

    bool operator<(const Dual &o) const { return v < o.v; }
    bool operator>(const Dual &o) const { return v > o.v; }
    bool operator<=(const Dual &o) const { return v <= o.v; }
    bool operator>=(const Dual &o) const { return v >= o.v; }
};

template <int N>
Dual<N> operator+(double a, const Dual<N> &b) {
    return Dual<N>(a) + b;
}
template <int N>
Dual<N> operator-(double a, const Dual<N> &b) {
    return Dual<N>(a) - b;
}
template <int N>
Dual<N> operator*(double a, const Dual<N> &b) {
    return Dual<N>(a) * b;
}
template <int N>
Dual<N> operator/(double a, const Dual<N> &b) {
    return Dual<N>(a) / b;
}

template <int N>
Dual<N> sqrt(const Dual<N> &a) {
    Dual<N> out(std::sqrt(a.v));
    double s = 0.5 / out.v;
    for (int i = 0; i < N; ++i) out.d[i] = s * a.d[i];
    return out;
}

template <int N>
Dual<N> exp(const Dual<N> &a) {
    Dual<N> out(std::exp(a.v));
    for (int i = 0; i < N; ++i) out.d[i] = out.v * a.d[i];
    return out;
}

template <int N>
Dual<N> log(const Dual<N> &a) {
    Dual<N> out(std::log(a.v));
    for (int i = 0; i < N; ++i) out.d[i] = a.d[i] / a.v;
    return out;
}

/// a^p for constant integer-or-real exponent.
template <int N>
Dual<N> pow(const Dual<N> &a, double p) {
    Dual<N> out(std::pow(a.v, p));
    double s = (a.v == 0.0) ? 0.0 : p * out.v / a.v;
    for (int i = 0; i < N; ++i) out.d[i] = s * a.d[i];
    return out;
}

/// base^e for constant base > 0 and dual exponent.
template <int N>
Dual<N> pow(double base, const Dual<N> &e) {
    Dual<N> out(std::pow(base, e.v));
    double s = out.v * std::log(base);
    for (int i = 0; i < N; ++i) out.d[i] = s * e.d[i];
    return out;
}

template <int N>
Dual<N> pow(const Dual<N> &a, const Dual<N> &e) {
    return exp(e * log(a));
}

template <int N>
Dual<N> max(const Dual<N> &a, const Dual<N> &b) {
    return a.v >= b.v ? a : b;
}

template <int N>
Dual<N> min(const Dual<N> &a, const Dual<N> &b) {
    return a.v <= b.v ? a : b;
}

// Scalar fallbacks so templated code works with plain doubles.
inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N> &x) {
    return x.v;
}

}  // namespace brdflab
