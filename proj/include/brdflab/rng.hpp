#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "brdflab/math.hpp"

namespace brdflab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Seeded RNG with explicit variate transforms. std::mt19937_64 output is
/// fully specified by the standard; the std::*_distribution classes are not,
/// so all distributions here are implemented by hand to keep results
/// byte-identical across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : engine_(splitmix64(seed)) {}

    /// Independent substream for (seed, index) pairs, e.g. one per audit pair
    /// or per rendered image.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(splitmix64(seed ^ splitmix64(index + 1)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) by rejection; exact, no modulo bias.
    std::uint64_t uniform_below(std::uint64_t n) {
        std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal via Box-Muller; one spare kept between calls.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = kTwoPi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform on the unit disk (polar mapping).
    void sample_disk(double &x, double &y) {
        double r = std::sqrt(uniform());
        double phi = kTwoPi * uniform();
        x = r * std::cos(phi);
        y = r * std::sin(phi);
    }

    /// Cosine-weighted direction in the local frame (z up): Malley's method,
    /// uniform disk sample projected up to the hemisphere. pdf = cos(theta)/pi.
    Vec3 sample_cosine_hemisphere() {
        double x, y;
        sample_disk(x, y);
        double z = std::sqrt(std::max(0.0, 1.0 - x * x - y * y));
        return {x, y, z};
    }

    Vec3 sample_sphere() {
        double z = uniform(-1.0, 1.0);
        double phi = kTwoPi * uniform();
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

    /// Uniform barycentrics over a triangle (sqrt warp).
    void sample_triangle(double &u, double &v) {
        double su = std::sqrt(uniform());
        u = 1.0 - su;
        v = uniform() * su;
    }

    template <typename T>
    void shuffle(std::vector<T> &items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = std::size_t(uniform_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace brdflab
