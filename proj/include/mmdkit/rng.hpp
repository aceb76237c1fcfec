#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "mmdkit/types.hpp"

namespace mmdkit {

namespace detail {

// SplitMix64 finalizer, used to scramble user seeds and derive substreams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Seeded generator with explicit, portable transforms (mt19937_64 raw output
/// plus our own uniform/normal/shuffle code), so identical seeds give
/// identical streams on every platform and standard library.
///
/// Substream rule: stream(i) is seeded with mix64(seed ^ mix64(i + 1)) where
/// seed is the *construction* seed. Parallel consumers that draw from
/// stream(0), stream(1), ... therefore produce results independent of
/// scheduling order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(detail::mix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    Rng stream(std::uint64_t idx) const { return Rng(seed_ ^ detail::mix64(idx + 1)); }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n) by rejection, unbiased.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    /// Standard normal via Box-Muller (cached spare).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Laplace(mu, b) by inverse CDF.
    double laplace(double mu, double b) {
        const double u = uniform01() - 0.5;
        const double s = (u < 0.0) ? -1.0 : 1.0;
        return mu - b * s * std::log1p(-2.0 * std::abs(u));
    }

    /// Fisher-Yates permutation of {0, ..., n-1}.
    std::vector<Index> permutation(Index n) {
        std::vector<Index> p(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
        for (Index i = n - 1; i > 0; --i)
            std::swap(p[static_cast<std::size_t>(i)],
                      p[static_cast<std::size_t>(below(static_cast<std::uint64_t>(i) + 1))]);
        return p;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace mmdkit
