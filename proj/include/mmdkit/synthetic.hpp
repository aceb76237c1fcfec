#pragma once

#include <cmath>
#include <stdexcept>

#include "mmdkit/rng.hpp"
#include "mmdkit/types.hpp"

namespace mmdkit {

inline Sample sample_normal(Index m, Index d, Rng& rng, double mean = 0.0, double stddev = 1.0) {
    Matrix pts(m, d);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < d; ++j) pts(i, j) = mean + stddev * rng.normal();
    return Sample(std::move(pts));
}

inline Sample sample_uniform(Index m, Index d, Rng& rng, double lo = 0.0, double hi = 1.0) {
    Matrix pts(m, d);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < d; ++j) pts(i, j) = rng.uniform(lo, hi);
    return Sample(std::move(pts));
}

inline Sample sample_laplace(Index m, Index d, Rng& rng, double mu = 0.0, double b = 1.0) {
    Matrix pts(m, d);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < d; ++j) pts(i, j) = rng.laplace(mu, b);
    return Sample(std::move(pts));
}

enum class Scenario { mean_shift, var_shift };

inline const char* to_string(Scenario s) {
    return s == Scenario::mean_shift ? "mean-shift" : "var-shift";
}

/// Benchmark data: X ~ N(0, I_d); for mean-shift Y ~ N(shift * 1, I_d), for
/// var-shift Y ~ N(0, shift^2 I_d). shift = 0 resp. 1 recovers the null.
inline std::pair<Sample, Sample> scenario_pair(Scenario s, Index d, Index m, double shift, Rng& rng) {
    Sample x = sample_normal(m, d, rng);
    Sample y = (s == Scenario::mean_shift) ? sample_normal(m, d, rng, shift, 1.0)
                                           : sample_normal(m, d, rng, 0.0, shift);
    return {std::move(x), std::move(y)};
}

}  // namespace mmdkit
