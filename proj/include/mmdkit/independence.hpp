#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mmdkit/kernels.hpp"
#include "mmdkit/null_models.hpp"
#include "mmdkit/rng.hpp"
#include "mmdkit/two_sample.hpp"
#include "mmdkit/types.hpp"

namespace mmdkit {

/// Gram matrices of the two variables of a paired sample.
struct HsicInput {
    Matrix k;
    Matrix l;

    HsicInput(Matrix k_in, Matrix l_in) : k(std::move(k_in)), l(std::move(l_in)) {
        if (k.rows() != k.cols() || l.rows() != l.cols())
            throw std::invalid_argument("HsicInput: Gram matrices must be square");
        if (k.rows() != l.rows()) throw std::invalid_argument("HsicInput: K and L sizes differ");
        if (k.rows() < 2) throw std::invalid_argument("HsicInput: need m >= 2");
        for (const Matrix* g : {&k, &l}) {
            const double scale = std::max(1.0, g->cwiseAbs().maxCoeff());
            if ((*g - g->transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
                throw std::invalid_argument("HsicInput: Gram matrix is not symmetric");
        }
    }

    Index size() const { return k.rows(); }
};

namespace detail {

inline double hsic_from_centered(const Matrix& k_centered, const Matrix& l) {
    const Index m = k_centered.rows();
    // tr(HKHL) = sum_ij (HKH)_ij L_ij for symmetric L.
    const double trace = k_centered.cwiseProduct(l).sum();
    double v = trace / (double(m) * double(m));
    if (v < 0.0) v = 0.0;  // numerical noise; analytically >= 0 for PSD inputs
    return v;
}

}  // namespace detail

/// HSIC estimate (1/m^2) tr(HKHL) with H = I - 11'/m, clamped at 0.
inline double hsic_statistic(const HsicInput& inp) {
    return detail::hsic_from_centered(center_gram(inp.k), inp.l);
}

/// Permutation test for independence: the product of the marginals is
/// simulated by applying a common random permutation to L's rows and columns.
/// Add-one p-value; rejects iff p <= alpha. The reported threshold is the
/// order statistic that makes "statistic > threshold" equivalent to that
/// rule, ties included.
inline TestResult hsic_permutation_test(const HsicInput& inp, Index b, double alpha,
                                        const Rng& rng) {
    if (b < 1) throw std::invalid_argument("hsic_permutation_test: need B >= 1");
    detail::check_alpha(alpha);
    const Index m = inp.size();
    const Matrix k_centered = center_gram(inp.k);

    TestResult res;
    res.method = Method::hsic_perm;
    res.seed = rng.seed();
    const auto t0 = std::chrono::steady_clock::now();

    const double observed = detail::hsic_from_centered(k_centered, inp.l);
    std::vector<double> null_samples;
    null_samples.reserve(std::size_t(b));
    Matrix permuted(m, m);
    for (Index it = 0; it < b; ++it) {
        Rng stream = rng.stream(std::uint64_t(it));
        const std::vector<Index> p = stream.permutation(m);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) permuted(i, j) = inp.l(p[std::size_t(i)], p[std::size_t(j)]);
        null_samples.push_back(detail::hsic_from_centered(k_centered, permuted));
    }

    const double p_value = permutation_p_value(null_samples, observed);
    // Largest exceedance count r with (1 + r)/(1 + B) <= alpha.
    Index jmax = -1;
    while (jmax + 1 < b && double(jmax + 2) / double(b + 1) <= alpha) ++jmax;
    double threshold;
    if (jmax < 0) {
        threshold = std::numeric_limits<double>::infinity();
    } else {
        std::vector<double> sorted = null_samples;
        std::sort(sorted.begin(), sorted.end());
        threshold = sorted[std::size_t(b - jmax - 1)];
    }

    res.statistic = {observed, StatKind::hsic, m, m};
    res.threshold = threshold;
    res.p_value = p_value;
    res.reject = p_value <= alpha;
    res.m = m;
    res.n = m;
    const auto t1 = std::chrono::steady_clock::now();
    res.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return res;
}

}  // namespace mmdkit
