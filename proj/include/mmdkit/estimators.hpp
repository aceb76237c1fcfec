#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "mmdkit/kernels.hpp"
#include "mmdkit/types.hpp"

namespace mmdkit {

// Accumulations run in long double so that reordering the inputs does not
// move the rounded double result.

/// Biased statistic: sqrt of m^-2 sum(kxx) - 2(mn)^-1 sum(kxy) + n^-2 sum(kyy).
/// The radicand is a squared RKHS norm, hence analytically nonnegative; values
/// in [-1e-12, 0) are clamped to 0, anything lower signals an inconsistency.
inline StatValue mmd_biased(const GramBlocks& g) {
    long double sxx = 0.0L, syy = 0.0L, sxy = 0.0L;
    for (Index i = 0; i < g.m; ++i)
        for (Index j = 0; j < g.m; ++j) sxx += g.kxx(i, j);
    for (Index i = 0; i < g.n; ++i)
        for (Index j = 0; j < g.n; ++j) syy += g.kyy(i, j);
    for (Index i = 0; i < g.m; ++i)
        for (Index j = 0; j < g.n; ++j) sxy += g.kxy(i, j);
    const long double m = static_cast<long double>(g.m);
    const long double n = static_cast<long double>(g.n);
    double radicand = static_cast<double>(sxx / (m * m) - 2.0L * sxy / (m * n) + syy / (n * n));
    if (radicand < -1e-12)
        throw std::runtime_error("mmd_biased: radicand below -1e-12, inconsistent Gram blocks");
    if (radicand < 0.0) radicand = 0.0;
    return {std::sqrt(radicand), StatKind::mmd_b, g.m, g.n};
}

/// U-statistic kernel h(z_i, z_j) = k(x_i,x_j) + k(y_i,y_j) - k(x_i,y_j) - k(x_j,y_i).
/// Summed in a swap-invariant order, so h(i, j) == h(j, i) holds bitwise; the
/// diagonal is excluded from the U-statistic.
inline double h_kernel(const GramBlocks& g, Index i, Index j) {
    if (g.m != g.n) throw std::invalid_argument("h_kernel: requires paired samples (m = n)");
    if (i == j) throw std::invalid_argument("h_kernel: i = j is excluded");
    if (i < 0 || j < 0 || i >= g.m || j >= g.m) throw std::out_of_range("h_kernel: index out of range");
    return (g.kxx(i, j) + g.kyy(i, j)) - (g.kxy(i, j) + g.kxy(j, i));
}

/// Unbiased estimate of MMD^2: (1/(m(m-1))) sum_{i != j} h(z_i, z_j).
inline StatValue mmd_u_squared(const GramBlocks& g) {
    if (g.m != g.n) throw std::invalid_argument("mmd_u_squared: requires paired samples (m = n)");
    if (g.m < 2) throw std::invalid_argument("mmd_u_squared: need m >= 2");
    long double sum = 0.0L;
    for (Index i = 0; i < g.m; ++i)
        for (Index j = i + 1; j < g.m; ++j)
            sum += (g.kxx(i, j) + g.kyy(i, j)) - (g.kxy(i, j) + g.kxy(j, i));
    const long double m = static_cast<long double>(g.m);
    return {static_cast<double>(2.0L * sum / (m * (m - 1.0L))), StatKind::mmd_u_sq, g.m, g.n};
}

namespace detail {

// One h-term of the linear statistic, from points (no Gram matrix).
inline double linear_h_term(const PairedSample& p, const KernelSpec& spec, Index a, Index b) {
    return (eval_kernel(spec, p.x.row(a), p.x.row(b)) + eval_kernel(spec, p.y.row(a), p.y.row(b))) -
           (eval_kernel(spec, p.x.row(a), p.y.row(b)) + eval_kernel(spec, p.x.row(b), p.y.row(a)));
}

}  // namespace detail

/// Linear-time statistic MMD_l^2: average of h over the successive disjoint
/// pairs (z_1,z_2), (z_3,z_4), ... in input order. Single pass, O(1) extra
/// memory.
inline StatValue mmd_linear(const PairedSample& p, const KernelSpec& spec) {
    if (p.size() < 2) throw std::invalid_argument("mmd_linear: need m >= 2");
    if (spec.family == KernelFamily::precomputed)
        throw std::invalid_argument("mmd_linear: requires a pointwise kernel");
    const Index m2 = p.size() / 2;
    long double sum = 0.0L;
    for (Index i = 0; i < m2; ++i) sum += detail::linear_h_term(p, spec, 2 * i, 2 * i + 1);
    return {static_cast<double>(sum / static_cast<long double>(m2)), StatKind::mmd_l_sq, p.size(),
            p.size()};
}

/// Plug-in estimate of sigma_l^2 = 2[E h^2 - (E h)^2] from a list of h values
/// (population variance form, divisor = count).
inline double sigma_l_squared_hat(std::span<const double> h_values) {
    if (h_values.size() < 2) throw std::invalid_argument("sigma_l_squared_hat: need at least two h values");
    long double sum = 0.0L, sum_sq = 0.0L;
    for (double h : h_values) {
        sum += h;
        sum_sq += static_cast<long double>(h) * h;
    }
    const long double c = static_cast<long double>(h_values.size());
    const long double mean = sum / c;
    long double var = sum_sq / c - mean * mean;
    if (var < 0.0L) var = 0.0L;  // rounding
    return static_cast<double>(2.0L * var);
}

/// Linear statistic together with its variance estimate, one pass, O(1) memory.
struct LinearStat {
    double value = 0.0;       // MMD_l^2
    double sigma_l_sq = 0.0;  // 2 * Var(h) over the m/2 terms
    Index terms = 0;
};

inline LinearStat linear_stat(const PairedSample& p, const KernelSpec& spec) {
    if (p.size() < 2) throw std::invalid_argument("linear_stat: need m >= 2");
    if (spec.family == KernelFamily::precomputed)
        throw std::invalid_argument("linear_stat: requires a pointwise kernel");
    const Index m2 = p.size() / 2;
    long double sum = 0.0L, sum_sq = 0.0L;
    for (Index i = 0; i < m2; ++i) {
        const long double h = detail::linear_h_term(p, spec, 2 * i, 2 * i + 1);
        sum += h;
        sum_sq += h * h;
    }
    const long double c = static_cast<long double>(m2);
    const long double mean = sum / c;
    long double var = (m2 >= 2) ? sum_sq / c - mean * mean : 0.0L;
    if (var < 0.0L) var = 0.0L;
    return {static_cast<double>(mean), static_cast<double>(2.0L * var), m2};
}

/// Adds back the diagonal terms h(z_i, z_i) dropped by the U-statistic:
/// v + (1/(m(m-1))) sum_i [k(x_i,x_i) + k(y_i,y_i) - 2 k(x_i,y_i)] >= 0.
inline double nonneg_corrected(const GramBlocks& g, double mmd_u_sq_value) {
    if (g.m != g.n) throw std::invalid_argument("nonneg_corrected: requires paired samples (m = n)");
    if (g.m < 2) throw std::invalid_argument("nonneg_corrected: need m >= 2");
    long double corr = 0.0L;
    for (Index i = 0; i < g.m; ++i) corr += g.kxx(i, i) + g.kyy(i, i) - 2.0L * g.kxy(i, i);
    const long double m = static_cast<long double>(g.m);
    return static_cast<double>(static_cast<long double>(mmd_u_sq_value) + corr / (m * (m - 1.0L)));
}

}  // namespace mmdkit
