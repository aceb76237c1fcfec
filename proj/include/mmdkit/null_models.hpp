#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mmdkit/distributions.hpp"
#include "mmdkit/estimators.hpp"
#include "mmdkit/kernels.hpp"
#include "mmdkit/rng.hpp"
#include "mmdkit/types.hpp"

namespace mmdkit {

namespace detail {

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

inline void check_bound(const std::optional<double>& bound_k) {
    if (!bound_k) throw std::invalid_argument("bound test requires a bounded kernel (bound_K missing)");
}

}  // namespace detail

/// Distribution-free threshold for MMD_b: sqrt(2K/m) (1 + sqrt(2 log(1/alpha))).
inline double threshold_biased_bound(double k_bound, Index m, double alpha) {
    if (!(k_bound > 0.0)) throw std::invalid_argument("threshold_biased_bound: K must be positive");
    if (m < 1) throw std::invalid_argument("threshold_biased_bound: m must be positive");
    detail::check_alpha(alpha);
    return std::sqrt(2.0 * k_bound / double(m)) * (1.0 + std::sqrt(2.0 * std::log(1.0 / alpha)));
}

/// Hoeffding threshold for MMD_u^2: (4K/sqrt(m)) sqrt(log(1/alpha)).
inline double threshold_hoeffding(double k_bound, Index m, double alpha) {
    if (!(k_bound > 0.0)) throw std::invalid_argument("threshold_hoeffding: K must be positive");
    if (m < 1) throw std::invalid_argument("threshold_hoeffding: m must be positive");
    detail::check_alpha(alpha);
    return 4.0 * k_bound / std::sqrt(double(m)) * std::sqrt(std::log(1.0 / alpha));
}

/// Empirical (1 - alpha) quantile: the ceil((1-alpha) B)-th order statistic.
inline double empirical_upper_quantile(std::vector<double> samples, double alpha) {
    if (samples.empty()) throw std::invalid_argument("empirical_upper_quantile: no samples");
    detail::check_alpha(alpha);
    const auto b = static_cast<double>(samples.size());
    auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b));
    k = std::clamp<std::size_t>(k, 1, samples.size());
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k - 1), samples.end());
    return samples[k - 1];
}

/// Add-one permutation p-value: (1 + #{samples >= observed}) / (1 + B).
inline double permutation_p_value(const std::vector<double>& null_samples, double observed) {
    if (null_samples.empty()) throw std::invalid_argument("permutation_p_value: no samples");
    std::size_t count = 0;
    for (double s : null_samples)
        if (s >= observed) ++count;
    return double(1 + count) / double(1 + null_samples.size());
}

enum class NullKind { biased_bound, hoeffding_bound, bootstrap, pearson_curve, spectral, gaussian_linear };

/// Plug-in moments of MMD_u^2 under H0, via the empirically centred kernel.
struct H0Moments {
    double m2 = 0.0;       // second moment
    double m3 = 0.0;       // third moment
    double skew = 0.0;     // m3 / m2^(3/2)
    double kurt_lb = 1.0;  // Wilkins lower bound skew^2 + 1
};

/// Pearson Type III (shifted gamma) member fitted to mean 0, variance m2 and
/// skewness m3/m2^(3/2). The member's own kurtosis is recorded so the Wilkins
/// bound can be checked against the fit.
struct PearsonFit {
    double variance = 0.0;
    double skewness = 0.0;
    bool normal_fallback = false;  // |skew| <= 1e-8
    bool reflected = false;        // fitted to the negated statistic
    double shape = 0.0;            // gamma shape k = 4 / skew^2
    double scale = 0.0;            // gamma scale
    double shift = 0.0;            // location so the mean is 0
    double fitted_excess_kurtosis = 0.0;  // 1.5 skew^2 for the gamma member
    bool wilkins_ok = true;               // skew^2 + 1 <= fitted kurtosis + 3
};

inline PearsonFit fit_pearson_curve(const H0Moments& mom) {
    if (!(mom.m2 > 0.0)) throw std::invalid_argument("fit_pearson_curve: m2 must be positive");
    PearsonFit fit;
    fit.variance = mom.m2;
    fit.skewness = mom.skew;
    const double g = std::abs(mom.skew);
    if (g <= 1e-8) {
        fit.normal_fallback = true;
        return fit;
    }
    fit.reflected = mom.skew < 0.0;
    fit.shape = 4.0 / (g * g);
    fit.scale = g * std::sqrt(mom.m2) / 2.0;
    fit.shift = -fit.shape * fit.scale;
    fit.fitted_excess_kurtosis = 1.5 * g * g;
    fit.wilkins_ok = fit.fitted_excess_kurtosis + 3.0 >= g * g + 1.0;
    return fit;
}

/// Upper quantile of the fitted curve: P(S > q) = alpha.
inline double pearson_quantile(const H0Moments& mom, double alpha) {
    detail::check_alpha(alpha);
    const PearsonFit fit = fit_pearson_curve(mom);
    if (fit.normal_fallback) return std::sqrt(fit.variance) * detail::normal_quantile(1.0 - alpha);
    if (!fit.reflected) return fit.shift + fit.scale * detail::gamma_quantile(fit.shape, 1.0 - alpha);
    return -(fit.shift + fit.scale * detail::gamma_quantile(fit.shape, alpha));
}

/// Upper-tail probability P(S >= x) of the fitted curve.
inline double pearson_pvalue(const H0Moments& mom, double x) {
    const PearsonFit fit = fit_pearson_curve(mom);
    if (fit.normal_fallback) return 1.0 - detail::normal_cdf(x / std::sqrt(fit.variance));
    if (!fit.reflected) return 1.0 - detail::gamma_cdf(fit.shape, (x - fit.shift) / fit.scale);
    return detail::gamma_cdf(fit.shape, (-x - fit.shift) / fit.scale);
}

/// A realized null-quantile provider.
struct NullModel {
    NullKind kind;
    double alpha = 0.05;
    double threshold = 0.0;
    std::vector<double> samples;          // bootstrap / spectral draws
    std::optional<PearsonFit> pearson;    // pearson_curve
    double sigma_l_hat = 0.0;             // gaussian_linear
};

inline NullModel biased_bound_null(double k_bound, Index m, double alpha) {
    return {NullKind::biased_bound, alpha, threshold_biased_bound(k_bound, m, alpha), {}, {}, 0.0};
}

inline NullModel hoeffding_bound_null(double k_bound, Index m, double alpha) {
    return {NullKind::hoeffding_bound, alpha, threshold_hoeffding(k_bound, m, alpha), {}, {}, 0.0};
}

inline NullModel pearson_null(const H0Moments& mom, double alpha) {
    NullModel model{NullKind::pearson_curve, alpha, pearson_quantile(mom, alpha), {}, {}, 0.0};
    model.pearson = fit_pearson_curve(mom);
    return model;
}

namespace detail {

// Gram blocks of the permutation-relabelled aggregate: the first m permuted
// indices become pseudo-X, the rest pseudo-Y.
inline void permuted_blocks(const Matrix& aggregate, const std::vector<Index>& perm, Index m,
                            GramBlocks& out) {
    const Index total = aggregate.rows();
    const Index n = total - m;
    out.m = m;
    out.n = n;
    out.kxx.resize(m, m);
    out.kyy.resize(n, n);
    out.kxy.resize(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j)
            out.kxx(i, j) = aggregate(perm[std::size_t(i)], perm[std::size_t(j)]);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            out.kyy(i, j) = aggregate(perm[std::size_t(m + i)], perm[std::size_t(m + j)]);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j)
            out.kxy(i, j) = aggregate(perm[std::size_t(i)], perm[std::size_t(m + j)]);
}

}  // namespace detail

/// Permutation bootstrap on the aggregated Gram indices: relabel, recompute
/// the statistic, repeat B times. No kernel re-evaluation happens. Iteration
/// i draws from rng.stream(i), so the sample list is a pure function of the
/// seed (and independent of any parallel schedule).
inline NullModel bootstrap_null(const GramBlocks& g, Index b, double alpha, const Rng& rng,
                                StatKind stat = StatKind::mmd_u_sq) {
    if (b < 1) throw std::invalid_argument("bootstrap_null: need B >= 1");
    detail::check_alpha(alpha);
    if (stat != StatKind::mmd_u_sq && stat != StatKind::mmd_b)
        throw std::invalid_argument("bootstrap_null: statistic must be mmd_u_sq or mmd_b");
    if (stat == StatKind::mmd_u_sq && g.m != g.n)
        throw std::invalid_argument("bootstrap_null: mmd_u_sq bootstrap requires m = n");
    const Matrix aggregate = aggregate_gram(g);
    NullModel model;
    model.kind = NullKind::bootstrap;
    model.alpha = alpha;
    model.samples.reserve(std::size_t(b));
    GramBlocks scratch;
    for (Index i = 0; i < b; ++i) {
        Rng it = rng.stream(std::uint64_t(i));
        const std::vector<Index> perm = it.permutation(aggregate.rows());
        detail::permuted_blocks(aggregate, perm, g.m, scratch);
        const double v = (stat == StatKind::mmd_u_sq) ? mmd_u_squared(scratch).value
                                                      : mmd_biased(scratch).value;
        model.samples.push_back(v);
    }
    model.threshold = empirical_upper_quantile(model.samples, alpha);
    return model;
}

namespace detail {

// m x m matrix of h(z_i, z_j) built from the empirically centred aggregate
// kernel; diagonal zeroed (the U-statistic excludes it).
inline Matrix centered_h_matrix(const GramBlocks& g) {
    if (g.m != g.n) throw std::invalid_argument("h0 moments require paired samples (m = n)");
    const Index m = g.m;
    const Matrix a = center_gram(aggregate_gram(g));
    Matrix h(m, m);
    for (Index i = 0; i < m; ++i) {
        h(i, i) = 0.0;
        for (Index j = i + 1; j < m; ++j) {
            const double v = a(i, j) + a(m + i, m + j) - a(i, m + j) - a(j, m + i);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

}  // namespace detail

/// Plug-in second moment of MMD_u^2 under H0:
/// (2/(m(m-1))) * mean_{i != j} h(z_i,z_j)^2, with h from the centred kernel.
inline double h0_moment2(const GramBlocks& g) {
    if (g.m != g.n) throw std::invalid_argument("h0_moment2: requires paired samples (m = n)");
    if (g.m < 2) throw std::invalid_argument("h0_moment2: need m >= 2");
    const Matrix h = detail::centered_h_matrix(g);
    const long double m = static_cast<long double>(g.m);
    long double sum_sq = 0.0L;
    for (Index i = 0; i < g.m; ++i)
        for (Index j = 0; j < g.m; ++j) sum_sq += static_cast<long double>(h(i, j)) * h(i, j);
    const long double mean_sq = sum_sq / (m * (m - 1.0L));
    return static_cast<double>(2.0L / (m * (m - 1.0L)) * mean_sq);
}

/// Plug-in third moment of MMD_u^2 under H0:
/// (8(m-2)/(m^2(m-1)^2)) * mean_{i != j} [ h(z_i,z_j) mean_{k != i,j} h(z_i,z_k) h(z_j,z_k) ].
inline double h0_moment3(const GramBlocks& g) {
    if (g.m != g.n) throw std::invalid_argument("h0_moment3: requires paired samples (m = n)");
    if (g.m < 3) throw std::invalid_argument("h0_moment3: need m >= 3");
    const Matrix h = detail::centered_h_matrix(g);
    const Index m = g.m;
    // With a zeroed diagonal, (h^2)(i,j) = sum_{k != i,j} h(i,k) h(j,k).
    const Matrix h2 = h * h;
    long double s = 0.0L;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j)
            if (i != j) s += static_cast<long double>(h(i, j)) * h2(i, j);
    const long double md = static_cast<long double>(m);
    const long double mean = s / (md * (md - 1.0L) * (md - 2.0L));
    const long double coef = 8.0L * (md - 2.0L) / (md * md * (md - 1.0L) * (md - 1.0L));
    return static_cast<double>(coef * mean);
}

/// Both plug-in moments (shares the centred h matrix).
inline H0Moments h0_moments(const GramBlocks& g) {
    H0Moments mom;
    mom.m2 = h0_moment2(g);
    mom.m3 = (g.m >= 3) ? h0_moment3(g) : 0.0;
    mom.skew = (mom.m2 > 0.0) ? mom.m3 / std::pow(mom.m2, 1.5) : 0.0;
    mom.kurt_lb = mom.skew * mom.skew + 1.0;
    return mom;
}

/// Null law of MMD_u^2 simulated from the spectrum of the centred aggregate
/// Gram: lambda_l = eig_l / N (N = rows), draws of sum_l lambda_l (z_l^2 - 2)
/// with z_l ~ N(0, 2), divided by m to sit on the MMD_u^2 scale.
inline NullModel spectral_null(const Matrix& k_centered, Index m, Index n_sim, double alpha,
                               const Rng& rng) {
    if (n_sim < 1) throw std::invalid_argument("spectral_null: need n_sim >= 1");
    if (m < 1) throw std::invalid_argument("spectral_null: need m >= 1");
    detail::check_alpha(alpha);
    if (k_centered.rows() != k_centered.cols())
        throw std::invalid_argument("spectral_null: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> es(k_centered, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectral_null: eigensolve failed");
    const Vector eigs = es.eigenvalues();
    const double lambda_max = eigs.maxCoeff();
    const double cutoff = 1e-12 * lambda_max;
    std::vector<double> lambdas;
    for (Index i = 0; i < eigs.size(); ++i)
        if (eigs[i] >= cutoff && eigs[i] > 0.0)
            lambdas.push_back(eigs[i] / double(k_centered.rows()));
    if (lambdas.empty())
        throw std::runtime_error("spectral_null: all eigenvalues below cutoff");
    NullModel model;
    model.kind = NullKind::spectral;
    model.alpha = alpha;
    model.samples.reserve(std::size_t(n_sim));
    for (Index i = 0; i < n_sim; ++i) {
        Rng it = rng.stream(std::uint64_t(i));
        long double acc = 0.0L;
        for (double lambda : lambdas) {
            const double z = std::sqrt(2.0) * it.normal();  // N(0, 2)
            acc += static_cast<long double>(lambda) * (z * z - 2.0);
        }
        model.samples.push_back(static_cast<double>(acc / static_cast<long double>(m)));
    }
    model.threshold = empirical_upper_quantile(model.samples, alpha);
    return model;
}

/// Gaussian threshold for the linear-time test: sigma_l_hat Phi^-1(1-alpha) / sqrt(m).
inline double linear_test_threshold(double sigma_l_hat, Index m, double alpha) {
    if (m < 2) throw std::invalid_argument("linear_test_threshold: need m >= 2");
    if (sigma_l_hat < 0.0) throw std::invalid_argument("linear_test_threshold: sigma must be nonnegative");
    detail::check_alpha(alpha);
    return sigma_l_hat * detail::normal_quantile(1.0 - alpha) / std::sqrt(double(m));
}

inline NullModel gaussian_linear_null(double sigma_l_hat, Index m, double alpha) {
    return {NullKind::gaussian_linear, alpha, linear_test_threshold(sigma_l_hat, m, alpha), {}, {},
            sigma_l_hat};
}

}  // namespace mmdkit
