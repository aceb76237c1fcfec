#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmdkit/estimators.hpp"
#include "mmdkit/kernels.hpp"
#include "mmdkit/null_models.hpp"
#include "mmdkit/rng.hpp"
#include "mmdkit/types.hpp"

namespace mmdkit {

enum class Method { biased_bound, hoeffding, bootstrap, pearson, spectral, linear, hsic_perm };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::biased_bound: return "biased-bound";
        case Method::hoeffding: return "hoeffding";
        case Method::bootstrap: return "bootstrap";
        case Method::pearson: return "pearson";
        case Method::spectral: return "spectral";
        case Method::linear: return "linear";
        case Method::hsic_perm: return "hsic-perm";
    }
    return "?";
}

/// Kernel selection rule. A missing sigma means the median heuristic on the
/// pooled sample (resolved once, before any permutation).
struct KernelChoice {
    KernelFamily family = KernelFamily::gaussian;
    std::optional<double> sigma;  // nullopt -> median heuristic
    std::shared_ptr<const Matrix> gram;
    Index split = 0;
    std::optional<double> bound_k;  // for precomputed kernels

    static KernelChoice median_gaussian() { return {}; }
    static KernelChoice gaussian(double sigma) { return {KernelFamily::gaussian, sigma, nullptr, 0, {}}; }
    static KernelChoice median_laplace() { return {KernelFamily::laplace, std::nullopt, nullptr, 0, {}}; }
    static KernelChoice laplace(double sigma) { return {KernelFamily::laplace, sigma, nullptr, 0, {}}; }
    static KernelChoice linear() { return {KernelFamily::linear, std::nullopt, nullptr, 0, {}}; }
    static KernelChoice precomputed(Matrix aggregate, Index split,
                                    std::optional<double> bound_k = std::nullopt) {
        KernelChoice c;
        c.family = KernelFamily::precomputed;
        c.gram = std::make_shared<const Matrix>(std::move(aggregate));
        c.split = split;
        c.bound_k = bound_k;
        return c;
    }
};

/// Resolve a KernelChoice against concrete samples.
inline KernelSpec resolve_kernel(const KernelChoice& choice, const Sample& x, const Sample& y) {
    switch (choice.family) {
        case KernelFamily::gaussian:
            return KernelSpec::gaussian(choice.sigma ? *choice.sigma : median_heuristic(x, y));
        case KernelFamily::laplace:
            return KernelSpec::laplace(choice.sigma ? *choice.sigma : median_heuristic(x, y));
        case KernelFamily::linear:
            return KernelSpec::linear();
        case KernelFamily::precomputed:
            return KernelSpec::precomputed(choice.gram, choice.split, choice.bound_k);
    }
    throw std::logic_error("resolve_kernel: unknown kernel family");
}

struct TestConfig {
    Method method = Method::bootstrap;
    KernelChoice kernel = KernelChoice::median_gaussian();
    double alpha = 0.05;
    Index bootstrap_iters = 150;  // permutation resamplings B
    Index n_sim = 1000;
    std::uint64_t seed = 0;
    StatKind bootstrap_stat = StatKind::mmd_u_sq;
};

struct TestResult {
    StatValue statistic;
    double threshold = 0.0;
    std::optional<double> p_value;
    bool reject = false;
    Method method = Method::bootstrap;
    KernelSpec kernel;
    Index m = 0;
    Index n = 0;
    std::uint64_t seed = 0;
    double runtime_ms = 0.0;
};

namespace detail {

inline void validate_config(const TestConfig& cfg) {
    check_alpha(cfg.alpha);
    if (cfg.bootstrap_iters < 1) throw std::invalid_argument("bootstrap_iters must be >= 1");
    if (cfg.n_sim < 1) throw std::invalid_argument("n_sim must be >= 1");
}

// Core dispatch once the kernel is resolved. `points` is null for the
// precomputed-Gram path (the linear method needs raw points).
inline TestResult run_resolved(const KernelSpec& spec, const Sample* x, const Sample* y,
                               const GramBlocks* pre_blocks, const TestConfig& cfg) {
    TestResult res;
    res.method = cfg.method;
    res.kernel = spec;
    res.seed = cfg.seed;
    const Rng rng(cfg.seed);

    const auto t0 = std::chrono::steady_clock::now();
    auto blocks = [&]() -> GramBlocks {
        if (pre_blocks) return *pre_blocks;
        return gram_blocks(spec, *x, *y);
    };

    switch (cfg.method) {
        case Method::biased_bound: {
            check_bound(spec.bound_k);
            const GramBlocks g = blocks();
            res.statistic = mmd_biased(g);
            res.threshold = biased_bound_null(*spec.bound_k, std::min(g.m, g.n), cfg.alpha).threshold;
            break;
        }
        case Method::hoeffding: {
            check_bound(spec.bound_k);
            const GramBlocks g = blocks();
            res.statistic = mmd_u_squared(g);
            res.threshold = hoeffding_bound_null(*spec.bound_k, g.m, cfg.alpha).threshold;
            break;
        }
        case Method::bootstrap: {
            const GramBlocks g = blocks();
            res.statistic = (cfg.bootstrap_stat == StatKind::mmd_b) ? mmd_biased(g) : mmd_u_squared(g);
            const NullModel nm = bootstrap_null(g, cfg.bootstrap_iters, cfg.alpha, rng, cfg.bootstrap_stat);
            res.threshold = nm.threshold;
            res.p_value = permutation_p_value(nm.samples, res.statistic.value);
            break;
        }
        case Method::pearson: {
            const GramBlocks g = blocks();
            res.statistic = mmd_u_squared(g);
            const H0Moments mom = h0_moments(g);
            res.threshold = pearson_null(mom, cfg.alpha).threshold;
            res.p_value = pearson_pvalue(mom, res.statistic.value);
            break;
        }
        case Method::spectral: {
            const GramBlocks g = blocks();
            res.statistic = mmd_u_squared(g);
            const NullModel nm =
                spectral_null(center_gram(aggregate_gram(g)), g.m, cfg.n_sim, cfg.alpha, rng);
            res.threshold = nm.threshold;
            res.p_value = permutation_p_value(nm.samples, res.statistic.value);
            break;
        }
        case Method::hsic_perm:
            throw std::invalid_argument("hsic-perm is an independence test; use hsic_permutation_test");
        case Method::linear: {
            if (!x || !y) throw std::invalid_argument("linear method requires raw samples, not a precomputed Gram");
            const PairedSample pairs(*x, *y);
            const LinearStat ls = linear_stat(pairs, spec);
            res.statistic = {ls.value, StatKind::mmd_l_sq, pairs.size(), pairs.size()};
            const double sigma_hat = std::sqrt(ls.sigma_l_sq);
            res.threshold = gaussian_linear_null(sigma_hat, pairs.size(), cfg.alpha).threshold;
            if (sigma_hat > 0.0) {
                const double zscore = std::sqrt(double(pairs.size())) * ls.value / sigma_hat;
                res.p_value = 1.0 - normal_cdf(zscore);
            } else {
                res.p_value = (ls.value > 0.0) ? 0.0 : 1.0;
            }
            break;
        }
    }
    res.reject = res.statistic.value > res.threshold;
    const auto t1 = std::chrono::steady_clock::now();
    res.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    res.m = res.statistic.m;
    res.n = res.statistic.n;
    return res;
}

}  // namespace detail

/// Run one two-sample test. Deterministic given the seed; runtime_ms covers
/// statistic and null-model construction (kernel resolution excluded).
inline TestResult run_two_sample_test(const Sample& x, const Sample& y, const TestConfig& cfg) {
    detail::validate_config(cfg);
    if (x.dim() != y.dim() && cfg.kernel.family != KernelFamily::precomputed)
        throw std::invalid_argument("run_two_sample_test: samples have different dimensions");
    const KernelSpec spec = resolve_kernel(cfg.kernel, x, y);
    return detail::run_resolved(spec, &x, &y, nullptr, cfg);
}

/// Precomputed-Gram entry point (the linear method is unavailable here).
inline TestResult run_two_sample_test(const KernelSpec& spec, const TestConfig& cfg) {
    detail::validate_config(cfg);
    if (spec.family != KernelFamily::precomputed || !spec.gram)
        throw std::invalid_argument("run_two_sample_test: expected a precomputed kernel spec");
    const GramBlocks g = split_gram(*spec.gram, spec.split);
    return detail::run_resolved(spec, nullptr, nullptr, &g, cfg);
}

/// Unnormalized empirical witness (1/m) sum_i k(x_i, t) - (1/n) sum_i k(y_i, t)
/// at each query point t.
inline std::vector<double> witness(const Sample& x, const Sample& y, const KernelSpec& spec,
                                   const Sample& query) {
    if (x.dim() != y.dim() || x.dim() != query.dim())
        throw std::invalid_argument("witness: dimension mismatch");
    std::vector<double> out;
    out.reserve(std::size_t(query.size()));
    for (Index t = 0; t < query.size(); ++t) {
        long double sx = 0.0L, sy = 0.0L;
        for (Index i = 0; i < x.size(); ++i) sx += eval_kernel(spec, x.row(i), query.row(t));
        for (Index i = 0; i < y.size(); ++i) sy += eval_kernel(spec, y.row(i), query.row(t));
        out.push_back(static_cast<double>(sx / x.size() - sy / y.size()));
    }
    return out;
}

}  // namespace mmdkit
