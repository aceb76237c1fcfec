#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mmdkit/types.hpp"

namespace mmdkit {

enum class KernelFamily { gaussian, laplace, linear, precomputed };

inline const char* to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::gaussian: return "gaussian";
        case KernelFamily::laplace: return "laplace";
        case KernelFamily::linear: return "linear";
        case KernelFamily::precomputed: return "precomputed";
    }
    return "?";
}

/// Kernel family plus parameters. Gaussian and Laplace are bounded by 1; the
/// linear kernel is unbounded; a precomputed kernel is an aggregate Gram
/// matrix over X followed by Y, with `split` giving the number of X rows.
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    double sigma = 1.0;
    std::optional<double> bound_k;
    std::shared_ptr<const Matrix> gram;
    Index split = 0;

    static KernelSpec gaussian(double sigma) {
        check_sigma(sigma);
        KernelSpec s;
        s.family = KernelFamily::gaussian;
        s.sigma = sigma;
        s.bound_k = 1.0;
        return s;
    }

    static KernelSpec laplace(double sigma) {
        check_sigma(sigma);
        KernelSpec s;
        s.family = KernelFamily::laplace;
        s.sigma = sigma;
        s.bound_k = 1.0;
        return s;
    }

    static KernelSpec linear() {
        KernelSpec s;
        s.family = KernelFamily::linear;
        s.sigma = 0.0;
        s.bound_k = std::nullopt;
        return s;
    }

    static KernelSpec precomputed(Matrix aggregate, Index split,
                                  std::optional<double> bound_k = std::nullopt) {
        return precomputed(std::make_shared<const Matrix>(std::move(aggregate)), split, bound_k);
    }

    static KernelSpec precomputed(std::shared_ptr<const Matrix> aggregate, Index split,
                                  std::optional<double> bound_k = std::nullopt) {
        if (!aggregate) throw std::invalid_argument("precomputed kernel: no matrix supplied");
        if (aggregate->rows() != aggregate->cols())
            throw std::invalid_argument("precomputed kernel: matrix must be square");
        if (split < 1 || split >= aggregate->rows())
            throw std::invalid_argument("precomputed kernel: split must lie strictly inside the matrix");
        if (bound_k) {
            if (*bound_k < 0.0)
                throw std::invalid_argument("precomputed kernel: bound_K must be nonnegative");
            const double lo = aggregate->minCoeff();
            const double hi = aggregate->maxCoeff();
            const double tol = 1e-12 * std::max(1.0, *bound_k);
            if (lo < -tol || hi > *bound_k + tol)
                throw std::invalid_argument("precomputed kernel: declared bound_K does not dominate all entries");
        }
        KernelSpec s;
        s.family = KernelFamily::precomputed;
        s.bound_k = bound_k;
        s.gram = std::move(aggregate);
        s.split = split;
        return s;
    }

private:
    static void check_sigma(double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("kernel bandwidth sigma must be positive");
    }
};

/// Pointwise kernel evaluation. Not defined for precomputed kernels.
template <class DerivedA, class DerivedB>
double eval_kernel(const KernelSpec& spec, const Eigen::MatrixBase<DerivedA>& x,
                   const Eigen::MatrixBase<DerivedB>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("eval_kernel: dimension mismatch");
    switch (spec.family) {
        case KernelFamily::gaussian: {
            const double d2 = (x - y).squaredNorm();
            return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
        }
        case KernelFamily::laplace: {
            const double d1 = (x - y).cwiseAbs().sum();
            return std::exp(-d1 / spec.sigma);
        }
        case KernelFamily::linear:
            return x.dot(y);
        case KernelFamily::precomputed:
            throw std::invalid_argument("eval_kernel: precomputed kernels have no pointwise evaluation");
    }
    throw std::logic_error("eval_kernel: unknown kernel family");
}

/// The three kernel matrices for a sample pair. Diagonal blocks are symmetric
/// by construction (upper triangle filled, then mirrored).
struct GramBlocks {
    Matrix kxx;  // m x m
    Matrix kyy;  // n x n
    Matrix kxy;  // m x n
    Index m = 0;
    Index n = 0;
};

/// Slice a precomputed aggregate Gram (X rows first, then Y rows) into blocks.
inline GramBlocks split_gram(const Matrix& aggregate, Index split) {
    if (aggregate.rows() != aggregate.cols())
        throw std::invalid_argument("split_gram: matrix must be square");
    const Index total = aggregate.rows();
    if (split < 1 || split >= total)
        throw std::invalid_argument("split_gram: split index out of range");
    GramBlocks g;
    g.m = split;
    g.n = total - split;
    g.kxx = aggregate.topLeftCorner(g.m, g.m);
    g.kyy = aggregate.bottomRightCorner(g.n, g.n);
    g.kxy = aggregate.topRightCorner(g.m, g.n);
    for (const Matrix* blk : {&g.kxx, &g.kyy}) {
        const double scale = std::max(1.0, blk->cwiseAbs().maxCoeff());
        if ((*blk - blk->transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw std::invalid_argument("split_gram: diagonal block is not symmetric");
    }
    return g;
}

inline GramBlocks gram_blocks(const KernelSpec& spec, const Sample& x, const Sample& y) {
    if (spec.family == KernelFamily::precomputed) {
        if (!spec.gram) throw std::invalid_argument("gram_blocks: precomputed spec has no matrix");
        if (x.size() != spec.split || y.size() != spec.gram->rows() - spec.split)
            throw std::invalid_argument("gram_blocks: precomputed matrix size inconsistent with m + n");
        return split_gram(*spec.gram, spec.split);
    }
    if (x.dim() != y.dim())
        throw std::invalid_argument("gram_blocks: samples have different dimensions");
    GramBlocks g;
    g.m = x.size();
    g.n = y.size();
    g.kxx.resize(g.m, g.m);
    for (Index i = 0; i < g.m; ++i) {
        for (Index j = i; j < g.m; ++j) {
            const double v = eval_kernel(spec, x.row(i), x.row(j));
            g.kxx(i, j) = v;
            g.kxx(j, i) = v;
        }
    }
    g.kyy.resize(g.n, g.n);
    for (Index i = 0; i < g.n; ++i) {
        for (Index j = i; j < g.n; ++j) {
            const double v = eval_kernel(spec, y.row(i), y.row(j));
            g.kyy(i, j) = v;
            g.kyy(j, i) = v;
        }
    }
    g.kxy.resize(g.m, g.n);
    for (Index i = 0; i < g.m; ++i)
        for (Index j = 0; j < g.n; ++j) g.kxy(i, j) = eval_kernel(spec, x.row(i), y.row(j));
    return g;
}

/// Assemble the (m+n) x (m+n) aggregate Gram [[kxx, kxy], [kxy', kyy]].
inline Matrix aggregate_gram(const GramBlocks& g) {
    Matrix a(g.m + g.n, g.m + g.n);
    a.topLeftCorner(g.m, g.m) = g.kxx;
    a.topRightCorner(g.m, g.n) = g.kxy;
    a.bottomLeftCorner(g.n, g.m) = g.kxy.transpose();
    a.bottomRightCorner(g.n, g.n) = g.kyy;
    return a;
}

/// Median of the strictly positive pairwise Euclidean distances of Z (lower
/// median for even counts). Duplicated points contribute zero distances,
/// which are excluded so they cannot drive the bandwidth to 0.
inline double median_heuristic(const Sample& z) {
    const Index m = z.size();
    if (m < 2) throw std::invalid_argument("median_heuristic: need at least two points");
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2);
    for (Index i = 0; i < m; ++i)
        for (Index j = i + 1; j < m; ++j) {
            const double d = (z.row(i) - z.row(j)).norm();
            if (d > 0.0) dists.push_back(d);
        }
    if (dists.empty()) throw std::invalid_argument("median_heuristic: degenerate sample (all pairwise distances zero)");
    const auto mid = dists.begin() + static_cast<std::ptrdiff_t>((dists.size() - 1) / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    return *mid;
}

/// Median heuristic on the pooled sample X union Y.
inline double median_heuristic(const Sample& x, const Sample& y) {
    if (x.dim() != y.dim())
        throw std::invalid_argument("median_heuristic: samples have different dimensions");
    Matrix pooled(x.size() + y.size(), x.dim());
    pooled.topRows(x.size()) = x.points;
    pooled.bottomRows(y.size()) = y.points;
    return median_heuristic(Sample(std::move(pooled)));
}

/// Doubly centered Gram: K_ij - rowmean_i - colmean_j + grandmean, i.e. HKH
/// with H = I - 11'/m. Every row and column of the result sums to zero.
inline Matrix center_gram(const Matrix& k) {
    if (k.rows() != k.cols()) throw std::invalid_argument("center_gram: matrix must be square");
    const Vector row_mean = k.rowwise().mean();
    const Vector col_mean = k.colwise().mean();
    const double grand = k.mean();
    Matrix out = k;
    out.colwise() -= row_mean;
    out.rowwise() -= col_mean.transpose();
    out.array() += grand;
    return out;
}

}  // namespace mmdkit
