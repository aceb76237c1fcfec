#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mmdkit/estimators.hpp"
#include "mmdkit/kernels.hpp"
#include "mmdkit/rng.hpp"
#include "mmdkit/two_sample.hpp"
#include "mmdkit/types.hpp"

namespace mmdkit {

/// Statistic used for cost-matrix cells.
enum class MatchStat { mmd_u_sq, mmd_b_sq, mmd_b };

inline const char* to_string(MatchStat s) {
    switch (s) {
        case MatchStat::mmd_u_sq: return "mmd_u_sq";
        case MatchStat::mmd_b_sq: return "mmd_b_sq";
        case MatchStat::mmd_b: return "mmd_b";
    }
    return "?";
}

/// C_ij = chosen MMD statistic between attribute i of A and attribute j of B,
/// floored at 0. The kernel choice is resolved per cell (median heuristic on
/// that cell's pooled pair when sigma is unset).
inline Matrix cost_matrix(const std::vector<Sample>& a, const std::vector<Sample>& b,
                          const TestConfig& cfg, MatchStat stat = MatchStat::mmd_u_sq) {
    if (a.size() != b.size()) throw std::invalid_argument("cost_matrix: attribute counts differ");
    if (a.empty()) throw std::invalid_argument("cost_matrix: need at least one attribute");
    const auto n = static_cast<Index>(a.size());
    Matrix c(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const Sample& ai = a[std::size_t(i)];
            const Sample& bj = b[std::size_t(j)];
            const KernelSpec spec = resolve_kernel(cfg.kernel, ai, bj);
            const GramBlocks g = gram_blocks(spec, ai, bj);
            double v = 0.0;
            switch (stat) {
                case MatchStat::mmd_u_sq: v = mmd_u_squared(g).value; break;
                case MatchStat::mmd_b_sq: {
                    const double r = mmd_biased(g).value;
                    v = r * r;
                    break;
                }
                case MatchStat::mmd_b: v = mmd_biased(g).value; break;
            }
            c(i, j) = std::max(v, 0.0);
        }
    }
    return c;
}

struct Assignment {
    std::vector<Index> perm;  // row i of the cost matrix is assigned column perm[i]
    double total_cost = 0.0;
};

/// Exact linear assignment by the O(n^3) augmenting-path (potentials) form of
/// the Hungarian method. Ties break toward the lowest column index, so the
/// output is reproducible.
inline Assignment hungarian(const Matrix& cost) {
    if (cost.rows() != cost.cols()) throw std::invalid_argument("hungarian: cost matrix must be square");
    if (!cost.allFinite()) throw std::invalid_argument("hungarian: cost matrix has non-finite entries");
    const Index n = cost.rows();
    const double inf = std::numeric_limits<double>::infinity();

    // 1-based arrays; p[j] is the row matched to column j, column 0 is virtual.
    std::vector<double> u(std::size_t(n) + 1, 0.0), v(std::size_t(n) + 1, 0.0);
    std::vector<Index> p(std::size_t(n) + 1, 0), way(std::size_t(n) + 1, 0);
    for (Index i = 1; i <= n; ++i) {
        p[0] = i;
        Index j0 = 0;
        std::vector<double> minv(std::size_t(n) + 1, inf);
        std::vector<char> used(std::size_t(n) + 1, 0);
        do {
            used[std::size_t(j0)] = 1;
            const Index i0 = p[std::size_t(j0)];
            Index j1 = 0;
            double delta = inf;
            for (Index j = 1; j <= n; ++j) {
                if (used[std::size_t(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[std::size_t(i0)] - v[std::size_t(j)];
                if (cur < minv[std::size_t(j)]) {
                    minv[std::size_t(j)] = cur;
                    way[std::size_t(j)] = j0;
                }
                if (minv[std::size_t(j)] < delta) {
                    delta = minv[std::size_t(j)];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= n; ++j) {
                if (used[std::size_t(j)]) {
                    u[std::size_t(p[std::size_t(j)])] += delta;
                    v[std::size_t(j)] -= delta;
                } else {
                    minv[std::size_t(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[std::size_t(j0)] != 0);
        do {
            const Index j1 = way[std::size_t(j0)];
            p[std::size_t(j0)] = p[std::size_t(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment out;
    out.perm.assign(std::size_t(n), -1);
    for (Index j = 1; j <= n; ++j)
        if (p[std::size_t(j)] != 0) out.perm[std::size_t(p[std::size_t(j)] - 1)] = j - 1;
    long double total = 0.0L;
    for (Index i = 0; i < n; ++i) total += cost(i, out.perm[std::size_t(i)]);
    out.total_cost = static_cast<double>(total);
    return out;
}

/// Optimal-coordinate-matching distance: min over permutations of the summed
/// per-attribute (unsquared, floored) MMD_b values.
inline double delta_semimetric(const std::vector<Sample>& a, const std::vector<Sample>& b,
                               const TestConfig& cfg) {
    return hungarian(cost_matrix(a, b, cfg, MatchStat::mmd_b)).total_cost;
}

/// Split a dataset into two halves for the naive-matching protocol:
/// even rows vs odd rows, after a seeded shuffle when a seed is given.
inline std::pair<Sample, Sample> split_half(const Sample& d, std::optional<std::uint64_t> seed = {}) {
    const Index m = d.size();
    if (m < 2) throw std::invalid_argument("split_half: need at least two rows");
    std::vector<Index> order(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) order[std::size_t(i)] = i;
    if (seed) {
        Rng rng(*seed);
        order = rng.permutation(m);
    }
    const Index na = (m + 1) / 2;
    Matrix a(na, d.dim()), b(m - na, d.dim());
    for (Index i = 0; i < m; ++i) {
        if (i % 2 == 0)
            a.row(i / 2) = d.row(order[std::size_t(i)]);
        else
            b.row(i / 2) = d.row(order[std::size_t(i)]);
    }
    return {Sample(std::move(a)), Sample(std::move(b))};
}

}  // namespace mmdkit
