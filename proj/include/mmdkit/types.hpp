#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace mmdkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// One distribution's draw. Rows are observations, columns are coordinates.
struct Sample {
    Matrix points;

    Sample() = default;
    explicit Sample(Matrix pts) : points(std::move(pts)) {
        if (points.rows() < 1)
            throw std::invalid_argument("Sample: need at least one observation");
    }

    Index size() const { return points.rows(); }
    Index dim() const { return points.cols(); }
    auto row(Index i) const { return points.row(i); }
};

/// Observations z_i = (x_i, y_i); both sides must have the same count.
struct PairedSample {
    Matrix x;
    Matrix y;

    PairedSample(const Sample& xs, const Sample& ys) : x(xs.points), y(ys.points) { validate(); }
    PairedSample(Matrix xs, Matrix ys) : x(std::move(xs)), y(std::move(ys)) { validate(); }

    Index size() const { return x.rows(); }
    Index dim() const { return x.cols(); }

private:
    void validate() const {
        if (x.rows() != y.rows())
            throw std::invalid_argument("PairedSample: sample sizes differ (pairing requires m = n)");
        if (x.cols() != y.cols())
            throw std::invalid_argument("PairedSample: dimension mismatch");
        if (x.rows() < 1)
            throw std::invalid_argument("PairedSample: need at least one pair");
    }
};

enum class StatKind { mmd_b, mmd_u_sq, mmd_l_sq, hsic };

inline const char* to_string(StatKind k) {
    switch (k) {
        case StatKind::mmd_b: return "mmd_b";
        case StatKind::mmd_u_sq: return "mmd_u_sq";
        case StatKind::mmd_l_sq: return "mmd_l_sq";
        case StatKind::hsic: return "hsic";
    }
    return "?";
}

/// A computed statistic. mmd_b is nonnegative by construction; the squared
/// U-statistics may be negative.
struct StatValue {
    double value = 0.0;
    StatKind kind = StatKind::mmd_b;
    Index m = 0;
    Index n = 0;
};

}  // namespace mmdkit
