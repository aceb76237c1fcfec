#pragma once

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

namespace mmdkit::detail {

inline double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double normal_cdf(double x) {
    return boost::math::cdf(boost::math::normal_distribution<double>(), x);
}

/// CDF of Gamma(shape, scale = 1).
inline double gamma_cdf(double shape, double x) {
    if (x <= 0.0) return 0.0;
    return boost::math::cdf(boost::math::gamma_distribution<double>(shape), x);
}

/// Quantile of Gamma(shape, scale = 1).
inline double gamma_quantile(double shape, double p) {
    return boost::math::quantile(boost::math::gamma_distribution<double>(shape), p);
}

}  // namespace mmdkit::detail
