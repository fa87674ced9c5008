#pragma once

#include <algorithm>
#include <cmath>

#include "cotmetrics/error.hpp"

namespace cotmetrics::metrics {

namespace detail {

// x * log2(x / y) with the 0*log(0) = 0 convention.
inline double xlog2_ratio(double x, double y) {
    if (x == 0.0) return 0.0;
    return x * std::log2(x / y);
}

// KL(Bernoulli(p) || Bernoulli(m)) in bits. m is a strict mixture of p and
// another parameter, so m == 0 implies p == 0 and m == 1 implies p == 1;
// the ratio never divides by zero with a nonzero numerator.
inline double bernoulli_kl_bits(double p, double m) {
    return xlog2_ratio(p, m) + xlog2_ratio(1.0 - p, 1.0 - m);
}

} // namespace detail

/// Jensen-Shannon divergence between Bernoulli(p) and Bernoulli(q), base-2
/// logarithms, evaluated exactly at the endpoints. Symmetric, in [0, 1].
inline double bernoulli_js(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
        throw error(errc::domain_error, "bernoulli_js arguments must lie in [0, 1]");
    if (p == q) return 0.0;
    double m = 0.5 * (p + q);
    double js = 0.5 * detail::bernoulli_kl_bits(p, m) + 0.5 * detail::bernoulli_kl_bits(q, m);
    return std::clamp(js, 0.0, 1.0);
}

} // namespace cotmetrics::metrics
