#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "cotmetrics/error.hpp"

namespace cotmetrics::metrics {

namespace detail {

/// Average (fractional) ranks; tied values share the mean of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& xs) {
    size_t n = xs.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        double avg = 0.5 * static_cast<double>(i + j) + 1.0; // ranks are 1-based
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    size_t n = xs.size();
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mx;
        double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw error(errc::degenerate_input, "constant series");
    return sxy / std::sqrt(sxx * syy);
}

// Shared counting rule for the permutation test: a permutation is at least as
// extreme when |rho| clears the observed |rho| minus a small float guard.
inline constexpr double kPermutationSlack = 1e-9;

inline double exact_permutation_p(const std::vector<double>& xr, const std::vector<double>& yr,
                                  double rho_obs) {
    std::vector<size_t> idx(yr.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    size_t total = 0, extreme = 0;
    double threshold = std::abs(rho_obs) - kPermutationSlack;
    std::vector<double> perm(yr.size());
    do {
        for (size_t i = 0; i < idx.size(); ++i) perm[i] = yr[idx[i]];
        ++total;
        if (std::abs(pearson(xr, perm)) >= threshold) ++extreme;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return static_cast<double>(extreme) / static_cast<double>(total);
}

inline double t_approximation_p(double rho, size_t n) {
    double denom = 1.0 - rho * rho;
    if (denom <= 0.0) return 0.0;
    double t = rho * std::sqrt(static_cast<double>(n - 2) / denom);
    boost::math::students_t_distribution<double> dist(static_cast<double>(n - 2));
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

} // namespace detail

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0;
    size_t n = 0;
    bool exact_p = false; // full permutation enumeration vs t-approximation
};

inline constexpr size_t kSpearmanExactLimit = 8;

/// Spearman rank correlation with average-tied ranks. The two-sided p-value
/// is computed by full permutation enumeration for n <= 8 and by the Student
/// t-approximation above that. Constant input raises degenerate_input: rho is
/// undefined there, not zero.
inline SpearmanResult spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw error(errc::length_mismatch, "series lengths " + std::to_string(xs.size()) + " vs " +
                                               std::to_string(ys.size()));
    if (xs.size() < 2) throw error(errc::length_mismatch, "need at least two observations");

    auto xr = detail::average_ranks(xs);
    auto yr = detail::average_ranks(ys);
    SpearmanResult result;
    result.n = xs.size();
    result.rho = detail::pearson(xr, yr);
    if (result.n <= kSpearmanExactLimit) {
        result.p_value = detail::exact_permutation_p(xr, yr, result.rho);
        result.exact_p = true;
    } else {
        result.p_value = detail::t_approximation_p(result.rho, result.n);
        result.exact_p = false;
    }
    return result;
}

} // namespace cotmetrics::metrics
