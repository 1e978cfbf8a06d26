#pragma once
// Exact probability primitives: binomial pmf/cdf (log-domain coefficients),
// Bernoulli KL divergence, Chernoff tail bounds and the Gaussian Q function.

#include <cmath>
#include <cstdint>
#include <vector>

#include "trustfuse/model.hpp"

namespace trustfuse {

namespace detail {

// log(n!) from a table built once; lgamma beyond the table.
inline double log_factorial(std::int64_t n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(20001);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::lgamma(static_cast<double>(i) + 1.0);
        return t;
    }();
    if (n < static_cast<std::int64_t>(table.size())) return table[static_cast<std::size_t>(n)];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double log_binomial_coefficient(std::int64_t n, std::int64_t g) {
    return log_factorial(n) - log_factorial(g) - log_factorial(n - g);
}

// 0 * log(0 / q) = 0.
inline double xlog_ratio(double x, double q) { return x == 0.0 ? 0.0 : x * std::log(x / q); }

}  // namespace detail

// C(n,g) p^g (1-p)^(n-g).
inline double binomial_pmf(std::int64_t g, std::int64_t n, double p) {
    if (n < 0 || g < 0 || g > n) throw DomainError("binomial_pmf requires 0 <= g <= n");
    if (!detail::in_closed_unit(p)) throw DomainError("binomial_pmf requires p in [0, 1]");
    if (p == 0.0) return g == 0 ? 1.0 : 0.0;
    if (p == 1.0) return g == n ? 1.0 : 0.0;
    const double log_pmf = detail::log_binomial_coefficient(n, g) + static_cast<double>(g) * std::log(p) +
                           static_cast<double>(n - g) * std::log1p(-p);
    return std::exp(log_pmf);
}

// Pr(X <= g) for X ~ Bin(n, p), summed term by term; 0 for g < 0 and 1 for g >= n.
inline double binomial_cdf(std::int64_t g, std::int64_t n, double p) {
    if (n < 0) throw DomainError("binomial_cdf requires n >= 0");
    if (!detail::in_closed_unit(p)) throw DomainError("binomial_cdf requires p in [0, 1]");
    if (g < 0) return 0.0;
    if (g >= n) return 1.0;
    double sum = 0.0;
    for (std::int64_t i = 0; i <= g; ++i) sum += binomial_pmf(i, n, p);
    return sum;
}

// The whole cdf of Bin(n, p) as cdf[g], g = 0..n. Same summation as binomial_cdf,
// except cdf[n] is pinned to 1.
inline std::vector<double> binomial_cdf_table(std::int64_t n, double p) {
    std::vector<double> cdf(static_cast<std::size_t>(n) + 1);
    double sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        sum += binomial_pmf(i, n, p);
        cdf[static_cast<std::size_t>(i)] = sum;
    }
    cdf[static_cast<std::size_t>(n)] = 1.0;
    return cdf;
}

// D(p || q) between Bernoulli(p) and Bernoulli(q), natural log.
inline double kl_bernoulli(double p, double q) {
    if (!detail::in_open_unit(q)) throw DomainError("kl_bernoulli requires q in (0, 1)");
    if (!detail::in_closed_unit(p)) throw DomainError("kl_bernoulli requires p in [0, 1]");
    if (p == q) return 0.0;
    const double d = detail::xlog_ratio(p, q) + detail::xlog_ratio(1.0 - p, 1.0 - q);
    return d > 0.0 ? d : 0.0;
}

// Chernoff bound exp(-n D(g/n || p)) on Pr(X <= g), valid for g/n in (0, p).
inline double chernoff_lower_tail(double g, std::int64_t n, double p) {
    if (n <= 0) throw ValidityError("chernoff_lower_tail requires n > 0");
    const double ratio = g / static_cast<double>(n);
    if (!(ratio > 0.0 && ratio < p) || !(p < 1.0))
        throw ValidityError("chernoff_lower_tail requires g/n in (0, p)");
    return std::exp(-static_cast<double>(n) * kl_bernoulli(ratio, p));
}

// Chernoff bound exp(-n D(g/n || p)) on Pr(X >= g), valid for g/n in (p, 1).
inline double chernoff_upper_tail(double g, std::int64_t n, double p) {
    if (n <= 0) throw ValidityError("chernoff_upper_tail requires n > 0");
    const double ratio = g / static_cast<double>(n);
    if (!(ratio > p && ratio < 1.0) || !(p > 0.0))
        throw ValidityError("chernoff_upper_tail requires g/n in (p, 1)");
    return std::exp(-static_cast<double>(n) * kl_bernoulli(ratio, p));
}

// Standard normal upper tail Q(x) = Pr(Z > x).
inline double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace trustfuse
