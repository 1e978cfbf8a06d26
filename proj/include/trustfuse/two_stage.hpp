#pragma once
// Two Stage Approach: classify robots by a likelihood-ratio test on their trust
// values, then fuse the trusted measurements. Thresholds are tuned against the
// worst-case attack, which is evaluated exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "trustfuse/model.hpp"
#include "trustfuse/probability.hpp"
#include "trustfuse/random.hpp"

namespace trustfuse {

struct TwoStageThresholds {
    double gamma_t = 0.0;
    double p_t = 1.0;
    double worst_case_error = 1.0;
};

struct WorstCaseConfig {
    double m_bar = 0.0;
    std::size_t n = 1;
    double delta_p = 0.01;

    void validate() const {
        if (n == 0) throw DomainError("network size must be positive");
        if (!detail::in_closed_unit(m_bar)) throw DomainError("m_bar must lie in [0, 1]");
        if (!(delta_p > 0.0 && delta_p <= 1.0)) throw DomainError("delta_p must lie in (0, 1]");
    }
    std::size_t malicious_count() const { return malicious_count_for(m_bar, n); }
    std::size_t legit_count() const { return n - malicious_count(); }
};

struct BoundRegion {
    double beta_l = 0.0;
    double beta_m = 1.0;
};

namespace detail {

// -1, 0, +1 for ratio below, at, above gamma, with a 1e-12 relative tie band.
inline int compare_ratio(double ratio, double gamma) noexcept {
    if (ratio == gamma) return 0;
    const double scale = std::max(std::abs(ratio), std::abs(gamma));
    if (std::abs(ratio - gamma) <= 1e-12 * scale) return 0;
    return ratio > gamma ? 1 : -1;
}

// ceil(x), except that values within 1e-9 of an integer snap to it. The
// binomial tail indices below are rationals in exact arithmetic; this keeps
// rounding noise from moving them across an integer.
inline std::int64_t ceil_snap(double x) noexcept {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::ceil(x));
}

inline double cdf_lookup(const std::vector<double>& cdf, std::int64_t g) noexcept {
    if (g < 0) return 0.0;
    if (g >= static_cast<std::int64_t>(cdf.size()) - 1) return 1.0;
    return cdf[static_cast<std::size_t>(g)];
}

}  // namespace detail

inline double trust_likelihood_ratio(std::size_t symbol, const TrustModel& trust) {
    if (symbol >= trust.size()) throw DomainError("trust symbol index out of range");
    return trust.legit(symbol) / trust.malicious(symbol);
}

inline double trust_likelihood_ratio(const std::string& symbol, const TrustModel& trust) {
    return trust_likelihood_ratio(trust.index_of(symbol), trust);
}

// Distinct likelihood ratios of the alphabet, ascending. Any classification
// threshold is matched in worst-case error by one of these.
inline std::vector<double> threshold_candidates(const TrustModel& trust) {
    std::vector<double> ratios;
    for (std::size_t s = 0; s < trust.size(); ++s) ratios.push_back(trust_likelihood_ratio(s, trust));
    std::sort(ratios.begin(), ratios.end());
    ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());
    return ratios;
}

// {0, delta, 2 delta, ..., 1}. When 1/delta is an integer K the points are i/K,
// so grids for delta and delta/j coincide on shared points bit for bit.
inline std::vector<double> tie_break_grid(double delta_p) {
    if (!(delta_p > 0.0 && delta_p <= 1.0)) throw DomainError("delta_p must lie in (0, 1]");
    std::vector<double> grid;
    const double k = std::round(1.0 / delta_p);
    if (std::abs(k * delta_p - 1.0) <= 1e-12) {
        const auto steps = static_cast<std::size_t>(k);
        for (std::size_t i = 0; i <= steps; ++i) grid.push_back(static_cast<double>(i) / k);
    } else {
        for (std::size_t i = 0; static_cast<double>(i) * delta_p < 1.0; ++i)
            grid.push_back(static_cast<double>(i) * delta_p);
        grid.push_back(1.0);
    }
    return grid;
}

// Stage one. One uniform is drawn per robot whether or not it sits on the
// threshold, so the stream position never depends on the trust values.
template <class Rng>
BitVector classify_trust(const SymbolVector& symbols, const TwoStageThresholds& thr, const TrustModel& trust,
                         Rng& rng) {
    BitVector t_hat(symbols.size(), 0);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const double u = uniform01(rng);
        const int cmp = detail::compare_ratio(trust_likelihood_ratio(symbols[i], trust), thr.gamma_t);
        if (cmp > 0)
            t_hat[i] = 1;
        else if (cmp == 0)
            t_hat[i] = u < thr.p_t ? 1 : 0;
    }
    return t_hat;
}

// (P_trust,L, P_trust,M): probability that a legitimate / malicious robot is trusted.
inline std::pair<double, double> trust_probabilities(const TwoStageThresholds& thr, const TrustModel& trust) {
    double p_l = 0.0;
    double p_m = 0.0;
    for (std::size_t s = 0; s < trust.size(); ++s) {
        const int cmp = detail::compare_ratio(trust_likelihood_ratio(s, trust), thr.gamma_t);
        const double weight = cmp > 0 ? 1.0 : (cmp == 0 ? thr.p_t : 0.0);
        p_l += weight * trust.legit(s);
        p_m += weight * trust.malicious(s);
    }
    return {std::min(p_l, 1.0), std::min(p_m, 1.0)};
}

// Stage two. S_N >= gamma_TS selects H1; the comparison allows 1e-9 (w0 + w1)
// of slack so that sums equal to the threshold in exact arithmetic count as equal.
inline Decision fuse_trusted(const BitVector& y, const BitVector& t_hat, const SensorModel& sensor) {
    if (y.size() != t_hat.size()) throw DomainError("y and t_hat must have equal length");
    const double w1 = sensor.w1();
    const double w0 = sensor.w0();
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (t_hat[i]) s += y[i] ? w1 : -w0;
    Decision d;
    d.hypothesis = s >= sensor.gamma_ts() - 1e-9 * (w0 + w1) ? Hypothesis::H1 : Hypothesis::H0;
    d.est_trust = t_hat;
    return d;
}

// Exact fused error when each legitimate robot is trusted with probability p_l,
// each malicious one with p_m, and trusted malicious robots report 1 with
// probability p_fa_m under H0 and 0 with probability p_md_m under H1.
inline double attacked_error(double p_l, double p_m, std::size_t n_legit, std::size_t n_mal,
                             const SensorModel& sensor, double p_fa_m, double p_md_m) {
    const auto nl = static_cast<std::int64_t>(n_legit);
    const auto nm = static_cast<std::int64_t>(n_mal);
    const double w1 = sensor.w1();
    const double w0 = sensor.w0();
    const double gamma = sensor.gamma_ts();
    const double fa = sensor.p_fa_l();
    const double md = sensor.p_md_l();

    std::vector<std::vector<double>> cdf_fa(n_legit + 1);
    std::vector<std::vector<double>> cdf_det(n_legit + 1);
    for (std::int64_t k = 0; k <= nl; ++k) {
        cdf_fa[static_cast<std::size_t>(k)] = binomial_cdf_table(k, fa);
        cdf_det[static_cast<std::size_t>(k)] = binomial_cdf_table(k, 1.0 - md);
    }

    double p_false_alarm = 0.0;
    double p_missed = 0.0;
    for (std::int64_t kl = 0; kl <= nl; ++kl) {
        const double wl = binomial_pmf(kl, nl, p_l);
        if (wl == 0.0) continue;
        const auto& fa_cdf = cdf_fa[static_cast<std::size_t>(kl)];
        const auto& det_cdf = cdf_det[static_cast<std::size_t>(kl)];
        for (std::int64_t km = 0; km <= nm; ++km) {
            const double wm = binomial_pmf(km, nm, p_m);
            if (wm == 0.0) continue;
            // H1 is chosen iff the number of trusted ones reaches c.
            const double c = (gamma + static_cast<double>(kl + km) * w0) / (w0 + w1);
            double fa_k = 0.0;
            double md_k = 0.0;
            for (std::int64_t j = 0; j <= km; ++j) {
                const double ones_h0 = binomial_pmf(j, km, p_fa_m);
                if (ones_h0 > 0.0) fa_k += ones_h0 * (1.0 - detail::cdf_lookup(fa_cdf, detail::ceil_snap(c - static_cast<double>(j)) - 1));
                const double ones_h1 = binomial_pmf(j, km, 1.0 - p_md_m);
                if (ones_h1 > 0.0) md_k += ones_h1 * detail::cdf_lookup(det_cdf, detail::ceil_snap(c - static_cast<double>(j)) - 1);
            }
            p_false_alarm += wl * wm * fa_k;
            p_missed += wl * wm * md_k;
        }
    }
    const double e = sensor.prior_h0() * p_false_alarm + sensor.prior_h1() * p_missed;
    return std::clamp(e, 0.0, 1.0);
}

// Error under the worst-case attack: every malicious robot always reports the
// wrong bit and the malicious count is round(m_bar N).
inline double worst_case_error(double gamma_t, double p_t, const WorstCaseConfig& cfg, const SensorModel& sensor,
                               const TrustModel& trust) {
    cfg.validate();
    const auto [p_l, p_m] = trust_probabilities({gamma_t, p_t, 0.0}, trust);
    return attacked_error(p_l, p_m, cfg.legit_count(), cfg.malicious_count(), sensor, 1.0, 1.0);
}

// Exhaustive scan of threshold candidates x tie-break grid, both ascending;
// a later point replaces the incumbent only if it is better by more than 1e-12.
inline TwoStageThresholds optimize_thresholds(const WorstCaseConfig& cfg, const SensorModel& sensor,
                                              const TrustModel& trust) {
    cfg.validate();
    TwoStageThresholds best{0.0, 0.0, INFINITY};
    const auto grid = tie_break_grid(cfg.delta_p);
    for (double gamma : threshold_candidates(trust)) {
        for (double p : grid) {
            const double e = worst_case_error(gamma, p, cfg, sensor, trust);
            if (e < best.worst_case_error - 1e-12) best = {gamma, p, e};
        }
    }
    return best;
}

template <class Rng>
Decision two_stage_decide(const NetworkObservation& obs, const TwoStageThresholds& thr, const SensorModel& sensor,
                          const TrustModel& trust, Rng& rng) {
    return fuse_trusted(obs.y, classify_trust(obs.a, thr, trust, rng), sensor);
}

// beta_l halfway between 0 and P_trust,L; beta_m halfway between P_trust,M and 1.
inline BoundRegion default_bound_region(const TwoStageThresholds& thr, const TrustModel& trust) {
    const auto [p_l, p_m] = trust_probabilities(thr, trust);
    return {p_l / 2.0, (p_m + 1.0) / 2.0};
}

// Chernoff-style upper bound on the worst-case error, split into the events
// "few legitimate robots trusted", "many malicious robots trusted" and the
// remaining case where the fused test itself errs.
inline double error_upper_bound(const TwoStageThresholds& thr, const WorstCaseConfig& cfg, const BoundRegion& region,
                                const SensorModel& sensor, const TrustModel& trust) {
    cfg.validate();
    const auto [p_l, p_m] = trust_probabilities(thr, trust);
    const std::size_t n_mal = cfg.malicious_count();
    const std::size_t n_legit = cfg.legit_count();
    if (n_mal == 0 || n_legit == 0)
        throw ValidityError("bound needs at least one legitimate and one malicious robot");
    if (!(region.beta_l > 0.0 && region.beta_l < p_l))
        throw ValidityError("beta_l must lie in (0, P_trust,L)");
    if (!(region.beta_m > p_m && region.beta_m < 1.0))
        throw ValidityError("beta_m must lie in (P_trust,M, 1)");

    const double size_l = static_cast<double>(n_legit);
    const double size_m = static_cast<double>(n_mal);
    const double few_legit = p_l >= 1.0 ? 0.0 : std::exp(-size_l * kl_bernoulli(region.beta_l, p_l));
    const double many_mal = p_m <= 0.0 ? 0.0 : std::exp(-size_m * kl_bernoulli(region.beta_m, p_m));

    const double k_l = region.beta_l * size_l + 1.0;
    const double k_m = region.beta_m * size_m - 1.0;
    const double w1 = sensor.w1();
    const double w0 = sensor.w0();
    const double gamma = sensor.gamma_ts();
    const double fa = sensor.p_fa_l();
    const double md = sensor.p_md_l();
    const double g_fa = (gamma - k_m * w1 + k_l * w0) / (k_l * (w0 + w1));
    const double g_md = (gamma + k_m * w0 + k_l * w0) / (k_l * (w0 + w1));
    if (!(g_fa > fa && g_fa < 1.0)) throw ValidityError("normalized false-alarm threshold outside (P_FA,L, 1)");
    if (!(g_md > 0.0 && g_md < 1.0 - md)) throw ValidityError("normalized missed-detection threshold outside (0, 1 - P_MD,L)");

    const double fused = sensor.prior_h0() * std::exp(-k_l * kl_bernoulli(g_fa, fa)) +
                         sensor.prior_h1() * std::exp(-k_l * kl_bernoulli(g_md, 1.0 - md));
    return few_legit + many_mal + fused;
}

// Grid {0, delta_m, ..., 1} of malicious proportions.
inline std::vector<double> proportion_grid(double delta_m) {
    if (!(delta_m > 0.0 && delta_m <= 1.0)) throw DomainError("delta_m must lie in (0, 1]");
    const double k = std::round(1.0 / delta_m);
    if (std::abs(k * delta_m - 1.0) > 1e-9) throw DomainError("delta_m must divide 1");
    std::vector<double> grid;
    for (std::size_t i = 0; i <= static_cast<std::size_t>(k); ++i) grid.push_back(static_cast<double>(i) / k);
    return grid;
}

// Smallest proportion on the grid whose optimized worst-case error reaches the
// smaller prior, i.e. where the best the detector can do is ignore everyone.
inline double m_star_exact(std::size_t n, const SensorModel& sensor, const TrustModel& trust, double delta_m,
                           double delta_p = 0.01) {
    for (double m : proportion_grid(delta_m)) {
        const auto thr = optimize_thresholds({m, n, delta_p}, sensor, trust);
        if (thr.worst_case_error >= sensor.min_prior() - 1e-12) return m;
    }
    return 1.0;
}

namespace detail {

inline double noiseless_error(double p_l, double p_m, std::size_t n_legit, std::size_t n_mal, double prior_h0) {
    // Z = K_M - K_L; H0 errs when Z >= 0, H1 errs when Z > 0.
    const auto nl = static_cast<std::int64_t>(n_legit);
    const auto nm = static_cast<std::int64_t>(n_mal);
    double ge = 0.0;
    double gt = 0.0;
    for (std::int64_t kl = 0; kl <= nl; ++kl) {
        const double wl = binomial_pmf(kl, nl, p_l);
        for (std::int64_t km = kl; km <= nm; ++km) {
            const double w = wl * binomial_pmf(km, nm, p_m);
            ge += w;
            if (km > kl) gt += w;
        }
    }
    return prior_h0 * ge + (1.0 - prior_h0) * gt;
}

}  // namespace detail

// m* under an error-free legitimate sensor, by exact binomial sums.
inline double m_star_exact_noiseless(double p_trust_l, double p_trust_m, std::size_t n, double prior_h0,
                                     double delta_m) {
    const double floor_error = std::min(prior_h0, 1.0 - prior_h0);
    for (double m : proportion_grid(delta_m)) {
        const std::size_t n_mal = malicious_count_for(m, n);
        if (detail::noiseless_error(p_trust_l, p_trust_m, n - n_mal, n_mal, prior_h0) >= floor_error - 1e-12)
            return m;
    }
    return 1.0;
}

// Same quantity from the continuity-corrected normal approximation of Z.
inline double m_star_normal_approx(double p_trust_l, double p_trust_m, std::size_t n, double prior_h0,
                                   double prior_h1, double delta_m) {
    const double nn = static_cast<double>(n);
    const double floor_error = std::min(prior_h0, prior_h1);
    for (double m : proportion_grid(delta_m)) {
        const double mu = m * nn * (p_trust_l + p_trust_m) - nn * p_trust_l;
        const double var = m * nn * p_trust_m * (1.0 - p_trust_m) + (1.0 - m) * nn * p_trust_l * (1.0 - p_trust_l);
        double e = 0.0;
        if (var > 0.0) {
            const double sigma = std::sqrt(var);
            e = prior_h0 * gaussian_q((-0.5 - mu) / sigma) + prior_h1 * gaussian_q(-mu / sigma);
        } else {
            // Z is the constant mu.
            e = prior_h0 * (mu > -0.5 ? 1.0 : 0.0) + prior_h1 * (mu > 0.0 ? 1.0 : 0.0);
        }
        if (e >= floor_error - 1e-12) return m;
    }
    return 1.0;
}

}  // namespace trustfuse
