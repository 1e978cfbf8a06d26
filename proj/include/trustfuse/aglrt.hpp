#pragma once
// Adversarial GLRT. Each hypothesis branch is maximized jointly over the trust
// vector and the attacker's flip-driven error rate. For a fixed rate the trust
// vector separates per robot, and every maximizing rate is a fraction with
// denominator at most N, so the scan is exact.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "trustfuse/model.hpp"

namespace trustfuse {

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

struct CandidateSet {
    std::vector<Fraction> fractions;  // reduced, ascending
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
};

struct RobotPrior {
    double p_legit = 0.5;

    void validate() const {
        if (!detail::in_open_unit(p_legit)) throw DomainError("p_legit must lie in (0, 1)");
    }
};

inline CandidateSet candidate_set(std::size_t n) {
    if (n == 0) throw DomainError("candidate_set requires n >= 1");
    CandidateSet set;
    set.fractions.push_back({0, 1});
    for (std::int64_t den = 1; den <= static_cast<std::int64_t>(n); ++den)
        for (std::int64_t num = 1; num <= den; ++num)
            if (std::gcd(num, den) == 1) set.fractions.push_back({num, den});
    std::sort(set.fractions.begin(), set.fractions.end(),
              [](const Fraction& a, const Fraction& b) { return a.num * b.den < b.num * a.den; });
    for (const auto& f : set.fractions) set.values.push_back(f.value());
    return set;
}

namespace detail {

inline double log_or_neg_inf(double x) noexcept { return x > 0.0 ? std::log(x) : -INFINITY; }

// Per-robot log scores (log c_L, log c_M) within one branch.
struct RobotScores {
    std::vector<double> log_legit;
    std::vector<double> log_malicious;
};

inline RobotScores robot_scores(const BitVector& y, const SymbolVector& a, double attacker_p, Hypothesis branch,
                                const SensorModel& sensor, const TrustModel& trust,
                                const std::optional<RobotPrior>& prior) {
    if (y.size() != a.size()) throw DomainError("y and a must have equal length");
    const bool h1 = branch == Hypothesis::H1;
    // Log-probabilities of reporting 1 and 0 in this branch. Each is taken
    // straight from its own error rate so that mirrored branches agree bit for bit.
    const double log_fa = std::log(sensor.p_fa_l());
    const double log_not_fa = std::log1p(-sensor.p_fa_l());
    const double log_md = std::log(sensor.p_md_l());
    const double log_not_md = std::log1p(-sensor.p_md_l());
    const double log_p = log_or_neg_inf(attacker_p);
    const double log_not_p = attacker_p < 1.0 ? std::log1p(-attacker_p) : -INFINITY;
    const double log_legit_one = h1 ? log_not_md : log_fa;
    const double log_legit_zero = h1 ? log_md : log_not_fa;
    const double log_mal_one = h1 ? log_not_p : log_p;
    const double log_mal_zero = h1 ? log_p : log_not_p;
    const double log_prior_l = prior ? std::log(prior->p_legit) : 0.0;
    const double log_prior_m = prior ? std::log1p(-prior->p_legit) : 0.0;

    RobotScores s;
    s.log_legit.resize(y.size());
    s.log_malicious.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        s.log_legit[i] = std::log(trust.legit(a[i])) + (y[i] ? log_legit_one : log_legit_zero) + log_prior_l;
        s.log_malicious[i] = std::log(trust.malicious(a[i])) + (y[i] ? log_mal_one : log_mal_zero) + log_prior_m;
    }
    return s;
}

inline BranchMaximum unconstrained_max(const RobotScores& s, double attacker_p) {
    BranchMaximum m;
    m.attacker_param = attacker_p;
    m.t_hat.resize(s.log_legit.size());
    double total = 0.0;
    for (std::size_t i = 0; i < s.log_legit.size(); ++i) {
        const bool legit = s.log_legit[i] >= s.log_malicious[i];
        m.t_hat[i] = legit ? 1 : 0;
        total += legit ? s.log_legit[i] : s.log_malicious[i];
    }
    m.log_likelihood = total;
    return m;
}

// At most `budget` robots may be labelled malicious; take the largest positive
// gains log c_M - log c_L first.
inline BranchMaximum budgeted_max(const RobotScores& s, double attacker_p, std::size_t budget) {
    const std::size_t n = s.log_legit.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> gain(n);
    for (std::size_t i = 0; i < n; ++i) gain[i] = s.log_malicious[i] - s.log_legit[i];
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return gain[i] > gain[j]; });

    BranchMaximum m;
    m.attacker_param = attacker_p;
    m.t_hat.assign(n, 1);
    std::size_t used = 0;
    for (std::size_t i : order) {
        if (used >= budget || !(gain[i] > 0.0)) break;
        m.t_hat[i] = 0;
        ++used;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += m.t_hat[i] ? s.log_legit[i] : s.log_malicious[i];
    m.log_likelihood = total;
    return m;
}

struct GlrtVariant {
    std::optional<RobotPrior> prior;
    std::optional<std::size_t> budget;
};

inline BranchMaximum branch_max(const BitVector& y, const SymbolVector& a, double attacker_p, Hypothesis branch,
                                const SensorModel& sensor, const TrustModel& trust, const GlrtVariant& v) {
    const auto s = robot_scores(y, a, attacker_p, branch, sensor, trust, v.prior);
    return v.budget ? budgeted_max(s, attacker_p, *v.budget) : unconstrained_max(s, attacker_p);
}

// H1 only when the log ratio clears log gamma by more than 1e-9; exact ties
// and rounding-level near ties go to H0.
inline Decision glrt_decision(BranchMaximum num, BranchMaximum den, const SensorModel& sensor) {
    Decision d;
    const bool h1 = num.log_likelihood - den.log_likelihood > sensor.gamma_ts() + 1e-9;
    d.hypothesis = h1 ? Hypothesis::H1 : Hypothesis::H0;
    const BranchMaximum& chosen = h1 ? num : den;
    d.est_trust = chosen.t_hat;
    d.est_attack_param = chosen.attacker_param;
    d.log_likelihoods = std::make_pair(num.log_likelihood, den.log_likelihood);
    d.branches = std::make_pair(std::move(num), std::move(den));
    return d;
}

inline Decision aglrt_impl(const BitVector& y, const SymbolVector& a, const SensorModel& sensor,
                           const TrustModel& trust, const GlrtVariant& v) {
    if (y.empty() || y.size() != a.size()) throw DomainError("y and a must be nonempty and of equal length");
    const auto set = candidate_set(y.size());
    BranchMaximum best[2];
    const Hypothesis branches[2] = {Hypothesis::H1, Hypothesis::H0};
    for (int b = 0; b < 2; ++b) {
        for (double p : set.values) {
            auto m = branch_max(y, a, p, branches[b], sensor, trust, v);
            // Ascending scan with strict improvement: the smaller rate wins ties.
            if (m.log_likelihood > best[b].log_likelihood) best[b] = std::move(m);
        }
    }
    return glrt_decision(std::move(best[0]), std::move(best[1]), sensor);
}

}  // namespace detail

// Best trust vector for a fixed attacker rate in one branch. Ties c_L = c_M
// are labelled legitimate.
inline BranchMaximum inner_max(const BitVector& y, const SymbolVector& a, double attacker_p, Hypothesis branch,
                               const SensorModel& sensor, const TrustModel& trust) {
    return detail::branch_max(y, a, attacker_p, branch, sensor, trust, {});
}

inline BranchMaximum constrained_inner_max(const BitVector& y, const SymbolVector& a, double attacker_p,
                                           Hypothesis branch, const SensorModel& sensor, const TrustModel& trust,
                                           double m_bar) {
    return detail::branch_max(y, a, attacker_p, branch, sensor, trust, {std::nullopt, malicious_count_for(m_bar, y.size())});
}

// Maximum-likelihood attacker rate for a given trust vector: the empirical
// miss rate (H1) or false-alarm rate (H0) of the robots labelled malicious.
// With none labelled malicious every rate is optimal; 0.5 is returned.
inline double mle_attacker_param(const BitVector& y, const BitVector& t, Hypothesis branch) {
    if (y.size() != t.size()) throw DomainError("y and t must have equal length");
    std::size_t count = 0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (t[i]) continue;
        ++count;
        if (branch == Hypothesis::H1 ? y[i] == 0 : y[i] == 1) ++hits;
    }
    return count == 0 ? 0.5 : static_cast<double>(hits) / static_cast<double>(count);
}

inline Decision aglrt_decide(const BitVector& y, const SymbolVector& a, const SensorModel& sensor,
                             const TrustModel& trust) {
    return detail::aglrt_impl(y, a, sensor, trust, {});
}

// Known prior on legitimacy folded into the per-robot scores. The decision
// threshold is the same as in aglrt_decide.
inline Decision aglrt_decide_with_prior(const BitVector& y, const SymbolVector& a, const SensorModel& sensor,
                                        const TrustModel& trust, const RobotPrior& prior) {
    prior.validate();
    return detail::aglrt_impl(y, a, sensor, trust, {prior, std::nullopt});
}

// At most round(m_bar N) robots may be labelled malicious.
inline Decision aglrt_decide_constrained(const BitVector& y, const SymbolVector& a, const SensorModel& sensor,
                                         const TrustModel& trust, double m_bar) {
    return detail::aglrt_impl(y, a, sensor, trust, {std::nullopt, malicious_count_for(m_bar, y.size())});
}

namespace detail {

inline constexpr std::size_t brute_force_limit = 20;

// Exhaustive maximization over t in {0,1}^N with the MLE attacker rate for each t.
inline Decision brute_force_impl(const BitVector& y, const SymbolVector& a, const SensorModel& sensor,
                                 const TrustModel& trust, const GlrtVariant& v) {
    const std::size_t n = y.size();
    if (n == 0 || a.size() != n) throw DomainError("y and a must be nonempty and of equal length");
    if (n > brute_force_limit) throw RefusalError("brute force GLRT refuses N > 20");
    BranchMaximum best[2];
    const Hypothesis branches[2] = {Hypothesis::H1, Hypothesis::H0};
    BitVector t(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::size_t n_mal = 0;
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = (mask >> i) & 1U ? 0 : 1;
            n_mal += t[i] ? 0 : 1;
        }
        if (v.budget && n_mal > *v.budget) continue;
        for (int b = 0; b < 2; ++b) {
            const double p = mle_attacker_param(y, t, branches[b]);
            const auto s = robot_scores(y, a, p, branches[b], sensor, trust, v.prior);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) total += t[i] ? s.log_legit[i] : s.log_malicious[i];
            if (total > best[b].log_likelihood) best[b] = {total, t, p};
        }
    }
    return glrt_decision(std::move(best[0]), std::move(best[1]), sensor);
}

}  // namespace detail

inline Decision brute_force_glrt(const BitVector& y, const SymbolVector& a, const SensorModel& sensor,
                                 const TrustModel& trust) {
    return detail::brute_force_impl(y, a, sensor, trust, {});
}

inline Decision brute_force_glrt_with_prior(const BitVector& y, const SymbolVector& a, const SensorModel& sensor,
                                            const TrustModel& trust, const RobotPrior& prior) {
    prior.validate();
    return detail::brute_force_impl(y, a, sensor, trust, {prior, std::nullopt});
}

inline Decision brute_force_glrt_constrained(const BitVector& y, const SymbolVector& a, const SensorModel& sensor,
                                             const TrustModel& trust, double m_bar) {
    return detail::brute_force_impl(y, a, sensor, trust, {std::nullopt, malicious_count_for(m_bar, y.size())});
}

}  // namespace trustfuse
