#pragma once
// Domain types shared by every detector: sensing, trust and attack models,
// one network observation, and the decision record a detector returns.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trustfuse {

// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised when an analytic bound is requested outside the region where it holds.
class ValidityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when an exhaustive routine is asked for a size it will not enumerate.
class RefusalError : public std::length_error {
public:
    using std::length_error::length_error;
};

enum class Hypothesis : std::uint8_t { H0 = 0, H1 = 1 };

inline constexpr Hypothesis opposite(Hypothesis h) noexcept {
    return h == Hypothesis::H0 ? Hypothesis::H1 : Hypothesis::H0;
}

inline const char* to_string(Hypothesis h) noexcept { return h == Hypothesis::H1 ? "H1" : "H0"; }

// Binary sequences use one byte per entry (0 or 1).
using BitVector = std::vector<std::uint8_t>;
// Trust symbols are indices into TrustModel::alphabet().
using SymbolVector = std::vector<std::size_t>;

namespace detail {

inline bool in_open_unit(double p) noexcept { return p > 0.0 && p < 1.0; }
inline bool in_closed_unit(double p) noexcept { return p >= 0.0 && p <= 1.0; }

}  // namespace detail

// Legitimate sensing model plus event priors.
class SensorModel {
public:
    SensorModel(double p_fa_l, double p_md_l, double prior_h0, double prior_h1)
        : p_fa_l_(p_fa_l), p_md_l_(p_md_l), prior_h0_(prior_h0), prior_h1_(prior_h1) {
        if (!(p_fa_l > 0.0 && p_fa_l < 0.5)) throw DomainError("p_fa_l must lie in (0, 0.5)");
        if (!(p_md_l > 0.0 && p_md_l < 0.5)) throw DomainError("p_md_l must lie in (0, 0.5)");
        if (!detail::in_open_unit(prior_h0) || !detail::in_open_unit(prior_h1))
            throw DomainError("event priors must lie in (0, 1)");
        // Decimal inputs such as 0.6432 + 0.3568 need not sum to exactly 1.0 in binary.
        if (std::abs(prior_h0 + prior_h1 - 1.0) > 1e-12)
            throw DomainError("prior_h0 + prior_h1 must equal 1");
    }

    // Convenience: prior_h1 = 1 - prior_h0.
    static SensorModel with_prior(double p_fa_l, double p_md_l, double prior_h0) {
        return SensorModel(p_fa_l, p_md_l, prior_h0, 1.0 - prior_h0);
    }

    double p_fa_l() const noexcept { return p_fa_l_; }
    double p_md_l() const noexcept { return p_md_l_; }
    double prior_h0() const noexcept { return prior_h0_; }
    double prior_h1() const noexcept { return prior_h1_; }
    double min_prior() const noexcept { return std::min(prior_h0_, prior_h1_); }

    // Log-likelihood weight of a trusted "1" report.
    double w1() const noexcept { return std::log((1.0 - p_md_l_) / p_fa_l_); }
    // Log-likelihood weight of a trusted "0" report.
    double w0() const noexcept { return std::log((1.0 - p_fa_l_) / p_md_l_); }
    // Fusion threshold log(Pr(H0) / Pr(H1)).
    double gamma_ts() const noexcept { return std::log(prior_h0_ / prior_h1_); }

private:
    double p_fa_l_;
    double p_md_l_;
    double prior_h0_;
    double prior_h1_;
};

// Finite trust alphabet with legitimacy-conditional pmfs.
class TrustModel {
public:
    TrustModel(std::vector<std::string> alphabet, std::vector<double> pmf_legit,
               std::vector<double> pmf_malicious)
        : alphabet_(std::move(alphabet)),
          pmf_legit_(std::move(pmf_legit)),
          pmf_malicious_(std::move(pmf_malicious)) {
        const auto n = alphabet_.size();
        if (n == 0) throw DomainError("trust alphabet is empty");
        if (pmf_legit_.size() != n || pmf_malicious_.size() != n)
            throw DomainError("trust pmfs must have one entry per alphabet symbol");
        for (std::size_t i = 0; i < n; ++i) {
            if (!detail::in_open_unit(pmf_legit_[i]) || !detail::in_open_unit(pmf_malicious_[i]))
                throw DomainError("trust pmf entries must lie in (0, 1)");
            if (pmf_legit_[i] == pmf_malicious_[i])
                throw DomainError("trust pmfs must differ at symbol '" + alphabet_[i] + "'");
        }
        const auto sum_l = std::accumulate(pmf_legit_.begin(), pmf_legit_.end(), 0.0);
        const auto sum_m = std::accumulate(pmf_malicious_.begin(), pmf_malicious_.end(), 0.0);
        if (std::abs(sum_l - 1.0) > 1e-12 || std::abs(sum_m - 1.0) > 1e-12)
            throw DomainError("trust pmfs must each sum to 1");
    }

    // Binary alphabet {"0","1"} with Pr(a=1|legit) and Pr(a=1|malicious).
    static TrustModel binary(double p1_legit, double p1_malicious) {
        return TrustModel({"0", "1"}, {1.0 - p1_legit, p1_legit},
                          {1.0 - p1_malicious, p1_malicious});
    }

    std::size_t size() const noexcept { return alphabet_.size(); }
    const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
    const std::vector<double>& pmf_legit() const noexcept { return pmf_legit_; }
    const std::vector<double>& pmf_malicious() const noexcept { return pmf_malicious_; }

    double legit(std::size_t symbol) const { return pmf_legit_.at(symbol); }
    double malicious(std::size_t symbol) const { return pmf_malicious_.at(symbol); }

    std::size_t index_of(const std::string& symbol) const {
        for (std::size_t i = 0; i < alphabet_.size(); ++i)
            if (alphabet_[i] == symbol) return i;
        throw DomainError("unknown trust symbol '" + symbol + "'");
    }

private:
    std::vector<std::string> alphabet_;
    std::vector<double> pmf_legit_;
    std::vector<double> pmf_malicious_;
};

// Malicious reporting strategy: sense with (pre_fa, pre_md), then flip with p_f.
class AttackModel {
public:
    AttackModel(double p_f, double pre_fa, double pre_md) : p_f_(p_f), pre_fa_(pre_fa), pre_md_(pre_md) {
        if (!detail::in_closed_unit(p_f)) throw DomainError("p_f must lie in [0, 1]");
        if (!(pre_fa >= 0.0 && pre_fa < 0.5)) throw DomainError("pre_fa must lie in [0, 0.5)");
        if (!(pre_md >= 0.0 && pre_md < 0.5)) throw DomainError("pre_md must lie in [0, 0.5)");
    }

    double p_f() const noexcept { return p_f_; }
    double pre_fa() const noexcept { return pre_fa_; }
    double pre_md() const noexcept { return pre_md_; }

    double effective_fa() const noexcept { return (1.0 - p_f_) * pre_fa_ + p_f_ * (1.0 - pre_fa_); }
    double effective_md() const noexcept { return (1.0 - p_f_) * pre_md_ + p_f_ * (1.0 - pre_md_); }

private:
    double p_f_;
    double pre_fa_;
    double pre_md_;
};

// One trial. truth_t and truth_event are simulator ground truth; detectors other
// than the oracle baseline must only read y and a.
struct NetworkObservation {
    BitVector y;
    SymbolVector a;
    BitVector truth_t;  // 1 = legitimate
    Hypothesis truth_event = Hypothesis::H0;

    std::size_t size() const noexcept { return y.size(); }

    void validate() const {
        if (y.empty()) throw DomainError("observation must contain at least one robot");
        if (a.size() != y.size() || truth_t.size() != y.size())
            throw DomainError("observation sequences must have equal length");
    }
};

// Maximizer of one GLRT branch: the trust estimate, the attacker parameter
// (missed-detection rate for H1, false-alarm rate for H0) and the log-likelihood.
struct BranchMaximum {
    double log_likelihood = -INFINITY;
    BitVector t_hat;
    double attacker_param = 0.5;
};

struct Decision {
    Hypothesis hypothesis = Hypothesis::H0;
    std::optional<BitVector> est_trust;
    std::optional<double> est_attack_param;
    // (log-likelihood under H1, log-likelihood under H0)
    std::optional<std::pair<double, double>> log_likelihoods;
    // GLRT detectors also report both branch maxima: (H1 numerator, H0 denominator).
    std::optional<std::pair<BranchMaximum, BranchMaximum>> branches;
};

// Malicious count for a proportion bound: round(m_bar * n).
inline std::size_t malicious_count_for(double m_bar, std::size_t n) {
    if (!detail::in_closed_unit(m_bar)) throw DomainError("malicious proportion must lie in [0, 1]");
    return static_cast<std::size_t>(std::llround(m_bar * static_cast<double>(n)));
}

// True when m_bar * n is not an integer (the count above was rounded).
inline bool malicious_count_rounded(double m_bar, std::size_t n) {
    const double x = m_bar * static_cast<double>(n);
    return std::abs(x - std::round(x)) > 1e-9;
}

}  // namespace trustfuse
