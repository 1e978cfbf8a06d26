#pragma once
// Seeded Monte Carlo trials and a paired experiment engine: every method sees
// exactly the same observations, and the report does not depend on the number
// of worker threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "trustfuse/aglrt.hpp"
#include "trustfuse/baselines.hpp"
#include "trustfuse/model.hpp"
#include "trustfuse/random.hpp"
#include "trustfuse/two_stage.hpp"

namespace trustfuse {

struct ScenarioConfig {
    std::size_t n = 1;
    std::size_t malicious_count = 0;
    SensorModel sensor;
    TrustModel trust;
    AttackModel attack;
    std::uint64_t seed = 0;

    double malicious_proportion() const noexcept {
        return static_cast<double>(malicious_count) / static_cast<double>(n);
    }
    void validate() const {
        if (n == 0) throw DomainError("network size must be positive");
        if (malicious_count > n) throw DomainError("malicious_count exceeds network size");
    }
};

namespace stream_tag {
inline constexpr std::uint64_t event = 1;
inline constexpr std::uint64_t placement = 2;
inline constexpr std::uint64_t robot = 1000;    // + robot index
inline constexpr std::uint64_t method = 5000;   // + method kind
}  // namespace stream_tag

namespace detail {

inline std::size_t inverse_cdf(const std::vector<double>& pmf, double u) {
    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < pmf.size(); ++s) {
        acc += pmf[s];
        if (u < acc) return s;
    }
    return pmf.size() - 1;
}

}  // namespace detail

// Legitimacy per robot. The placement is a function of the seed alone, so a
// robot keeps its identity from trial to trial and for a fixed seed the
// malicious sets are nested as malicious_count grows.
inline BitVector malicious_placement(const ScenarioConfig& cfg) {
    std::vector<std::size_t> order(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) order[i] = i;
    auto rng = make_stream(cfg.seed, 0, stream_tag::placement);
    for (std::size_t i = cfg.n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    BitVector truth(cfg.n, 1);
    for (std::size_t k = 0; k < cfg.malicious_count; ++k) truth[order[k]] = 0;
    return truth;
}

namespace detail {

inline NetworkObservation sample_with_placement(const ScenarioConfig& cfg, std::uint64_t trial,
                                                const BitVector& placement) {
    NetworkObservation obs;
    auto event_rng = make_stream(cfg.seed, trial, stream_tag::event);
    obs.truth_event = event_rng.uniform01() < cfg.sensor.prior_h1() ? Hypothesis::H1 : Hypothesis::H0;
    const bool h1 = obs.truth_event == Hypothesis::H1;
    obs.truth_t = placement;
    obs.y.resize(cfg.n);
    obs.a.resize(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        // Fixed draw order per robot: measurement, flip, trust value.
        auto rng = make_stream(cfg.seed, trial, stream_tag::robot + i);
        const double u_measure = rng.uniform01();
        const double u_flip = rng.uniform01();
        const double u_trust = rng.uniform01();
        const bool legit = placement[i] != 0;
        const double fa = legit ? cfg.sensor.p_fa_l() : cfg.attack.pre_fa();
        const double md = legit ? cfg.sensor.p_md_l() : cfg.attack.pre_md();
        bool bit = h1 ? u_measure >= md : u_measure < fa;
        if (!legit && u_flip < cfg.attack.p_f()) bit = !bit;
        obs.y[i] = bit ? 1 : 0;
        obs.a[i] = inverse_cdf(legit ? cfg.trust.pmf_legit() : cfg.trust.pmf_malicious(), u_trust);
    }
    return obs;
}

}  // namespace detail

inline NetworkObservation sample_trial(const ScenarioConfig& cfg, std::uint64_t trial_index) {
    cfg.validate();
    return detail::sample_with_placement(cfg, trial_index, malicious_placement(cfg));
}

enum class MethodKind : std::uint8_t {
    Oracle,
    Oblivious,
    TwoStage,
    Aglrt,
    AglrtPrior,
    AglrtConstrained,
    Reputation,
};

struct MethodSpec {
    std::string name;
    MethodKind kind = MethodKind::Oracle;
    std::size_t window = 1;  // reputation only
    double eta = 0.5;        // reputation only
    double p_legit = 0.5;    // prior variant only

    bool sequential() const noexcept { return kind == MethodKind::Reputation; }
};

inline MethodSpec oracle_method() { return {"oracle", MethodKind::Oracle}; }
inline MethodSpec oblivious_method() { return {"oblivious", MethodKind::Oblivious}; }
inline MethodSpec two_stage_method() { return {"two_stage", MethodKind::TwoStage}; }
inline MethodSpec aglrt_method() { return {"aglrt", MethodKind::Aglrt}; }
inline MethodSpec aglrt_constrained_method() { return {"aglrt_constrained", MethodKind::AglrtConstrained}; }
inline MethodSpec aglrt_prior_method(double p_legit) {
    return {"aglrt_prior", MethodKind::AglrtPrior, 1, 0.5, p_legit};
}
inline MethodSpec baseline1_method() { return {"baseline1", MethodKind::Reputation, 1, 0.5}; }
inline MethodSpec baseline5_method() { return {"baseline5", MethodKind::Reputation, 5, 2.5}; }

// Looks up a method by its CLI name. aglrt_prior takes its prior from the caller.
inline std::optional<MethodSpec> method_by_name(const std::string& name, double p_legit = 0.5) {
    if (name == "oracle") return oracle_method();
    if (name == "oblivious") return oblivious_method();
    if (name == "two_stage") return two_stage_method();
    if (name == "aglrt") return aglrt_method();
    if (name == "aglrt_constrained") return aglrt_constrained_method();
    if (name == "aglrt_prior") return aglrt_prior_method(p_legit);
    if (name == "baseline1") return baseline1_method();
    if (name == "baseline5") return baseline5_method();
    return std::nullopt;
}

inline std::vector<MethodSpec> default_methods() {
    return {oracle_method(), oblivious_method(), two_stage_method(), aglrt_method(), baseline1_method(),
            baseline5_method()};
}

struct MethodResult {
    std::string name;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;

    double error_rate() const noexcept {
        return trials == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(trials);
    }
    // Wilson score interval half-width at 95%.
    double ci_halfwidth() const noexcept {
        if (trials == 0) return 0.0;
        constexpr double z = 1.959963984540054;
        const double n = static_cast<double>(trials);
        const double p = error_rate();
        return z / (1.0 + z * z / n) * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
    }
};

struct ErrorReport {
    std::vector<MethodResult> methods;

    const MethodResult& at(const std::string& name) const {
        for (const auto& m : methods)
            if (m.name == name) return m;
        throw DomainError("no method named '" + name + "' in report");
    }
};

struct ExperimentOptions {
    std::size_t threads = 1;  // 0 = hardware concurrency
    double delta_p = 0.01;
};

namespace detail {

struct PreparedMethod {
    MethodSpec spec;
    TwoStageThresholds thresholds;
};

inline Decision run_stateless(const PreparedMethod& m, const ScenarioConfig& cfg, const NetworkObservation& obs,
                              std::uint64_t trial) {
    switch (m.spec.kind) {
        case MethodKind::Oracle:
            return oracle_decide(obs, cfg.sensor);
        case MethodKind::Oblivious:
            return oblivious_decide(obs, cfg.sensor);
        case MethodKind::TwoStage: {
            auto rng = make_stream(cfg.seed, trial, stream_tag::method + static_cast<std::uint64_t>(m.spec.kind));
            return two_stage_decide(obs, m.thresholds, cfg.sensor, cfg.trust, rng);
        }
        case MethodKind::Aglrt:
            return aglrt_decide(obs.y, obs.a, cfg.sensor, cfg.trust);
        case MethodKind::AglrtPrior:
            return aglrt_decide_with_prior(obs.y, obs.a, cfg.sensor, cfg.trust, {m.spec.p_legit});
        case MethodKind::AglrtConstrained:
            return aglrt_decide_constrained(obs.y, obs.a, cfg.sensor, cfg.trust, cfg.malicious_proportion());
        case MethodKind::Reputation:
            break;
    }
    throw DomainError("method '" + m.spec.name + "' is not stateless");
}

inline std::size_t resolve_threads(std::size_t requested, std::size_t n_trials) {
    std::size_t t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return std::max<std::size_t>(1, std::min(t, n_trials));
}

}  // namespace detail

// Paired Monte Carlo experiment. Two Stage thresholds are optimized once, with
// m_bar set to the true malicious proportion.
inline ErrorReport run_experiment(const ScenarioConfig& cfg, std::uint64_t n_trials,
                                  const std::vector<MethodSpec>& methods, const ExperimentOptions& opts = {}) {
    cfg.validate();
    if (n_trials == 0) throw DomainError("n_trials must be at least 1");

    std::vector<detail::PreparedMethod> prepared;
    for (const auto& spec : methods) {
        detail::PreparedMethod p{spec, {}};
        if (spec.kind == MethodKind::TwoStage)
            p.thresholds = optimize_thresholds({cfg.malicious_proportion(), cfg.n, opts.delta_p}, cfg.sensor, cfg.trust);
        if (spec.kind == MethodKind::Reputation) ReputationState(cfg.n, spec.window, spec.eta);  // validates
        if (spec.kind == MethodKind::AglrtPrior) RobotPrior{spec.p_legit}.validate();
        prepared.push_back(std::move(p));
    }
    const BitVector placement = malicious_placement(cfg);
    std::vector<std::uint64_t> errors(methods.size(), 0);

    std::vector<std::size_t> stateless;
    std::vector<std::size_t> sequential;
    for (std::size_t k = 0; k < methods.size(); ++k) (methods[k].sequential() ? sequential : stateless).push_back(k);

    if (!stateless.empty()) {
        const std::size_t workers = detail::resolve_threads(opts.threads, static_cast<std::size_t>(n_trials));
        std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(methods.size(), 0));
        auto work = [&](std::size_t w) {
            const std::uint64_t begin = n_trials * w / workers;
            const std::uint64_t end = n_trials * (w + 1) / workers;
            for (std::uint64_t trial = begin; trial < end; ++trial) {
                const auto obs = detail::sample_with_placement(cfg, trial, placement);
                for (std::size_t k : stateless)
                    if (detail::run_stateless(prepared[k], cfg, obs, trial).hypothesis != obs.truth_event)
                        ++partial[w][k];
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& t : pool) t.join();
        }
        for (const auto& part : partial)
            for (std::size_t k = 0; k < methods.size(); ++k) errors[k] += part[k];
    }

    if (!sequential.empty()) {
        std::vector<ReputationState> states;
        for (std::size_t k : sequential) states.emplace_back(cfg.n, methods[k].window, methods[k].eta);
        for (std::uint64_t trial = 0; trial < n_trials; ++trial) {
            const auto obs = detail::sample_with_placement(cfg, trial, placement);
            for (std::size_t j = 0; j < sequential.size(); ++j) {
                auto [decision, next] = reputation_update_and_decide(obs, std::move(states[j]), cfg.sensor);
                states[j] = std::move(next);
                if (decision.hypothesis != obs.truth_event) ++errors[sequential[j]];
            }
        }
    }

    ErrorReport report;
    for (std::size_t k = 0; k < methods.size(); ++k) report.methods.push_back({methods[k].name, n_trials, errors[k]});
    return report;
}

struct SweepPoint {
    double proportion = 0.0;
    std::size_t malicious_count = 0;
    bool rounded = false;
    ErrorReport report;
};

// One paired experiment per proportion; the malicious count is round(m N).
inline std::vector<SweepPoint> sweep_malicious_proportion(const ScenarioConfig& base,
                                                          const std::vector<double>& proportions,
                                                          std::uint64_t n_trials,
                                                          const std::vector<MethodSpec>& methods,
                                                          const ExperimentOptions& opts = {}) {
    std::vector<SweepPoint> out;
    for (double m : proportions) {
        ScenarioConfig cfg = base;
        cfg.malicious_count = malicious_count_for(m, base.n);
        out.push_back({m, cfg.malicious_count, malicious_count_rounded(m, base.n),
                       run_experiment(cfg, n_trials, methods, opts)});
    }
    return out;
}

}  // namespace trustfuse
