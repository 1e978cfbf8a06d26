#pragma once
// Subcommand bodies for the trustfuse tool. Each writes one CSV plus a
// manifest into the output directory and returns a process exit status.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "trustfuse/experiment_spec.hpp"
#include "trustfuse/sim.hpp"
#include "trustfuse/two_stage.hpp"

namespace trustfuse {

inline constexpr const char* artifact_version = "1.0.0";

struct CommandOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::size_t threads = 1;
    std::string out_dir = "out";
};

namespace detail {

inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

inline ExperimentSpec apply_overrides(ExperimentSpec spec, const CommandOptions& opt) {
    if (opt.seed) {
        spec.scenario.seed = *opt.seed;
        spec.raw["seed"] = std::to_string(*opt.seed);
    }
    if (opt.trials) {
        if (*opt.trials == 0) throw SpecError(SpecError::Kind::Invariant, "--trials must be at least 1");
        spec.trials = *opt.trials;
        spec.raw["trials"] = std::to_string(*opt.trials);
    }
    return spec;
}

// Everything needed to regenerate the outputs. The thread count is left out
// because it does not affect them.
inline void write_manifest(const std::filesystem::path& dir, const std::string& command, const ExperimentSpec& spec) {
    auto out = open_output(dir / (command + "_manifest.txt"));
    out << "# trustfuse run manifest\n";
    out << "artifact_version = " << artifact_version << "\n";
    out << "command = " << command << "\n";
    out << "effective_seed = " << spec.scenario.seed << "\n";
    out << "effective_trials = " << spec.trials << "\n";
    out << "effective_delta_p = " << fmt(spec.delta_p) << "\n";
    out << "# spec\n";
    for (const auto& [key, value] : spec.raw) out << key << " = " << value << "\n";
}

inline void write_sweep_rows(std::ostream& csv, const std::vector<SweepPoint>& points) {
    csv << "proportion,method,trials,errors,error_rate,ci_halfwidth\n";
    for (const auto& p : points)
        for (const auto& m : p.report.methods)
            csv << fmt(p.proportion) << ',' << m.name << ',' << m.trials << ',' << m.errors << ','
                << fmt(m.error_rate()) << ',' << fmt(m.ci_halfwidth()) << '\n';
}

inline void print_percent(std::ostream& log, const std::vector<SweepPoint>& points) {
    for (const auto& p : points) {
        log << "m = " << fmt(p.proportion) << " (" << p.malicious_count << " malicious)\n";
        for (const auto& m : p.report.methods) {
            char line[128];
            std::snprintf(line, sizeof line, "  %-18s %7.2f%% +/- %.2f\n", m.name.c_str(), 100.0 * m.error_rate(),
                          100.0 * m.ci_halfwidth());
            log << line;
        }
    }
}

inline void warn_rounding(std::ostream& err, double m, std::size_t n) {
    if (malicious_count_rounded(m, n))
        err << "warning: " << fmt(m) << " * " << n << " is not an integer; using " << malicious_count_for(m, n)
            << " malicious robots\n";
}

inline std::filesystem::path prepare_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace detail

inline int cmd_run(const ExperimentSpec& input, const CommandOptions& opt, std::ostream& log, std::ostream& err) {
    const auto spec = detail::apply_overrides(input, opt);
    const auto dir = detail::prepare_dir(opt.out_dir);
    const auto& cfg = spec.scenario;
    const SweepPoint point{cfg.malicious_proportion(), cfg.malicious_count, false,
                           run_experiment(cfg, spec.trials, spec.methods, {opt.threads, spec.delta_p})};
    auto csv = detail::open_output(dir / "run.csv");
    detail::write_sweep_rows(csv, {point});
    detail::write_manifest(dir, "run", spec);
    detail::print_percent(log, {point});
    (void)err;
    return 0;
}

inline int cmd_sweep(const ExperimentSpec& input, const CommandOptions& opt, std::ostream& log, std::ostream& err) {
    const auto spec = detail::apply_overrides(input, opt);
    const auto dir = detail::prepare_dir(opt.out_dir);
    for (double m : spec.proportions) detail::warn_rounding(err, m, spec.scenario.n);
    const auto points = sweep_malicious_proportion(spec.scenario, spec.proportions, spec.trials, spec.methods,
                                                   {opt.threads, spec.delta_p});
    auto csv = detail::open_output(dir / "sweep.csv");
    detail::write_sweep_rows(csv, points);
    detail::write_manifest(dir, "sweep", spec);
    detail::print_percent(log, points);
    return 0;
}

// Noiseless-sensor m* comparison with P_trust,M = 1 - P_trust,L, plus the
// exact m* of the spec's own model.
inline int cmd_mstar(const ExperimentSpec& input, const CommandOptions& opt, std::ostream& log, std::ostream& err) {
    const auto spec = detail::apply_overrides(input, opt);
    const auto dir = detail::prepare_dir(opt.out_dir);
    const auto& s = spec.scenario.sensor;
    auto csv = detail::open_output(dir / "mstar.csv");
    csv << "p_trust_l,m_star_exact,m_star_approx\n";
    for (double p_l : spec.mstar_p_trust_l) {
        const double exact = m_star_exact_noiseless(p_l, 1.0 - p_l, spec.mstar_n, s.prior_h0(), spec.mstar_delta_m);
        const double approx =
            m_star_normal_approx(p_l, 1.0 - p_l, spec.mstar_n, s.prior_h0(), s.prior_h1(), spec.mstar_delta_m);
        csv << detail::fmt(p_l) << ',' << detail::fmt(exact) << ',' << detail::fmt(approx) << '\n';
        log << "p_trust_l = " << detail::fmt(p_l) << ": m* exact " << detail::fmt(exact) << ", approx "
            << detail::fmt(approx) << "\n";
    }
    const std::size_t n = spec.scenario.n;
    const double full = m_star_exact(n, s, spec.scenario.trust, 1.0 / static_cast<double>(n), spec.delta_p);
    log << "m* for the configured model at N = " << n << ": " << detail::fmt(full) << "\n";
    detail::write_manifest(dir, "mstar", spec);
    (void)err;
    return 0;
}

// Exact worst-case error and its upper bound at each configured N, using the
// optimized thresholds. Rows where the bound does not apply say so.
inline int cmd_bounds(const ExperimentSpec& input, const CommandOptions& opt, std::ostream& log, std::ostream& err) {
    const auto spec = detail::apply_overrides(input, opt);
    if (!spec.bounds_proportion) throw SpecError(SpecError::Kind::Invariant, "bounds requires 'bounds_proportion'");
    if (spec.bounds_n.empty()) throw SpecError(SpecError::Kind::Invariant, "bounds requires 'bounds_n'");
    const auto dir = detail::prepare_dir(opt.out_dir);
    const double m = *spec.bounds_proportion;
    const auto& s = spec.scenario.sensor;
    const auto& trust = spec.scenario.trust;
    auto csv = detail::open_output(dir / "bounds.csv");
    csv << "N,exact_error,bound,status\n";
    for (std::size_t n : spec.bounds_n) {
        detail::warn_rounding(err, m, n);
        const WorstCaseConfig cfg{m, n, spec.delta_p};
        const auto thr = optimize_thresholds(cfg, s, trust);
        csv << n << ',' << detail::fmt(thr.worst_case_error) << ',';
        try {
            const double bound = error_upper_bound(thr, cfg, default_bound_region(thr, trust), s, trust);
            csv << detail::fmt(bound) << ",ok\n";
            log << "N = " << n << ": exact " << detail::fmt(thr.worst_case_error) << ", bound " << detail::fmt(bound)
                << "\n";
        } catch (const ValidityError& e) {
            csv << ",invalid\n";
            err << "N = " << n << ": bound not applicable: " << e.what() << "\n";
        }
    }
    detail::write_manifest(dir, "bounds", spec);
    return 0;
}

}  // namespace trustfuse
