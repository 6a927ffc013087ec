#pragma once

// Dispatch from a parsed RunConfig to the experiments, producing a ResultTable.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <string>

#include "photon_detect/config.hpp"
#include "photon_detect/experiments.hpp"
#include "photon_detect/table.hpp"

namespace photon_detect {

inline constexpr const char* tool_version = "0.1.0";

namespace detail {

inline ResultTable run_experiment(const LineshapeConfig& c) {
    const ScanResult s = run_lineshape(c);
    ResultTable t;
    t.columns = {"detuning", "probability", "analytic_reference"};
    for (std::size_t i = 0; i < s.abscissa.size(); ++i) t.add_row({s.abscissa[i], s.probability[i], s.reference[i]});
    if (const auto w = full_width_half_max(s)) t.footer.push_back("fwhm_times_window=" + format_number(*w * c.window));
    return t;
}

inline ResultTable run_experiment(const MziConfig& c) {
    const auto [scan, metrics] = run_mzi(c);
    ResultTable t;
    t.columns = {"x", "probability"};
    for (std::size_t i = 0; i < scan.abscissa.size(); ++i) t.add_row({scan.abscissa[i], scan.probability[i]});
    t.footer.push_back("V=" + format_number(metrics.visibility));
    t.footer.push_back("D=" + format_number(metrics.distinguishability));
    return t;
}

inline ResultTable run_experiment(const CommutatorConfig& c) {
    const FockSpace space = make_space(std::vector<int>(c.modes.size(), c.cutoff));
    const auto rep = run_commutator_report(c.modes, space, c.x, c.y, c.components, c.times);
    ResultTable t;
    t.columns = {"t", "j", "k", "numeric_re", "numeric_im", "analytic_re", "analytic_im", "deviation"};
    for (const auto& r : rep.rows)
        t.add_row({r.t, static_cast<double>(r.j), static_cast<double>(r.k), r.numeric.real(), r.numeric.imag(),
                   r.analytic.real(), r.analytic.imag(), r.deviation});
    t.footer.push_back("max_deviation=" + format_number(rep.max_deviation));
    return t;
}

inline ResultTable run_experiment(const PovmConfig& c) {
    const auto res = povm_check(c.modes, std::vector<int>(c.modes.size(), c.cutoff), c.atom, c.window, c.steps,
                                c.photon_mode);
    ResultTable t;
    t.columns = {"sum_p", "deviation"};
    t.add_row({res.sum, res.deviation});
    for (std::size_t r = 0; r < res.probabilities.size(); ++r)
        t.footer.push_back("p" + std::to_string(r) + "=" + format_number(res.probabilities[r]));
    return t;
}

inline ResultTable run_experiment(const ScalingConfig& c) {
    const auto study = perturbation_scaling(c.modes, std::vector<int>(c.modes.size(), c.cutoff), c.atom, c.window,
                                            c.steps, c.target, c.photon_mode);
    ResultTable t;
    t.columns = {"coupling", "p_exact", "p_first_order", "relative_error", "absolute_error"};
    for (const auto& p : {study.full, study.half})
        t.add_row({p.coupling, p.p_exact, p.p_first_order, p.relative_error(), p.absolute_error()});
    t.footer.push_back("relative_error_ratio=" + format_number(study.relative_ratio()));
    t.footer.push_back("absolute_error_ratio=" + format_number(study.absolute_ratio()));
    return t;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace detail

/// Runs the configured experiment. The provenance header echoes the fully
/// defaulted config; the timestamp line is omitted when `reproducible`.
inline ResultTable run(const RunConfig& config, bool reproducible = true) {
    ResultTable t = std::visit([](const auto& s) { return detail::run_experiment(s); }, config.settings);
    t.provenance.push_back(std::string("photon-detect ") + tool_version);
    t.provenance.push_back("experiment=" + config.experiment);
    t.provenance.push_back("config_hash=" + detail::hex64(config.hash()));
    if (!reproducible) t.provenance.push_back("generated=" + detail::utc_timestamp());
    for (const auto& line : config.echo) t.provenance.push_back(line);
    return t;
}

/// CLI exit code for a library error.
inline int exit_code(const Error& e) {
    switch (e.kind()) {
    case Error::Kind::Numeric:
    case Error::Kind::OutcomeImpossible: return 3;
    case Error::Kind::IO: return 4;
    default: return 2;
    }
}

} // namespace photon_detect
