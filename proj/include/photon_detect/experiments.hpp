#pragma once

// Desk-scale experiments: finite-window line shape, the two-beam
// interferometer with electric or magnetic film detectors, the E–B
// commutator table, meter completeness and perturbative scaling.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "photon_detect/atom_detector.hpp"
#include "photon_detect/errors.hpp"
#include "photon_detect/field_modes.hpp"
#include "photon_detect/fock.hpp"
#include "photon_detect/measurement.hpp"

namespace photon_detect {

struct ScanResult {
    std::vector<double> abscissa;
    std::vector<double> probability;
    std::vector<double> reference; // empty unless the experiment has an analytic curve
    std::vector<std::pair<std::string, std::string>> metadata;
};

namespace detail {
inline bool strictly_increasing(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return !(a < b); }) == v.end();
}
inline void require_finite(double v, const std::string& name) {
    if (!std::isfinite(v)) throw ConfigError(name + " must be finite");
}
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
inline Vec3 unit(const Vec3& v, const std::string& name) {
    if (!v.allFinite() || !(v.norm() > 0.0)) throw ConfigError(name + " must be a nonzero finite vector");
    return v.normalized();
}
} // namespace detail

// ---------------------------------------------------------------------------
// Line shape

struct LineshapeConfig {
    double omega = 1.0;
    std::vector<double> detuning_grid; // Δ_r − ω
    double window = 10.0;
    Vec3 dipole = Vec3::UnitX();
    double volume = 1.0;
    double coupling = 0.01;
};

inline void validate(const LineshapeConfig& c) {
    detail::require_finite(c.omega, "omega");
    detail::require_finite(c.window, "window");
    if (!(c.omega > 0.0)) throw ConfigError("omega must be > 0");
    if (!(c.window > 0.0)) throw ConfigError("window length must be > 0");
    if (!(c.volume > 0.0) || !std::isfinite(c.volume)) throw ConfigError("volume must be > 0");
    if (!(c.coupling >= 0.0) || !std::isfinite(c.coupling)) throw ConfigError("coupling must be >= 0");
    if (c.detuning_grid.empty()) throw ConfigError("detuning grid is empty");
    if (!detail::strictly_increasing(c.detuning_grid)) throw ConfigError("detuning grid must be strictly increasing");
    for (double d : c.detuning_grid) detail::require_finite(d, "detuning");
    if (!(c.detuning_grid.front() > -c.omega))
        throw ConfigError("detuning must exceed -omega so the excited level lies above the ground level");
    const Vec3 d = detail::unit(c.dipole, "dipole orientation");
    // The probe mode is polarized along x̂ (k ∥ ẑ).
    if (std::abs(d.x()) < 1e-12) throw ConfigError("dipole orientation is orthogonal to the probe polarization (x)");
}

/// |c| for the resonant single-mode coupling: g ω |ε·d̂| / √(2ωV).
inline double lineshape_coupling(const LineshapeConfig& c) {
    const Vec3 d = c.dipole.normalized();
    return c.coupling * c.omega * std::abs(d.x()) / std::sqrt(2.0 * c.omega * c.volume);
}

inline ScanResult run_lineshape(const LineshapeConfig& cfg) {
    validate(cfg);
    const ModeSet ms = make_mode_set({make_mode(Vec3(0.0, 0.0, cfg.omega), 1)}, cfg.volume);
    const FockSpace photons = make_space({1});
    const QState one_photon = QState::basis(photons, 1);
    const TimeWindow window = make_window(0.0, cfg.window);
    const double c = lineshape_coupling(cfg);

    ScanResult out;
    out.abscissa = cfg.detuning_grid;
    out.probability.resize(cfg.detuning_grid.size());
    out.reference.resize(cfg.detuning_grid.size());
    for (std::size_t i = 0; i < cfg.detuning_grid.size(); ++i) {
        const double det = cfg.detuning_grid[i];
        AtomSpec atom;
        atom.coupling = cfg.coupling;
        atom.levels.push_back({"e", cfg.omega + det, cfg.dipole.normalized().cast<cplx>(), CVec3::Zero()});
        const auto d = detection_operator_dipole(ms, photons, atom, "e", window, true);
        out.probability[i] = detect_prob(d, one_photon);
        const double s = sinc(0.5 * det * cfg.window);
        out.reference[i] = c * c * cfg.window * cfg.window * s * s;
    }
    out.metadata = {{"experiment", "lineshape"},
                    {"omega", detail::num(cfg.omega)},
                    {"window", detail::num(cfg.window)},
                    {"volume", detail::num(cfg.volume)},
                    {"coupling", detail::num(cfg.coupling)}};
    return out;
}

inline std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

/// Full width at half maximum of the peak, by linear interpolation between grid points.
inline std::optional<double> full_width_half_max(const ScanResult& s) {
    const auto& x = s.abscissa;
    const auto& p = s.probability;
    if (p.size() < 3) return std::nullopt;
    const std::size_t peak = argmax(p);
    const double half = 0.5 * p[peak];
    std::optional<double> left, right;
    for (std::size_t i = peak; i > 0; --i)
        if (p[i - 1] <= half) {
            left = x[i - 1] + (half - p[i - 1]) * (x[i] - x[i - 1]) / (p[i] - p[i - 1]);
            break;
        }
    for (std::size_t i = peak; i + 1 < p.size(); ++i)
        if (p[i + 1] <= half) {
            right = x[i] + (p[i] - half) * (x[i + 1] - x[i]) / (p[i] - p[i + 1]);
            break;
        }
    if (!left || !right) return std::nullopt;
    return *right - *left;
}

/// Abscissa of the first local minimum to the right of the peak.
inline std::optional<double> first_minimum_above_peak(const ScanResult& s) {
    const auto& p = s.probability;
    for (std::size_t i = argmax(p) + 1; i + 1 < p.size(); ++i)
        if (p[i] <= p[i - 1] && p[i] <= p[i + 1]) return s.abscissa[i];
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Two-beam interferometer

enum class DetectorKind { Electric, Magnetic };

struct ComplementarityMetrics {
    double visibility = 0.0;
    double distinguishability = 0.0;
};

struct MziConfig {
    double wavenumber = 1.0;
    double half_angle = std::numbers::pi / 4.0;
    double phase = 0.0;
    double film_z = 0.0;
    std::vector<double> scan_x;
    DetectorKind detector = DetectorKind::Electric;
    Vec3 orientation = Vec3::UnitY();
    double window = 10.0;
    double volume = 1.0;
    double coupling = 0.01;

    double fringe_period() const { return std::numbers::pi / (wavenumber * std::sin(half_angle)); }
    /// k̂± = cosθ ẑ ± sinθ x̂ scaled by the wavenumber.
    Vec3 beam(int path) const {
        const double sx = path == 1 ? std::sin(half_angle) : -std::sin(half_angle);
        return wavenumber * Vec3(sx, 0.0, std::cos(half_angle));
    }
};

/// Unit direction of the magnetic field of beam `path` (1 or 2), k̂ × ŷ.
inline Vec3 path_magnetic_direction(const MziConfig& c, int path) {
    return c.beam(path).cross(Vec3::UnitY()).normalized();
}

/// `points` film positions spanning `periods` fringe periods, centred on x = 0.
inline std::vector<double> default_scan(const MziConfig& c, int points = 256, double periods = 4.0) {
    const double span = periods * c.fringe_period();
    std::vector<double> xs(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = -0.5 * span + span * i / (points - 1);
    return xs;
}

inline void validate_geometry(const MziConfig& c) {
    detail::require_finite(c.wavenumber, "wavenumber");
    detail::require_finite(c.half_angle, "half_angle");
    detail::require_finite(c.phase, "phase");
    detail::require_finite(c.film_z, "film_z");
    detail::require_finite(c.window, "window");
    if (!(c.wavenumber > 0.0)) throw ConfigError("wavenumber must be > 0");
    if (!(c.half_angle > 0.0 && c.half_angle < std::numbers::pi / 2.0))
        throw ConfigError("half_angle must lie in (0, pi/2)");
    if (!(c.window > 0.0)) throw ConfigError("window length must be > 0");
    if (!(c.volume > 0.0) || !std::isfinite(c.volume)) throw ConfigError("volume must be > 0");
    if (!(c.coupling >= 0.0) || !std::isfinite(c.coupling)) throw ConfigError("coupling must be >= 0");
    detail::unit(c.orientation, "detector orientation");
    if (c.scan_x.empty()) throw ConfigError("scan grid is empty");
    if (!detail::strictly_increasing(c.scan_x)) throw ConfigError("scan grid must be strictly increasing");
    for (double x : c.scan_x) detail::require_finite(x, "scan position");
}

/// Geometry checks plus fringe coverage: ≥ 3 periods, ≥ 16 points per period.
inline void validate(const MziConfig& c) {
    validate_geometry(c);
    const double range = c.scan_x.back() - c.scan_x.front();
    const double period = c.fringe_period();
    if (!(period <= range))
        throw ConfigError("fringe period " + detail::num(period) + " exceeds the scan range " + detail::num(range));
    if (range < 3.0 * period) throw ConfigError("scan must cover at least 3 fringe periods");
    const double per_period = static_cast<double>(c.scan_x.size() - 1) * period / range;
    if (per_period < 16.0) throw ConfigError("scan needs at least 16 points per fringe period");
}

namespace detail {
struct MziSetup {
    ModeSet modes;
    FockSpace photons;
    TimeWindow window;
};

inline MziSetup mzi_setup(const MziConfig& c) {
    const CVec3 y = Vec3::UnitY().cast<cplx>();
    return {make_mode_set({make_mode(c.beam(1), 1, y), make_mode(c.beam(2), 1, y)}, c.volume), make_space({1, 1}),
            make_window(0.0, c.window)};
}

inline AtomSpec film_atom(const MziConfig& c, double x) {
    AtomSpec atom;
    atom.position = Vec3(x, 0.0, c.film_z);
    atom.coupling = c.coupling;
    const CVec3 o = c.orientation.normalized().cast<cplx>();
    // Resonant with both beams (ω = k), so the window factor is T for every pixel.
    if (c.detector == DetectorKind::Electric)
        atom.levels.push_back({"e", c.wavenumber, o, CVec3::Zero()});
    else
        atom.levels.push_back({"e", c.wavenumber, CVec3::Zero(), o});
    return atom;
}

inline std::vector<double> film_response(const MziConfig& c, const MziSetup& s, const QState& rho) {
    std::vector<double> p(c.scan_x.size());
    for (std::size_t i = 0; i < c.scan_x.size(); ++i) {
        const auto d = detection_operator_dipole(s.modes, s.photons, film_atom(c, c.scan_x[i]), "e", s.window, true);
        p[i] = detect_prob(d, rho);
    }
    return p;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}
} // namespace detail

/// (p_max − p_min)/(p_max + p_min); 0 when the scan is dark.
inline double visibility(const ScanResult& scan) {
    if (scan.probability.size() < 2) throw UsageError("visibility needs at least two scan points");
    const auto [lo, hi] = std::minmax_element(scan.probability.begin(), scan.probability.end());
    if (*hi <= 1e-15) return 0.0;
    return (*hi - *lo) / (*hi + *lo);
}

/// |p̄₁ − p̄₂| / (p̄₁ + p̄₂) from single-path inputs averaged over the film.
inline double distinguishability(const MziConfig& cfg) {
    validate_geometry(cfg);
    const auto setup = detail::mzi_setup(cfg);
    const double p1 = detail::mean(detail::film_response(cfg, setup, QState::basis(setup.photons, 2)));
    const double p2 = detail::mean(detail::film_response(cfg, setup, QState::basis(setup.photons, 1)));
    if (p1 < 1e-15 && p2 < 1e-15) throw NumericError("distinguishability undefined: detector sees neither path");
    return std::abs(p1 - p2) / (p1 + p2);
}

inline std::pair<ScanResult, ComplementarityMetrics> run_mzi(const MziConfig& cfg) {
    validate(cfg);
    const auto setup = detail::mzi_setup(cfg);
    // Basis |n1 n2⟩ → index 2 n1 + n2.
    Vector psi = Vector::Zero(4);
    psi(2) = 1.0 / std::numbers::sqrt2;
    psi(1) = std::exp(cplx{0.0, cfg.phase}) / std::numbers::sqrt2;
    const QState superposition = QState::pure(setup.photons, psi);

    ScanResult scan;
    scan.abscissa = cfg.scan_x;
    scan.probability = detail::film_response(cfg, setup, superposition);
    scan.metadata = {{"experiment", "mzi"},
                     {"detector", cfg.detector == DetectorKind::Electric ? "electric" : "magnetic"},
                     {"wavenumber", detail::num(cfg.wavenumber)},
                     {"half_angle", detail::num(cfg.half_angle)},
                     {"phase", detail::num(cfg.phase)},
                     {"fringe_period", detail::num(cfg.fringe_period())}};
    ComplementarityMetrics m{visibility(scan), distinguishability(cfg)};
    return {std::move(scan), m};
}

/// Mean spacing of interior local maxima; nullopt with fewer than two maxima.
inline std::optional<double> measured_fringe_period(const ScanResult& s) {
    std::vector<double> peaks;
    const auto& p = s.probability;
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
        if (p[i] > p[i - 1] && p[i] >= p[i + 1]) peaks.push_back(s.abscissa[i]);
    if (peaks.size() < 2) return std::nullopt;
    return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

// ---------------------------------------------------------------------------
// E–B commutator table

struct CommutatorRow {
    double t = 0.0;
    int j = 0;
    int k = 0;
    cplx numeric;  // ⟨vac| [E_j(x,t), B_k(y,t)] |vac⟩
    cplx analytic; // discrete mode sum
    double deviation = 0.0;
};

struct CommutatorReport {
    std::vector<CommutatorRow> rows;
    double max_deviation = 0.0;
};

/// Deviation is max |numeric − analytic·1| over the sub-cutoff subspace.
inline CommutatorReport run_commutator_report(const ModeSet& ms, const FockSpace& space, const Vec3& x,
                                              const Vec3& y, const std::vector<std::pair<int, int>>& components,
                                              const std::vector<double>& times) {
    CommutatorReport rep;
    for (double t : times)
        for (const auto& [j, k] : components) {
            if (j < 0 || j > 2 || k < 0 || k > 2) throw IndexError("field components must be 0, 1 or 2");
            const auto c = eb_commutator(ms, space, j, k, x, y, t);
            CommutatorRow row{t, j, k, c.numeric.matrix(0, 0), c.analytic, sub_cutoff_deviation(c.numeric, c.analytic)};
            rep.max_deviation = std::max(rep.max_deviation, row.deviation);
            rep.rows.push_back(row);
        }
    return rep;
}

/// Both polarizations of ±k_n ẑ for n = 1..count; reflection-symmetric along z.
inline ModeSet symmetric_axis_modes(double k0, int count, double volume) {
    std::vector<Mode> modes;
    for (int n = 1; n <= count; ++n)
        for (double sign : {1.0, -1.0})
            for (int s : {1, 2}) modes.push_back(make_mode(Vec3(0.0, 0.0, sign * n * k0), s));
    return make_mode_set(std::move(modes), volume);
}

// ---------------------------------------------------------------------------
// Meter completeness and perturbative scaling

struct PovmCheck {
    std::vector<double> probabilities;
    double sum = 0.0;
    double deviation = 0.0;
};

/// Exact channel for one photon in `photon_mode` against a single atom; Σ_r p_r over the level meter.
inline PovmCheck povm_check(const ModeSet& ms, const std::vector<int>& cutoffs, const AtomSpec& atom,
                            const TimeWindow& window, int steps, std::size_t photon_mode = 0) {
    const FockSpace joint = make_space(cutoffs, {atom.dimension()});
    const FockSpace photons = joint.photon_space();
    std::vector<int> occ(cutoffs.size(), 0);
    if (photon_mode >= occ.size()) throw IndexError("photon mode out of range");
    occ[photon_mode] = 1;
    const QState rho = QState::basis(photons, photons.index_of(occ));
    const FockSpace apparatus = joint.apparatus_space();
    const QState sigma = ground_state(apparatus);
    const Meter meter = level_meter(apparatus);
    const QOperator u = exact_propagator(ms, joint, atom, window, steps);
    PovmCheck out;
    for (const auto& p : meter.projectors) {
        out.probabilities.push_back(born_probability(p, u, rho, sigma));
        out.sum += out.probabilities.back();
    }
    out.deviation = std::abs(out.sum - 1.0);
    return out;
}

struct ScalingPoint {
    double coupling = 0.0;
    double p_exact = 0.0;
    double p_first_order = 0.0;
    double relative_error() const { return std::abs(p_exact - p_first_order) / p_first_order; }
    double absolute_error() const { return std::abs(p_exact - p_first_order); }
};

struct ScalingStudy {
    ScalingPoint full;
    ScalingPoint half;
    double relative_ratio() const { return full.relative_error() / half.relative_error(); }
    double absolute_ratio() const { return full.absolute_error() / half.absolute_error(); }
};

/// Excitation of the first level: exact channel vs first-order estimate at g and g/2,
/// with g rescaled so the first-order probability equals `target`.
inline ScalingStudy perturbation_scaling(const ModeSet& ms, const std::vector<int>& cutoffs, AtomSpec atom,
                                         const TimeWindow& window, int steps, double target,
                                         std::size_t photon_mode = 0) {
    if (!(target > 0.0 && target < 1.0)) throw ConfigError("target probability must lie in (0, 1)");
    if (!(atom.coupling > 0.0)) throw ConfigError("perturbation scaling needs a nonzero seed coupling");
    const FockSpace joint = make_space(cutoffs, {atom.dimension()});
    const FockSpace photons = joint.photon_space();
    std::vector<int> occ(cutoffs.size(), 0);
    if (photon_mode >= occ.size()) throw IndexError("photon mode out of range");
    occ[photon_mode] = 1;
    const QState rho = QState::basis(photons, photons.index_of(occ));
    const FockSpace apparatus = joint.apparatus_space();
    const QState sigma = ground_state(apparatus);
    const QOperator excited(apparatus, transition_matrix(atom.dimension(), 1, 1));

    const auto first = [&](const AtomSpec& a) {
        return dyson_first_order_prob(ms, joint, a, window, excited, rho, sigma);
    };
    const double seed = first(atom);
    if (!(seed > 0.0)) throw NumericError("first-order probability vanishes; cannot tune the coupling");
    atom.coupling *= std::sqrt(target / seed);

    const auto point = [&](double g) {
        AtomSpec a = atom;
        a.coupling = g;
        const QOperator u = exact_propagator(ms, joint, a, window, steps);
        return ScalingPoint{g, born_probability(excited, u, rho, sigma), first(a)};
    };
    return {point(atom.coupling), point(0.5 * atom.coupling)};
}

} // namespace photon_detect
