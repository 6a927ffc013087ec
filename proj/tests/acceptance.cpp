// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Lines prefixed "info" are supplementary diagnostics and do not affect the result.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "photon_detect/experiments.hpp"

using namespace photon_detect;

namespace {

int failures = 0;

void report(bool ok, const char* id, const std::string& what) {
    std::printf("[%s] %s %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    if (!ok) ++failures;
}

void info(const std::string& what) { std::printf("  info  %s\n", what.c_str()); }

std::string fmt(const char* f, double a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec3 random_vec(std::mt19937& rng) {
    std::normal_distribution<double> g;
    return {g(rng), g(rng), g(rng)};
}

CVec3 random_cvec(std::mt19937& rng) {
    return random_vec(rng).cast<cplx>() + cplx{0.0, 1.0} * random_vec(rng).cast<cplx>();
}

ModeSet random_modes(std::mt19937& rng, int count) {
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    std::vector<Mode> modes;
    for (int i = 0; i < count; ++i) modes.push_back(make_mode(mag(rng) * random_vec(rng).normalized(), 1 + i % 2));
    return make_mode_set(std::move(modes), std::uniform_real_distribution<double>(0.5, 3.0)(rng));
}

AtomSpec random_atom(std::mt19937& rng, int levels) {
    std::uniform_real_distribution<double> gap(0.3, 2.5);
    AtomSpec a;
    a.position = 0.7 * random_vec(rng);
    a.ground_energy = -0.2;
    a.coupling = std::uniform_real_distribution<double>(0.01, 0.1)(rng);
    for (int r = 0; r < levels; ++r)
        a.levels.push_back({"e" + std::to_string(r + 1), a.ground_energy + gap(rng), random_cvec(rng), random_cvec(rng)});
    validate_atom(a);
    return a;
}

ModeSet bench_modes() {
    return make_mode_set({make_mode(Vec3(0, 0, 1.0), 1), make_mode(Vec3(0, 0, 1.3), 2)}, 1.0);
}

AtomSpec bench_atom(double coupling) {
    AtomSpec a;
    a.coupling = coupling;
    a.levels.push_back({"e1", 1.1, CVec3(cplx(1, 0), cplx(0, 0.5), 0.2), CVec3(cplx(0.1, 0), 0, cplx(0, -0.3))});
    validate_atom(a);
    return a;
}

void povm_completeness() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = povm_check(bench_modes(), {1, 1}, bench_atom(0.2), make_window(0, 10), 2000);
    const double elapsed = seconds_since(t0);
    bool in_range = true;
    for (double p : r.probabilities) in_range = in_range && p >= -1e-12 && p <= 1 + 1e-12;
    report(r.deviation <= 1e-10 && in_range && elapsed < 1.0, "1",
           fmt("POVM completeness: |sum p - 1| = %.3e (tol 1e-10), ", r.deviation) +
               fmt("p_excited = %.6f, runtime %.3f s (limit 1 s)", r.probabilities.at(1), elapsed));
}

void perturbation_scaling_check() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = perturbation_scaling(bench_modes(), {1, 1}, bench_atom(0.05), make_window(0, 10), 20000, 1e-4);
    const double elapsed = seconds_since(t0);
    const double ratio = s.relative_ratio();
    report(ratio >= 12 && ratio <= 20 && elapsed < 10.0, "2",
           fmt("perturbation scaling: e(g)/e(g/2) = %.4f for relative error (band [12, 20]), ", ratio) +
               fmt("p_first_order = %.3e, runtime %.2f s (limit 10 s)", s.full.p_first_order, elapsed));
    info(fmt("relative errors e(g) = %.4e, e(g/2) = %.4e", s.full.relative_error(), s.half.relative_error()));
    info(fmt("absolute error ratio |dp(g)|/|dp(g/2)| = %.4f", s.absolute_ratio()));
}

void route_equality() {
    std::mt19937 rng(2024);
    double route = 0.0, with_surface = 0.0, magnetic = 0.0, dyson = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const ModeSet ms = random_modes(rng, 2 + trial % 2);
        const FockSpace joint = make_space(std::vector<int>(ms.size(), 1 + trial % 2), {3});
        const FockSpace photons = joint.photon_space();
        AtomSpec a = random_atom(rng, 2);
        const double start = std::uniform_real_distribution<double>(-2, 2)(rng);
        const TimeWindow w = make_window(start, start + std::uniform_real_distribution<double>(1, 15)(rng));
        const bool rwa = trial % 2 == 0;
        for (const std::string label : {"e1", "e2"}) {
            const auto cur = detection_operator_current(ms, photons, a, label, w, rwa);
            const auto dip = detection_operator_dipole(ms, photons, a, label, w, rwa);
            const auto sur = detection_surface_term(ms, photons, a, label, w, rwa);
            route = std::max(route, max_abs(cur.op.matrix - dip.op.matrix));
            with_surface = std::max(with_surface, max_abs(cur.op.matrix - dip.op.matrix - sur.op.matrix));
        }
        AtomSpec m = a;
        for (auto& t : m.levels) t.dipole_e = CVec3::Zero();
        magnetic = std::max(magnetic, max_abs(detection_operator_current(ms, photons, m, "e1", w, rwa).op.matrix -
                                              detection_operator_dipole(ms, photons, m, "e1", w, rwa).op.matrix));

        const auto n = static_cast<Eigen::Index>(photons.dimension());
        Matrix g(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) g(r, c) = random_cvec(rng)(0);
        Matrix rho = g * g.adjoint();
        rho /= rho.trace();
        const QState state = QState::from_density(photons, 0.5 * (rho + rho.adjoint()));
        const FockSpace k = joint.apparatus_space();
        for (int r : {1, 2}) {
            const double p1 =
                dyson_first_order_prob(ms, joint, a, w, QOperator(k, transition_matrix(3, r, r)), state, ground_state(k));
            const auto d = detection_operator_dipole(ms, photons, a, "e" + std::to_string(r), w, false);
            dyson = std::max(dyson, std::abs(p1 - detect_prob(d, state)));
        }
    }
    report(route <= 1e-12 && dyson <= 1e-10, "3",
           fmt("route equality: max |D_current - D_dipole| = %.3e (tol 1e-12), ", route) +
               fmt("max |p_dyson - p_detect| = %.3e (tol 1e-10)", dyson));
    info(fmt("max |D_current - D_dipole - boundary term| = %.3e", with_surface));
    info(fmt("magnetic-only atoms: max |D_current - D_dipole| = %.3e", magnetic));
}

void line_width() {
    const double pi = std::numbers::pi;
    bool ok = true;
    std::string detail;
    double resonant10 = 0.0, resonant20 = 0.0;
    for (double T : {5.0, 10.0, 20.0}) {
        LineshapeConfig c;
        c.omega = 5.0;
        c.window = T;
        const int n = 1201;
        const double half_span = 3.0 * pi / T;
        for (int i = 0; i < n; ++i) c.detuning_grid.push_back(-half_span + 2.0 * half_span * i / (n - 1));
        const double step = 2.0 * half_span / (n - 1);
        const auto s = run_lineshape(c);
        const auto w = full_width_half_max(s);
        const auto zero = first_minimum_above_peak(s);
        const double fw = w ? *w * T : -1.0;
        const double zerr = zero ? std::abs(*zero - 2.0 * pi / T) : 1e9;
        ok = ok && w && std::abs(fw - 5.566) <= 0.05 && zero && zerr <= step;
        detail += fmt("T=%g: FWHM*T = %.4f, ", T, fw) + fmt("zero offset %.2e (step %.2e); ", zerr, step);
        if (T == 10.0) resonant10 = s.probability[static_cast<std::size_t>(n / 2)];
        if (T == 20.0) resonant20 = s.probability[static_cast<std::size_t>(n / 2)];
    }
    const double growth = resonant20 / resonant10;
    ok = ok && std::abs(growth - 4.0) <= 0.01;
    report(ok, "4", "natural line width: " + detail + fmt("p(20)/p(10) = %.6f (4 +/- 0.01)", growth));
}

void complementarity() {
    MziConfig e;
    e.half_angle = std::numbers::pi / 4;
    e.detector = DetectorKind::Electric;
    e.orientation = Vec3::UnitY();
    e.scan_x = default_scan(e);
    MziConfig m = e;
    m.detector = DetectorKind::Magnetic;
    m.orientation = path_magnetic_direction(m, 1);

    const auto [escan, em] = run_mzi(e);
    const auto mm = run_mzi(m).second;
    double worst = std::max(em.visibility * em.visibility + em.distinguishability * em.distinguishability,
                            mm.visibility * mm.visibility + mm.distinguishability * mm.distinguishability);
    std::mt19937 rng(45);
    for (int trial = 0; trial < 10; ++trial)
        for (DetectorKind kind : {DetectorKind::Electric, DetectorKind::Magnetic}) {
            MziConfig c = e;
            c.detector = kind;
            c.orientation = random_vec(rng).normalized();
            const auto r = run_mzi(c).second;
            worst = std::max(worst, r.visibility * r.visibility + r.distinguishability * r.distinguishability);
        }
    const auto period = measured_fringe_period(escan);
    const double spacing = e.scan_x[1] - e.scan_x[0];
    const double perr = period ? std::abs(*period - e.fringe_period()) : 1e9;
    const bool ok = em.visibility >= 0.999 && em.distinguishability <= 1e-6 && mm.visibility <= 1e-6 &&
                    mm.distinguishability >= 0.999 && worst <= 1 + 1e-9 && perr <= spacing;
    report(ok, "5",
           fmt("complementarity: electric V = %.6f, D = %.2e; ", em.visibility, em.distinguishability) +
               fmt("magnetic V = %.2e, D = %.6f; ", mm.visibility, mm.distinguishability) +
               fmt("max V^2+D^2 = %.12f over 22 configs; ", worst) +
               fmt("fringe period error %.2e (grid %.2e)", perr, spacing));
}

void rwa_silence() {
    std::mt19937 rng(6);
    double rwa_max = 0.0, worst_fraction = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const ModeSet ms = random_modes(rng, 3);
        const FockSpace s = make_space({1, 1, 1});
        const AtomSpec a = random_atom(rng, 1);
        const double gap = a.gap("e1");
        double bound = 0.0;
        for (const auto& mode : ms.modes)
            bound += std::norm(bdot(mode.eps.conjugate(), current_fourier(a, "e1", -mode.k))) * 4.0 /
                     (std::pow(gap + mode.omega, 2) * 2.0 * mode.omega * ms.volume);
        for (double T : {0.5, 5.0, 50.0, 500.0, 5000.0}) {
            const TimeWindow w = make_window(0, T);
            rwa_max = std::max(rwa_max, detect_prob(detection_operator_current(ms, s, a, "e1", w, true), vacuum_state(s)));
            const double p = detect_prob(detection_operator_current(ms, s, a, "e1", w, false), vacuum_state(s));
            worst_fraction = std::max(worst_fraction, p / bound);
        }
    }
    report(rwa_max == 0.0 && worst_fraction <= 1.0, "6",
           fmt("RWA vacuum: max p_rwa = %g (must be exactly 0), ", rwa_max) +
               fmt("max p_nonrwa / bound = %.6f over T in {0.5..5000}", worst_fraction));
}

void eb_commutator_check() {
    const ModeSet ms = symmetric_axis_modes(0.8, 1, 2.0);
    const Vec3 x(0.1, -0.2, 0.05), y(0.3, 0.1, 0.4);
    double dev = 0.0, drift = 0.0, dev2 = 0.0;
    const FockSpace s1 = make_space(std::vector<int>(ms.size(), 1));
    const FockSpace s2 = make_space(std::vector<int>(ms.size(), 2));
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            const auto c0 = eb_commutator(ms, s1, j, k, x, y, 0.0);
            const auto c1 = eb_commutator(ms, s1, j, k, x, y, 1.7);
            dev = std::max({dev, sub_cutoff_deviation(c0.numeric, c0.analytic),
                            sub_cutoff_deviation(c1.numeric, c1.analytic)});
            drift = std::max({drift, std::abs(c0.analytic - c1.analytic), max_abs(c0.numeric.matrix - c1.numeric.matrix)});
            for (double t : {0.0, 1.7}) {
                const auto c = eb_commutator(ms, s2, j, k, x, y, t);
                dev2 = std::max(dev2, restricted_deviation(c.numeric, c.analytic,
                                                           [&](std::size_t i) { return s2.total_photons(i) <= 1; }));
            }
        }
    report(dev <= 1e-12 && drift <= 1e-12, "7",
           fmt("E-B commutator: max |numeric - analytic| = %.3e (tol 1e-12), equal-time drift = %.3e (tol 1e-12)",
               dev, drift));
    info(fmt("cutoff 2, <=1-photon subspace: max |numeric - analytic| = %.3e", dev2));
}

} // namespace

int main() {
    const std::pair<const char*, void (*)()> criteria[] = {
        {"1", povm_completeness}, {"2", perturbation_scaling_check}, {"3", route_equality}, {"4", line_width},
        {"5", complementarity},   {"6", rwa_silence},                {"7", eb_commutator_check}};
    for (const auto& [id, check] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            check();
        } catch (const std::exception& e) {
            report(false, id, std::string("threw: ") + e.what());
        }
        info(fmt("criterion wall time %.2f s", seconds_since(t0)));
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
