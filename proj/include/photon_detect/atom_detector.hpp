#pragma once

// Point detector atom and the photon detection operator D_r.
//
// Two constructions are provided:
//   * current route: D = Σ_μ (ε_μ·J_{k_μ r}) W(Δ_r − ω_μ) â_μ / √(2ω_μ V) + (counter-rotating â† term)
//   * dipole route:  D = g Σ_μ (E⁺_μ(x₀)·d_r0 + B⁺_μ(x₀)·m_r0) W(Δ_r − ω_μ) â_μ + (counter-rotating â† term)
// with the analytic window factor W(ν) = ∫_{t0}^{t1} e^{iνt} dt. The magnetic
// parts agree identically. The electric parts differ by the time-boundary
// term g[Â(x₀,t)·d_r0 e^{iΔ_r t}]_{t0}^{t1}, which `detection_surface_term`
// returns, so that current = dipole + surface holds exactly.

#include <cmath>
#include <string>
#include <vector>

#include "photon_detect/errors.hpp"
#include "photon_detect/field_modes.hpp"
#include "photon_detect/fock.hpp"

namespace photon_detect {

/// Bilinear a·b for complex 3-vectors (Eigen's dot() conjugates its left operand).
inline cplx bdot(const CVec3& a, const CVec3& b) { return a.cwiseProduct(b).sum(); }

struct Transition {
    std::string label;
    double energy = 0.0;
    CVec3 dipole_e = CVec3::Zero();
    CVec3 dipole_m = CVec3::Zero();
};

struct AtomSpec {
    Vec3 position = Vec3::Zero();
    double ground_energy = 0.0;
    std::vector<Transition> levels;
    double coupling = 1.0;

    const Transition& transition(const std::string& label) const {
        for (const auto& t : levels)
            if (t.label == label) return t;
        throw LookupError("unknown transition '" + label + "'");
    }
    std::size_t level_index(const std::string& label) const {
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (levels[i].label == label) return i + 1;
        throw LookupError("unknown transition '" + label + "'");
    }
    double gap(const std::string& label) const { return transition(label).energy - ground_energy; }
    /// Atom factor dimension: ground plus every excited level.
    int dimension() const { return static_cast<int>(levels.size()) + 1; }
};

inline void validate_atom(const AtomSpec& atom) {
    if (!atom.position.allFinite()) throw DomainError("atom position must be finite");
    if (!std::isfinite(atom.ground_energy)) throw DomainError("ground energy must be finite");
    if (!(atom.coupling >= 0.0) || !std::isfinite(atom.coupling)) throw DomainError("coupling scale must be >= 0");
    if (atom.levels.empty()) throw DomainError("atom needs at least one excited level");
    for (std::size_t i = 0; i < atom.levels.size(); ++i) {
        const auto& t = atom.levels[i];
        for (std::size_t j = 0; j < i; ++j)
            if (atom.levels[j].label == t.label) throw DomainError("duplicate level label '" + t.label + "'");
        if (!std::isfinite(t.energy) || !(t.energy > atom.ground_energy))
            throw DomainError("level '" + t.label + "' must lie above the ground energy");
        if (!t.dipole_e.allFinite() || !t.dipole_m.allFinite())
            throw DomainError("level '" + t.label + "' has non-finite dipoles");
        if (t.dipole_e.norm() == 0.0 && t.dipole_m.norm() == 0.0)
            throw DomainError("level '" + t.label + "' has neither electric nor magnetic dipole");
    }
}

struct TimeWindow {
    double t0 = 0.0;
    double t1 = 1.0;

    double length() const { return t1 - t0; }
};

inline TimeWindow make_window(double t0, double t1) {
    if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0))
        throw DomainError("time window needs finite t0 < t1");
    return {t0, t1};
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

/// W(ν) = ∫_{t0}^{t1} e^{iνt} dt = T e^{iν(t0+t1)/2} sinc(νT/2).
inline cplx window_factor(double nu, const TimeWindow& w) {
    const double T = w.length();
    return T * std::exp(cplx{0.0, nu * 0.5 * (w.t0 + w.t1)}) * sinc(0.5 * nu * T);
}

/// J_kr = g [ iΔ_r d_r0 − i k×m_r0 ] e^{ik·x₀} for a point dipole current.
inline CVec3 current_fourier(const AtomSpec& atom, const std::string& label, const Vec3& k) {
    const Transition& tr = atom.transition(label);
    const double gap = tr.energy - atom.ground_energy;
    const cplx i{0.0, 1.0};
    const CVec3 kc = k.cast<cplx>();
    const CVec3 j = i * gap * tr.dipole_e - i * cross(kc, tr.dipole_m);
    return atom.coupling * std::exp(i * k.dot(atom.position)) * j;
}

struct DetectionOperator {
    QOperator op;
    std::string transition;
    TimeWindow window;
    bool rwa = true;
};

namespace detail {
template <typename Coeff>
DetectionOperator assemble_detection(const ModeSet& ms, const FockSpace& space, const std::string& label,
                                     const TimeWindow& window, bool rwa, Coeff coeff) {
    check_mode_count(ms, space);
    const FockSpace photons = space.photon_space();
    QOperator d = QOperator::zero(photons);
    for (std::size_t mu = 0; mu < ms.size(); ++mu) {
        const auto [absorb, emit] = coeff(ms[mu]);
        const Matrix a = annihilation_op(photons, mu).matrix;
        d.matrix += absorb * a;
        if (!rwa) d.matrix += emit * a.adjoint();
    }
    return {std::move(d), label, window, rwa};
}
} // namespace detail

inline DetectionOperator detection_operator_current(const ModeSet& ms, const FockSpace& space, const AtomSpec& atom,
                                                    const std::string& label, const TimeWindow& window, bool rwa) {
    const double gap = atom.gap(label);
    return detail::assemble_detection(ms, space, label, window, rwa, [&](const Mode& m) {
        const double norm = 1.0 / std::sqrt(2.0 * m.omega * ms.volume);
        const cplx absorb = bdot(m.eps, current_fourier(atom, label, m.k)) * window_factor(gap - m.omega, window) * norm;
        const cplx emit =
            bdot(m.eps.conjugate(), current_fourier(atom, label, -m.k)) * window_factor(gap + m.omega, window) * norm;
        return std::pair{absorb, emit};
    });
}

inline DetectionOperator detection_operator_dipole(const ModeSet& ms, const FockSpace& space, const AtomSpec& atom,
                                                   const std::string& label, const TimeWindow& window, bool rwa) {
    const Transition& tr = atom.transition(label);
    const double gap = atom.gap(label);
    const Vec3& x0 = atom.position;
    return detail::assemble_detection(ms, space, label, window, rwa, [&](const Mode& m) {
        const auto coupling = [&](Part part) {
            return bdot(field_coefficient(m, ms.volume, {Field::E, part}, x0, 0.0), tr.dipole_e) +
                   bdot(field_coefficient(m, ms.volume, {Field::B, part}, x0, 0.0), tr.dipole_m);
        };
        const cplx absorb = atom.coupling * coupling(Part::Plus) * window_factor(gap - m.omega, window);
        const cplx emit = atom.coupling * coupling(Part::Minus) * window_factor(gap + m.omega, window);
        return std::pair{absorb, emit};
    });
}

/// g [Â(x₀,t)·d_r0 e^{iΔ_r t}]_{t0}^{t1}: the boundary term separating the current and dipole routes.
inline DetectionOperator detection_surface_term(const ModeSet& ms, const FockSpace& space, const AtomSpec& atom,
                                                const std::string& label, const TimeWindow& window, bool rwa) {
    const Transition& tr = atom.transition(label);
    const double gap = atom.gap(label);
    const auto edge = [&](double nu) {
        return std::exp(cplx{0.0, nu * window.t1}) - std::exp(cplx{0.0, nu * window.t0});
    };
    return detail::assemble_detection(ms, space, label, window, rwa, [&](const Mode& m) {
        const cplx absorb = atom.coupling *
                            bdot(field_coefficient(m, ms.volume, {Field::A, Part::Plus}, atom.position, 0.0),
                                 tr.dipole_e) *
                            edge(gap - m.omega);
        const cplx emit = atom.coupling *
                          bdot(field_coefficient(m, ms.volume, {Field::A, Part::Minus}, atom.position, 0.0),
                               tr.dipole_e) *
                          edge(gap + m.omega);
        return std::pair{absorb, emit};
    });
}

/// Interaction-picture H_int(t) = −g Σ_r [ (Ê·d_r0 + B̂·m_r0)(x₀,t) ⊗ |r⟩⟨0| e^{iΔ_r t} + h.c. ]
/// on photons ⊗ one atom. Time-independent pieces are assembled once; operator() is cheap.
class InteractionHamiltonian {
public:
    InteractionHamiltonian(const ModeSet& ms, const FockSpace& joint, const AtomSpec& atom) : space_(joint) {
        detail::check_mode_count(ms, joint);
        if (joint.num_atoms() != 1 || joint.atom_dim(0) != atom.dimension())
            throw ConfigError("joint space must carry exactly one atom factor of dimension " +
                              std::to_string(atom.dimension()));
        const Vec3& x0 = atom.position;
        for (std::size_t r = 0; r < atom.levels.size(); ++r) {
            const Transition& tr = atom.levels[r];
            const Matrix raise =
                embed_atom_op(joint, 0, transition_matrix(atom.dimension(), static_cast<int>(r) + 1, 0)).matrix;
            for (std::size_t mu = 0; mu < ms.size(); ++mu) {
                const Mode& m = ms[mu];
                const auto coupling = [&](Part part) {
                    return bdot(field_coefficient(m, ms.volume, {Field::E, part}, x0, 0.0), tr.dipole_e) +
                           bdot(field_coefficient(m, ms.volume, {Field::B, part}, x0, 0.0), tr.dipole_m);
                };
                const Matrix a = annihilation_op(joint, mu).matrix;
                const double gap = tr.energy - atom.ground_energy;
                terms_.push_back({-atom.coupling * coupling(Part::Plus), gap - m.omega, a * raise});
                terms_.push_back({-atom.coupling * coupling(Part::Minus), gap + m.omega, a.adjoint() * raise});
            }
        }
    }

    const FockSpace& space() const noexcept { return space_; }

    /// Frequencies present in H(t); used to size quadrature panels.
    double max_frequency() const {
        double w = 0.0;
        for (const auto& t : terms_) w = std::max(w, std::abs(t.frequency));
        return w;
    }

    Matrix matrix(double t) const {
        const auto n = static_cast<Eigen::Index>(space_.dimension());
        Matrix h = Matrix::Zero(n, n);
        for (const auto& term : terms_) {
            const cplx c = term.amplitude * std::exp(cplx{0.0, term.frequency * t});
            h += c * term.op;
        }
        Matrix herm = h + h.adjoint();
        return herm;
    }

    QOperator operator()(double t) const { return {space_, matrix(t)}; }

    /// Σ_i w_i H(t_i), summing the scalar time factors before touching any matrix.
    Matrix weighted_sum(const std::vector<double>& times, const std::vector<double>& weights) const {
        if (times.size() != weights.size()) throw ShapeError("one weight per time node required");
        const auto n = static_cast<Eigen::Index>(space_.dimension());
        Matrix h = Matrix::Zero(n, n);
        for (const auto& term : terms_) {
            cplx c = 0.0;
            for (std::size_t i = 0; i < times.size(); ++i)
                c += weights[i] * std::exp(cplx{0.0, term.frequency * times[i]});
            h += (term.amplitude * c) * term.op;
        }
        Matrix herm = h + h.adjoint();
        return herm;
    }

private:
    struct Term {
        cplx amplitude;
        double frequency;
        Matrix op;
    };
    FockSpace space_;
    std::vector<Term> terms_;
};

inline QOperator interaction_hamiltonian(const ModeSet& ms, const FockSpace& joint, const AtomSpec& atom, double t) {
    return InteractionHamiltonian(ms, joint, atom)(t);
}

} // namespace photon_detect
