#pragma once

// Indirect measurement: object ⊗ apparatus unitary followed by a projective
// meter readout on the apparatus. Provides the exact channel (with a
// time-ordered propagator), the first-order Dyson estimate, and the fast path
// through a detection operator.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "photon_detect/atom_detector.hpp"
#include "photon_detect/errors.hpp"
#include "photon_detect/fock.hpp"

namespace photon_detect {

struct Meter {
    std::vector<QOperator> projectors;
    std::vector<double> values;
};

inline Meter make_meter(std::vector<QOperator> projectors, std::vector<double> values) {
    if (projectors.empty() || projectors.size() != values.size())
        throw ConfigError("meter needs one value per projector");
    const FockSpace& s = projectors.front().space;
    QOperator sum = QOperator::zero(s);
    for (std::size_t r = 0; r < projectors.size(); ++r) {
        const QOperator& p = projectors[r];
        if (!p.is_hermitian()) throw DomainError("meter projector " + std::to_string(r) + " is not Hermitian");
        for (std::size_t q = 0; q < projectors.size(); ++q) {
            const Matrix expected = (q == r) ? p.matrix : Matrix::Zero(p.matrix.rows(), p.matrix.cols());
            if (max_abs(p.matrix * projectors[q].matrix - expected) > tol::hermitian)
                throw DomainError("meter projectors are not orthogonal idempotents");
        }
        sum += p;
    }
    if (max_abs(sum.matrix - QOperator::identity(s).matrix) > tol::hermitian)
        throw DomainError("meter projectors do not sum to the identity");
    return {std::move(projectors), std::move(values)};
}

/// {|r⟩⟨r|} on a single-atom apparatus, labelled by level index.
inline Meter level_meter(const FockSpace& apparatus) {
    if (apparatus.num_modes() != 0 || apparatus.num_atoms() != 1)
        throw ConfigError("level meter expects a single-atom apparatus space");
    std::vector<QOperator> ps;
    std::vector<double> vals;
    const int d = apparatus.atom_dim(0);
    for (int r = 0; r < d; ++r) {
        ps.emplace_back(apparatus, transition_matrix(d, r, r));
        vals.push_back(r);
    }
    return make_meter(std::move(ps), std::move(vals));
}

inline QState ground_state(const FockSpace& apparatus) { return QState::basis(apparatus, 0); }

/// Photon-space vacuum state.
inline QState vacuum_state(const FockSpace& photons) { return QState::basis(photons.photon_space(), 0); }

struct MeasurementOutcome {
    double probability = 0.0;
    QState post_state;
};

/// 𝒯 exp(−i ∫ H_int dt) as an ordered product of midpoint step exponentials, later times on the left.
inline QOperator exact_propagator(const ModeSet& ms, const FockSpace& joint, const AtomSpec& atom,
                                  const TimeWindow& window, int steps) {
    if (steps < 1) throw ConfigError("propagator needs at least one step");
    const InteractionHamiltonian hamiltonian(ms, joint, atom);
    const auto n = static_cast<Eigen::Index>(joint.dimension());
    const double dt = window.length() / steps;
    Matrix u = Matrix::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    for (int s = 0; s < steps; ++s) {
        const Matrix h = hamiltonian.matrix(window.t0 + (s + 0.5) * dt);
        if (!h.allFinite()) throw NumericError("non-finite interaction Hamiltonian entries");
        es.compute(h);
        const Eigen::VectorXcd phases =
            (es.eigenvalues().cast<cplx>() * cplx{0.0, -dt}).array().exp().matrix();
        u = (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint()) * u;
    }
    return {joint, std::move(u)};
}

namespace detail {
inline Matrix lift_apparatus(const QOperator& projector, const FockSpace& joint) {
    if (projector.space.num_modes() != 0 || projector.space.atom_dims() != joint.atom_dims())
        throw ShapeError("projector does not act on the apparatus factor of the joint space");
    const auto nh = static_cast<Eigen::Index>(joint.photon_dimension());
    return kron(Matrix::Identity(nh, nh), projector.matrix);
}

inline Matrix evolve(const QOperator& u, const QState& rho, const QState& sigma) {
    const QState joint = tensor(rho, sigma);
    u.check_same(joint.as_operator());
    return u.matrix * joint.density() * u.matrix.adjoint();
}

inline double checked_probability(cplx p) {
    if (std::abs(p.imag()) > 1e-9) throw NumericError("probability has imaginary part " + std::to_string(p.imag()));
    if (!std::isfinite(p.real())) throw NumericError("probability is not finite");
    return p.real();
}
} // namespace detail

/// p_r = Tr( P_r U (ρ⊗σ) U† ), clipped to [0, 1].
inline double born_probability(const QOperator& projector, const QOperator& u, const QState& rho,
                               const QState& sigma) {
    const Matrix evolved = detail::evolve(u, rho, sigma);
    const Matrix p_full = detail::lift_apparatus(projector, u.space);
    const double p = detail::checked_probability((p_full.transpose().cwiseProduct(evolved)).sum());
    if (p < -1e-9 || p > 1.0 + 1e-9) throw NumericError("Born probability outside [0,1]: " + std::to_string(p));
    return std::clamp(p, 0.0, 1.0);
}

/// T_r(ρ) = Tr_𝒦( P_r U (ρ⊗σ) U† ) / p_r.
inline MeasurementOutcome post_measurement_state(const QOperator& projector, const QOperator& u, const QState& rho,
                                                 const QState& sigma) {
    const Matrix evolved = detail::evolve(u, rho, sigma);
    const Matrix p_full = detail::lift_apparatus(projector, u.space);
    // P X P has the same partial trace as P X and stays Hermitian to roundoff.
    const QOperator selected(u.space, p_full * evolved * p_full);
    const double p = detail::checked_probability(selected.matrix.trace());
    if (p <= 1e-12) throw OutcomeImpossible(p);
    QOperator reduced = partial_trace_apparatus(selected);
    return {std::clamp(p, 0.0, 1.0), QState::from_density(reduced.space, reduced.matrix / p)};
}

namespace detail {
/// ∫ H_int dt over the window by composite 20-point Gauss–Legendre on `panels` panels.
inline Matrix integrate_hamiltonian(const InteractionHamiltonian& h, const TimeWindow& w, int panels) {
    using rule = boost::math::quadrature::gauss<double, 20>;
    std::vector<double> times, weights;
    const double width = w.length() / panels;
    const double half = 0.5 * width;
    for (int p = 0; p < panels; ++p) {
        const double mid = w.t0 + (p + 0.5) * width;
        for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
            const double x = rule::abscissa()[i];
            const double wt = rule::weights()[i] * half;
            times.push_back(mid - half * x);
            weights.push_back(wt);
            if (x != 0.0) {
                times.push_back(mid + half * x);
                weights.push_back(wt);
            }
        }
    }
    return h.weighted_sum(times, weights);
}
} // namespace detail

/// First-order estimate Tr( P_r K (ρ⊗σ) K† ), K = ∫ H_int dt.
/// `panels` = 0 picks about one panel per π of phase at the fastest frequency.
inline double dyson_first_order_prob(const ModeSet& ms, const FockSpace& joint, const AtomSpec& atom,
                                     const TimeWindow& window, const QOperator& projector, const QState& rho,
                                     const QState& sigma, int panels = 0) {
    if (std::abs(trace_product(projector, sigma)) > 1e-12)
        throw DomainError("first-order estimate needs a projector orthogonal to the apparatus state");
    const InteractionHamiltonian h(ms, joint, atom);
    if (panels <= 0)
        panels = 1 + static_cast<int>(std::ceil(window.length() * h.max_frequency() / M_PI));
    const QState joint_state = tensor(rho, sigma);
    const Matrix p_full = detail::lift_apparatus(projector, joint);
    const auto estimate = [&](int n) {
        const Matrix k = detail::integrate_hamiltonian(h, window, n);
        const Matrix x = k * joint_state.density() * k.adjoint();
        return detail::checked_probability((p_full.transpose().cwiseProduct(x)).sum());
    };
    const double coarse = estimate(panels);
    const double fine = estimate(2 * panels);
    if (std::abs(fine - coarse) > 1e-8 * std::abs(fine))
        throw NumericError("first-order quadrature did not converge (" + std::to_string(coarse) + " vs " +
                           std::to_string(fine) + ")");
    return fine;
}

/// Tr(D†D ρ). Values within 1e-12 below zero are clipped; above 1 they are reported raw.
inline double detect_prob(const DetectionOperator& d, const QState& rho) {
    d.op.check_same(rho.as_operator());
    const Matrix x = d.op.matrix * rho.density() * d.op.matrix.adjoint();
    const double p = detail::checked_probability(x.trace());
    if (p < -1e-12) throw NumericError("negative detection probability " + std::to_string(p));
    return std::max(p, 0.0);
}

/// DρD† / Tr(DρD†).
inline QState detect_post(const DetectionOperator& d, const QState& rho) {
    d.op.check_same(rho.as_operator());
    const Matrix x = d.op.matrix * rho.density() * d.op.matrix.adjoint();
    const double p = detail::checked_probability(x.trace());
    if (p <= 1e-15) throw OutcomeImpossible(p);
    return QState::from_density(rho.space(), x / p);
}

} // namespace photon_detect
