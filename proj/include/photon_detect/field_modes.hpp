#pragma once

// Box-quantized plane-wave modes and the A, E, B field operators built from
// them. Natural units ħ = c = ε₀ = 1; each mode is normalized by 1/√(2ωV).
//
// Coefficient of â_μ in the positive-frequency parts:
//   A⁺ : ε e^{i(k·x − ωt)} / √(2ωV)
//   E⁺ : iω A⁺
//   B⁺ : i (k × ε) e^{i(k·x − ωt)} / √(2ωV)
// The negative-frequency parts carry the complex conjugates on â†_μ.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "photon_detect/errors.hpp"
#include "photon_detect/fock.hpp"

namespace photon_detect {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

namespace tol {
inline constexpr double mode_geometry = 1e-14;
} // namespace tol

/// a × b without conjugation (Eigen's cross() conjugates complex results).
inline CVec3 cross(const CVec3& a, const CVec3& b) {
    return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}

/// (ε₁, ε₂) with ε₁ = ẑ×k̂ normalized (x̂ when k ∥ ẑ) and ε₂ = k̂ × ε₁.
inline std::pair<Vec3, Vec3> polarization_basis(const Vec3& k) {
    const double kn = k.norm();
    if (!(kn > 0.0) || !std::isfinite(kn)) throw DomainError("polarization basis needs a nonzero finite wavevector");
    const Vec3 khat = k / kn;
    Vec3 e1 = Vec3::UnitZ().cross(khat);
    // ẑ×k̂ vanishes (to roundoff) exactly when k is along ±ẑ.
    if (e1.norm() < 1e-12)
        e1 = Vec3::UnitX();
    else
        e1.normalize();
    const Vec3 e2 = khat.cross(e1);
    return {e1, e2};
}

struct Mode {
    Vec3 k;
    int s = 1;
    CVec3 eps;
    double omega = 0.0;
};

inline void validate_mode(const Mode& m) {
    if (m.s != 1 && m.s != 2) throw DomainError("polarization index must be 1 or 2");
    const double kn = m.k.norm();
    if (!(kn > 0.0) || !std::isfinite(kn)) throw DomainError("mode wavevector must be nonzero and finite");
    if (std::abs(m.eps.norm() - 1.0) > tol::mode_geometry) throw DomainError("polarization vector is not unit");
    if (std::abs(m.k.cast<cplx>().dot(m.eps)) > tol::mode_geometry * std::max(1.0, kn))
        throw DomainError("polarization vector is not transverse to k");
    if (std::abs(m.omega - kn) > tol::mode_geometry * std::max(1.0, kn)) throw DomainError("omega must equal |k|");
}

/// Mode using the fixed polarization convention.
inline Mode make_mode(const Vec3& k, int s) {
    if (s != 1 && s != 2) throw DomainError("polarization index must be 1 or 2");
    const auto [e1, e2] = polarization_basis(k);
    Mode m{k, s, (s == 1 ? e1 : e2).cast<cplx>(), k.norm()};
    validate_mode(m);
    return m;
}

/// Mode with an explicitly chosen transverse unit polarization.
inline Mode make_mode(const Vec3& k, int s, const CVec3& eps) {
    Mode m{k, s, eps, k.norm()};
    validate_mode(m);
    return m;
}

struct ModeSet {
    std::vector<Mode> modes;
    double volume = 1.0;

    std::size_t size() const noexcept { return modes.size(); }
    const Mode& operator[](std::size_t i) const { return modes.at(i); }
};

inline ModeSet make_mode_set(std::vector<Mode> modes, double volume) {
    if (!(volume > 0.0) || !std::isfinite(volume)) throw ConfigError("mode volume must be positive and finite");
    if (modes.empty()) throw ConfigError("mode set is empty");
    for (const auto& m : modes) validate_mode(m);
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = i + 1; j < modes.size(); ++j) {
            if (modes[i].k != modes[j].k) continue;
            if (modes[i].s == modes[j].s) throw ConfigError("duplicate mode (k, s)");
            if (std::abs(modes[i].eps.dot(modes[j].eps)) > tol::mode_geometry)
                throw ConfigError("polarizations sharing a wavevector are not orthogonal");
        }
    return ModeSet{std::move(modes), volume};
}

enum class Field { A, E, B };
enum class Part { Plus, Minus, Full };

struct FieldSpec {
    Field field = Field::E;
    Part part = Part::Full;
};

/// Coefficient of â_μ (Plus) or â†_μ (Minus) in the field at (x, t).
inline CVec3 field_coefficient(const Mode& mode, double volume, FieldSpec spec, const Vec3& x, double t) {
    if (spec.part == Part::Full) throw UsageError("the full field has no single mode coefficient");
    const cplx phase = std::exp(cplx{0.0, mode.k.dot(x) - mode.omega * t});
    const double norm = 1.0 / std::sqrt(2.0 * mode.omega * volume);
    const cplx i{0.0, 1.0};
    CVec3 c;
    switch (spec.field) {
    case Field::A: c = mode.eps * (phase * norm); break;
    case Field::E: c = mode.eps * (i * mode.omega * phase * norm); break;
    case Field::B: c = cross(mode.k.cast<cplx>(), mode.eps) * (i * phase * norm); break;
    }
    if (spec.part == Part::Minus) c = c.conjugate();
    return c;
}

namespace detail {
inline void check_mode_count(const ModeSet& ms, const FockSpace& space) {
    if (space.num_modes() != ms.size())
        throw ConfigError("space has " + std::to_string(space.num_modes()) + " photon modes, mode set has " +
                          std::to_string(ms.size()));
}
} // namespace detail

/// One Cartesian component of a field operator at (x, t); acts as identity on atom factors.
inline QOperator field_operator(const ModeSet& ms, const FockSpace& space, FieldSpec spec, int component,
                                const Vec3& x, double t) {
    detail::check_mode_count(ms, space);
    if (component < 0 || component > 2) throw IndexError("field component must be 0, 1 or 2");
    QOperator out = QOperator::zero(space);
    for (std::size_t mu = 0; mu < ms.size(); ++mu) {
        const cplx c = field_coefficient(ms[mu], ms.volume, {spec.field, Part::Plus}, x, t)(component);
        const QOperator a = annihilation_op(space, mu);
        if (spec.part != Part::Minus) out.matrix += c * a.matrix;
        if (spec.part != Part::Plus) out.matrix += std::conj(c) * a.matrix.adjoint();
    }
    return out;
}

/// Σ_c v_c F_c(x, t) for a complex 3-vector v (bilinear, no conjugation of v).
inline QOperator field_dot(const ModeSet& ms, const FockSpace& space, FieldSpec spec, const CVec3& v, const Vec3& x,
                           double t) {
    QOperator out = QOperator::zero(space);
    for (int c = 0; c < 3; ++c)
        if (v(c) != cplx{0.0, 0.0}) out.matrix += v(c) * field_operator(ms, space, spec, c, x, t).matrix;
    return out;
}

struct EbCommutator {
    QOperator numeric;
    cplx analytic;
};

/// [Ê_j(x,t), B̂_k(y,t)] as a matrix and as the c-number mode sum
///   Σ_μ ( E⁺_j(x) B⁺_k(y)* − E⁺_j(x)* B⁺_k(y) ),
/// the box-regularized form of i ε_jkl ∂_l δ³(x − y).
inline EbCommutator eb_commutator(const ModeSet& ms, const FockSpace& space, int j, int k, const Vec3& x,
                                  const Vec3& y, double t) {
    const QOperator e = field_operator(ms, space, {Field::E, Part::Full}, j, x, t);
    const QOperator b = field_operator(ms, space, {Field::B, Part::Full}, k, y, t);
    cplx analytic = 0.0;
    for (const auto& mode : ms.modes) {
        const cplx ej = field_coefficient(mode, ms.volume, {Field::E, Part::Plus}, x, t)(j);
        const cplx bk = field_coefficient(mode, ms.volume, {Field::B, Part::Plus}, y, t)(k);
        analytic += ej * std::conj(bk) - std::conj(ej) * bk;
    }
    return {e * b - b * e, analytic};
}

/// max |op − value·1| over matrix entries whose row and column both satisfy `keep`.
template <typename Predicate>
double restricted_deviation(const QOperator& op, cplx value, Predicate keep) {
    double worst = 0.0;
    const std::size_t n = op.space.dimension();
    for (std::size_t r = 0; r < n; ++r) {
        if (!keep(r)) continue;
        for (std::size_t c = 0; c < n; ++c) {
            if (!keep(c)) continue;
            const cplx expected = (r == c) ? value : cplx{0.0, 0.0};
            worst = std::max(worst, std::abs(op.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) -
                                             expected));
        }
    }
    return worst;
}

/// Deviation on the sub-cutoff subspace (every mode below its cutoff).
inline double sub_cutoff_deviation(const QOperator& op, cplx value) {
    return restricted_deviation(op, value, [&](std::size_t i) { return op.space.below_cutoff(i); });
}

} // namespace photon_detect
