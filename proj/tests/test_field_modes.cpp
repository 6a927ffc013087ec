#include <gtest/gtest.h>

#include <random>

#include "photon_detect/field_modes.hpp"
#include "test_support.hpp"

using namespace photon_detect;

namespace {

Vector vacuum(const FockSpace& s) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(s.dimension()));
    v(0) = 1.0;
    return v;
}

} // namespace

TEST(PolarizationBasis, FallbackAlongZ) {
    const auto [e1, e2] = polarization_basis(Vec3(0, 0, 1));
    EXPECT_EQ(e1, Vec3(1, 0, 0));
    EXPECT_EQ(e2, Vec3(0, 1, 0));
}

TEST(PolarizationBasis, AlongX) {
    // ẑ×x̂ = ŷ, then x̂×ŷ = ẑ.
    const auto [e1, e2] = polarization_basis(Vec3(1, 0, 0));
    EXPECT_LT((e1 - Vec3(0, 1, 0)).norm(), 1e-15);
    EXPECT_LT((e2 - Vec3(0, 0, 1)).norm(), 1e-15);
}

TEST(PolarizationBasis, OrthonormalTransverseForRandomK) {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 k = pd_test::random_vec(rng, 3.0);
        const auto [e1, e2] = polarization_basis(k);
        EXPECT_LT(std::abs(k.dot(e1)), 1e-14 * k.norm());
        EXPECT_LT(std::abs(k.dot(e2)), 1e-14 * k.norm());
        EXPECT_LT(std::abs(e1.dot(e2)), 1e-14);
        EXPECT_NEAR(e1.norm(), 1.0, 1e-14);
        EXPECT_NEAR(e2.norm(), 1.0, 1e-14);
    }
    const auto [a1, a2] = polarization_basis(Vec3(0, 0, -2));
    EXPECT_EQ(a1, Vec3(1, 0, 0));
    EXPECT_EQ(a2, Vec3(0, -1, 0));
}

TEST(PolarizationBasis, ZeroWavevector) { EXPECT_THROW(polarization_basis(Vec3::Zero()), DomainError); }

TEST(ModeSetTest, Validation) {
    EXPECT_THROW(make_mode(Vec3(0, 0, 1), 3), DomainError);
    EXPECT_THROW(make_mode(Vec3(0, 0, 1), 1, CVec3(0, 0, 1)), DomainError);
    EXPECT_THROW(make_mode(Vec3(0, 0, 1), 1, CVec3(2, 0, 0)), DomainError);
    const Mode m = make_mode(Vec3(0, 0, 1), 1);
    EXPECT_THROW(make_mode_set({m, m}, 1.0), ConfigError);
    EXPECT_THROW(make_mode_set({m}, -1.0), ConfigError);
    EXPECT_THROW(make_mode_set({m, make_mode(Vec3(0, 0, 1), 2, CVec3(1, 0, 0))}, 1.0), ConfigError);
    EXPECT_NO_THROW(make_mode_set({m, make_mode(Vec3(0, 0, 1), 2)}, 1.0));
}

TEST(FieldCoefficient, VectorPotentialAtOrigin) {
    const Mode m = make_mode(Vec3(0.3, -0.4, 1.2), 2);
    const double v = 2.5;
    const CVec3 a = field_coefficient(m, v, {Field::A, Part::Plus}, Vec3::Zero(), 0.0);
    EXPECT_LT((a - m.eps / std::sqrt(2.0 * m.omega * v)).norm(), 1e-15);
}

TEST(FieldCoefficient, ElectricModulus) {
    std::mt19937 rng(29);
    const Mode m = make_mode(Vec3(0.7, 0.2, -1.1), 1);
    const double v = 1.7;
    for (int trial = 0; trial < 20; ++trial) {
        const CVec3 e = field_coefficient(m, v, {Field::E, Part::Plus}, pd_test::random_vec(rng, 5.0),
                                          std::uniform_real_distribution<double>(-10, 10)(rng));
        EXPECT_NEAR(e.norm(), std::sqrt(m.omega / (2.0 * v)), 1e-14);
    }
}

TEST(FieldCoefficient, MagneticGeometry) {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const Mode m = make_mode(pd_test::random_vec(rng, 2.0), 1 + trial % 2);
        const Vec3 x = pd_test::random_vec(rng);
        const double t = 0.37 * trial;
        const CVec3 e = field_coefficient(m, 1.3, {Field::E, Part::Plus}, x, t);
        const CVec3 b = field_coefficient(m, 1.3, {Field::B, Part::Plus}, x, t);
        const CVec3 a = field_coefficient(m, 1.3, {Field::A, Part::Plus}, x, t);
        EXPECT_LT(std::abs(m.k.cast<cplx>().dot(b)), 1e-14);
        EXPECT_LT(std::abs(e.dot(b)), 1e-14);
        EXPECT_NEAR(b.norm(), e.norm(), 1e-14);
        // E⁺ = iω A⁺ and B⁺ = i k × A⁺
        EXPECT_LT((e - cplx{0, m.omega} * a).norm(), 1e-15);
        EXPECT_LT((b - cplx{0, 1} * cross(m.k.cast<cplx>(), a)).norm(), 1e-15);
        EXPECT_LT(std::abs(m.k.cast<cplx>().dot(a)), 1e-14);
        const CVec3 am = field_coefficient(m, 1.3, {Field::A, Part::Minus}, x, t);
        EXPECT_EQ(am, a.conjugate());
    }
}

TEST(FieldCoefficient, FullPartRejected) {
    EXPECT_THROW(field_coefficient(make_mode(Vec3(0, 0, 1), 1), 1.0, {Field::E, Part::Full}, Vec3::Zero(), 0.0),
                 UsageError);
}

TEST(FieldOperator, SingleModeFullElectric) {
    const ModeSet ms = make_mode_set({make_mode(Vec3(0, 0, 1.5), 1)}, 2.0);
    const FockSpace s = make_space({1});
    const Vec3 x(0.1, 0.2, 0.3);
    const QOperator e = field_operator(ms, s, {Field::E, Part::Full}, 0, x, 0.4);
    const cplx c = field_coefficient(ms[0], 2.0, {Field::E, Part::Plus}, x, 0.4)(0);
    EXPECT_EQ(e.matrix(0, 0), cplx(0));
    EXPECT_EQ(e.matrix(1, 1), cplx(0));
    EXPECT_EQ(e.matrix(0, 1), c);
    EXPECT_EQ(e.matrix(1, 0), std::conj(c));
}

TEST(FieldOperator, VacuumExpectations) {
    std::mt19937 rng(37);
    const ModeSet ms = pd_test::random_modes(rng, 3);
    const FockSpace s = make_space({1, 1, 1});
    const Vec3 x = pd_test::random_vec(rng);
    for (int c = 0; c < 3; ++c) {
        const QOperator plus = field_operator(ms, s, {Field::E, Part::Plus}, c, x, 0.9);
        EXPECT_EQ((plus * vacuum(s))(0), cplx(0));
        const QOperator full = field_operator(ms, s, {Field::E, Part::Full}, c, x, 0.9);
        // ⟨0|E²|0⟩ = Σ_μ |c_μ|²: only the E⁺E⁻ ordering survives on the vacuum.
        double expected = 0.0;
        for (const auto& m : ms.modes)
            expected += std::norm(field_coefficient(m, ms.volume, {Field::E, Part::Plus}, x, 0.9)(c));
        const Vector v = vacuum(s);
        EXPECT_NEAR(std::abs(v.dot(full.matrix * full.matrix * v) - expected), 0.0, 1e-14);
    }
}

TEST(FieldOperator, HermiticityAndAdjointness) {
    std::mt19937 rng(41);
    const ModeSet ms = pd_test::random_modes(rng, 3);
    const FockSpace s = make_space({2, 1, 1}, {2});
    for (Field f : {Field::A, Field::E, Field::B})
        for (int c = 0; c < 3; ++c) {
            const Vec3 x = pd_test::random_vec(rng);
            const QOperator full = field_operator(ms, s, {f, Part::Full}, c, x, 1.3);
            EXPECT_LE(max_abs(full.matrix - full.matrix.adjoint()), 1e-13);
            const QOperator plus = field_operator(ms, s, {f, Part::Plus}, c, x, 1.3);
            const QOperator minus = field_operator(ms, s, {f, Part::Minus}, c, x, 1.3);
            EXPECT_EQ(plus.matrix.adjoint().eval(), minus.matrix);
        }
}

TEST(FieldOperator, ModeCountMismatch) {
    const ModeSet ms = make_mode_set({make_mode(Vec3(0, 0, 1), 1)}, 1.0);
    EXPECT_THROW(field_operator(ms, make_space({1, 1}), {Field::E, Part::Full}, 0, Vec3::Zero(), 0), ConfigError);
}

TEST(EbCommutator, DiagonalComponentsVanishWithBothPolarizations) {
    // Σ_s ε_j (k×ε)_j = |k|(ε1_j ε2_j − ε2_j ε1_j) = 0.
    const ModeSet ms = make_mode_set({make_mode(Vec3(0.2, 0.5, 1), 1), make_mode(Vec3(0.2, 0.5, 1), 2)}, 1.0);
    const FockSpace s = make_space({1, 1});
    for (int j = 0; j < 3; ++j) {
        const auto c = eb_commutator(ms, s, j, j, Vec3(0.1, 0, 0), Vec3(0, 0.3, -0.2), 0.5);
        EXPECT_LT(std::abs(c.analytic), 1e-15);
        // Above the cutoff each mode's [a, a†] differs, so only the sub-cutoff block cancels.
        EXPECT_LT(sub_cutoff_deviation(c.numeric, 0.0), 1e-15);
    }
}

TEST(EbCommutator, MatchesHandDerivedModeSum) {
    // For real ε: Σ_μ (E⁺_j B⁺_k* − c.c.) = (i/V) Σ_μ ε_j (k×ε)_k sin(k·(x − y)).
    std::mt19937 rng(43);
    const ModeSet ms = pd_test::random_modes(rng, 4, 3.0);
    const FockSpace s = make_space({1, 1, 1, 1});
    const Vec3 x = pd_test::random_vec(rng), y = pd_test::random_vec(rng);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            cplx hand = 0.0;
            for (const auto& m : ms.modes) {
                const Vec3 eps = m.eps.real();
                hand += cplx{0, 1} * eps(j) * m.k.cross(eps)(k) * std::sin(m.k.dot(x - y)) / ms.volume;
            }
            const auto c = eb_commutator(ms, s, j, k, x, y, 0.0);
            EXPECT_LT(std::abs(c.analytic - hand), 1e-14);
        }
}

TEST(EbCommutator, NumericEqualsAnalyticBelowCutoffAndIsTimeIndependent) {
    std::mt19937 rng(47);
    const ModeSet ms = pd_test::random_modes(rng, 3, 1.5);
    for (int cutoff : {1, 2}) {
        const FockSpace s = make_space({cutoff, cutoff, cutoff});
        const Vec3 x = pd_test::random_vec(rng), y = pd_test::random_vec(rng);
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const auto c0 = eb_commutator(ms, s, j, k, x, y, 0.0);
                const auto c1 = eb_commutator(ms, s, j, k, x, y, 1.7);
                EXPECT_LE(sub_cutoff_deviation(c0.numeric, c0.analytic), 1e-12);
                EXPECT_LE(std::abs(c0.analytic - c1.analytic), 1e-12);
                EXPECT_LE(max_abs(c0.numeric.matrix - c1.numeric.matrix), 1e-12);
            }
    }
}

TEST(EbCommutator, TruncationEdgeDeviatesFromIdentity) {
    // At the cutoff [a, a†] = −n_max, so the full matrix is not analytic × 1.
    const ModeSet ms = make_mode_set({make_mode(Vec3(0.4, 0, 1), 1)}, 1.0);
    const FockSpace s = make_space({1});
    const auto c = eb_commutator(ms, s, 1, 0, Vec3(0.3, 0, 0), Vec3::Zero(), 0.0);
    ASSERT_GT(std::abs(c.analytic), 1e-3);
    EXPECT_NEAR(std::abs(c.numeric.matrix(1, 1) + c.analytic), 0.0, 1e-14);
}

TEST(Cross, BilinearForComplexVectors) {
    const CVec3 a(cplx(1, 2), cplx(0, -1), cplx(3, 0));
    const CVec3 b(cplx(0, 1), cplx(2, 0), cplx(-1, 1));
    // Component-wise by hand: (a_y b_z − a_z b_y, a_z b_x − a_x b_z, a_x b_y − a_y b_x)
    const CVec3 expected(cplx(0, -1) * cplx(-1, 1) - cplx(3, 0) * cplx(2, 0),
                         cplx(3, 0) * cplx(0, 1) - cplx(1, 2) * cplx(-1, 1),
                         cplx(1, 2) * cplx(2, 0) - cplx(0, -1) * cplx(0, 1));
    EXPECT_EQ(cross(a, b), expected);
}

TEST(FieldCoefficient, ComplexPolarization) {
    // Circular polarization (x̂ + iŷ)/√2 for k ∥ ẑ.
    const CVec3 eps = CVec3(cplx(1, 0), cplx(0, 1), 0) / std::sqrt(2.0);
    const Mode m = make_mode(Vec3(0, 0, 2), 1, eps);
    const CVec3 b = field_coefficient(m, 1.0, {Field::B, Part::Plus}, Vec3::Zero(), 0.0);
    // ẑ × (x̂ + iŷ) = ŷ − i x̂, times i·|k|/√(2ωV) = i·2/2
    const CVec3 expected = cplx(0, 1) * CVec3(cplx(0, -1), cplx(1, 0), 0) / std::sqrt(2.0);
    EXPECT_LT((b - expected).norm(), 1e-15);
}
