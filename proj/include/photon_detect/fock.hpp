#pragma once

// Truncated multimode Fock spaces, optionally tensored with finite-level
// atom factors, and dense complex operators/states on them.
//
// Basis ordering is mode-major: photon mode 0 is the slowest-varying factor,
// the last photon mode comes next-to-last, and atom factors are appended after
// all photon modes. A basis index is therefore
//
//   ((n_0 * (c_1 + 1) + n_1) * ... ) * A + a
//
// where c_i are the cutoffs and (A, a) the combined atom dimension and index.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "photon_detect/errors.hpp"

namespace photon_detect {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double positivity = -1e-10;
} // namespace tol

class FockSpace {
public:
    FockSpace() = default;

    FockSpace(std::vector<int> cutoffs, std::vector<int> atom_dims)
        : cutoffs_(std::move(cutoffs)), atom_dims_(std::move(atom_dims)) {
        for (int c : cutoffs_)
            if (c < 1) throw ConfigError("photon cutoff must be >= 1, got " + std::to_string(c));
        for (int d : atom_dims_)
            if (d < 1) throw ConfigError("atom dimension must be >= 1, got " + std::to_string(d));
        dims_.reserve(cutoffs_.size() + atom_dims_.size());
        for (int c : cutoffs_) dims_.push_back(static_cast<std::size_t>(c) + 1);
        for (int d : atom_dims_) dims_.push_back(static_cast<std::size_t>(d));
        strides_.assign(dims_.size(), 1);
        for (std::size_t f = dims_.size(); f-- > 1;) strides_[f - 1] = strides_[f] * dims_[f];
        dimension_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>{});
    }

    std::size_t num_modes() const noexcept { return cutoffs_.size(); }
    std::size_t num_atoms() const noexcept { return atom_dims_.size(); }
    int cutoff(std::size_t mode) const { return cutoffs_.at(mode); }
    int atom_dim(std::size_t atom) const { return atom_dims_.at(atom); }
    const std::vector<int>& cutoffs() const noexcept { return cutoffs_; }
    const std::vector<int>& atom_dims() const noexcept { return atom_dims_; }

    std::size_t dimension() const noexcept { return dimension_; }

    std::size_t photon_dimension() const noexcept {
        std::size_t d = 1;
        for (int c : cutoffs_) d *= static_cast<std::size_t>(c) + 1;
        return d;
    }
    std::size_t apparatus_dimension() const noexcept { return dimension_ / photon_dimension(); }

    // Factors are photon modes followed by atoms.
    std::size_t factor_count() const noexcept { return dims_.size(); }
    std::size_t factor_dim(std::size_t f) const { return dims_.at(f); }
    std::size_t stride(std::size_t f) const { return strides_.at(f); }

    std::size_t local_index(std::size_t index, std::size_t f) const {
        return (index / strides_.at(f)) % dims_[f];
    }
    int occupation(std::size_t index, std::size_t mode) const {
        return static_cast<int>(local_index(index, mode));
    }
    int atom_level(std::size_t index, std::size_t atom) const {
        return static_cast<int>(local_index(index, num_modes() + atom));
    }
    int total_photons(std::size_t index) const {
        int n = 0;
        for (std::size_t m = 0; m < num_modes(); ++m) n += occupation(index, m);
        return n;
    }
    /// True when every mode sits strictly below its cutoff, where [a, a†] = 1 holds exactly.
    bool below_cutoff(std::size_t index) const {
        for (std::size_t m = 0; m < num_modes(); ++m)
            if (occupation(index, m) >= cutoffs_[m]) return false;
        return true;
    }

    /// Index of the basis state with the given photon occupations and atom levels.
    std::size_t index_of(const std::vector<int>& occupations, const std::vector<int>& levels = {}) const {
        if (occupations.size() != num_modes() || (levels.size() != num_atoms() && !levels.empty()))
            throw ShapeError("basis label length does not match the space");
        std::size_t idx = 0;
        for (std::size_t m = 0; m < num_modes(); ++m) {
            if (occupations[m] < 0 || occupations[m] > cutoffs_[m])
                throw IndexError("occupation out of range for mode " + std::to_string(m));
            idx += static_cast<std::size_t>(occupations[m]) * strides_[m];
        }
        for (std::size_t a = 0; a < levels.size(); ++a) {
            if (levels[a] < 0 || levels[a] >= atom_dims_[a])
                throw IndexError("level out of range for atom " + std::to_string(a));
            idx += static_cast<std::size_t>(levels[a]) * strides_[num_modes() + a];
        }
        return idx;
    }

    FockSpace photon_space() const { return FockSpace(cutoffs_, {}); }
    FockSpace apparatus_space() const { return FockSpace({}, atom_dims_); }

    friend bool operator==(const FockSpace& a, const FockSpace& b) {
        return a.cutoffs_ == b.cutoffs_ && a.atom_dims_ == b.atom_dims_;
    }

private:
    std::vector<int> cutoffs_;
    std::vector<int> atom_dims_;
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> strides_;
    std::size_t dimension_ = 1;
};

inline FockSpace make_space(std::vector<int> cutoffs, std::vector<int> atom_dims = {}) {
    if (cutoffs.empty()) throw ConfigError("a Fock space needs at least one photon mode");
    return FockSpace(std::move(cutoffs), std::move(atom_dims));
}

/// Apparatus-only space (no photon modes), the home of meter projectors and σ.
inline FockSpace make_apparatus_space(std::vector<int> atom_dims) {
    if (atom_dims.empty()) throw ConfigError("an apparatus space needs at least one atom factor");
    return FockSpace({}, std::move(atom_dims));
}

/// ℋ ⊗ 𝒦 from a photon-only and an apparatus-only space.
inline FockSpace joint_space(const FockSpace& photons, const FockSpace& apparatus) {
    if (photons.num_atoms() != 0 || apparatus.num_modes() != 0)
        throw ShapeError("joint_space expects a photon-only and an apparatus-only space");
    return FockSpace(photons.cutoffs(), apparatus.atom_dims());
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

struct QOperator {
    FockSpace space;
    Matrix matrix;

    QOperator() = default;
    QOperator(FockSpace s, Matrix m) : space(std::move(s)), matrix(std::move(m)) {
        const auto n = static_cast<Eigen::Index>(space.dimension());
        if (matrix.rows() != n || matrix.cols() != n)
            throw ShapeError("operator matrix is " + std::to_string(matrix.rows()) + "x" +
                             std::to_string(matrix.cols()) + ", space dimension is " + std::to_string(n));
    }

    static QOperator identity(const FockSpace& s) {
        const auto n = static_cast<Eigen::Index>(s.dimension());
        return {s, Matrix::Identity(n, n)};
    }
    static QOperator zero(const FockSpace& s) {
        const auto n = static_cast<Eigen::Index>(s.dimension());
        return {s, Matrix::Zero(n, n)};
    }

    QOperator adjoint() const { return {space, matrix.adjoint()}; }

    bool is_hermitian(double tolerance = tol::hermitian) const {
        return max_abs(matrix - matrix.adjoint()) <= tolerance;
    }

    QOperator& operator+=(const QOperator& o) {
        check_same(o);
        matrix += o.matrix;
        return *this;
    }
    QOperator& operator-=(const QOperator& o) {
        check_same(o);
        matrix -= o.matrix;
        return *this;
    }
    QOperator& operator*=(cplx s) {
        matrix *= s;
        return *this;
    }

    friend QOperator operator+(QOperator a, const QOperator& b) { return a += b; }
    friend QOperator operator-(QOperator a, const QOperator& b) { return a -= b; }
    friend QOperator operator*(cplx s, QOperator a) { return a *= s; }
    friend QOperator operator*(const QOperator& a, const QOperator& b) {
        a.check_same(b);
        return {a.space, a.matrix * b.matrix};
    }
    friend Vector operator*(const QOperator& a, const Vector& v) {
        if (v.size() != a.matrix.cols()) throw ShapeError("vector length does not match operator");
        return a.matrix * v;
    }

    void check_same(const QOperator& o) const {
        if (!(space == o.space)) throw ShapeError("operators act on different spaces");
    }
};

/// Density matrix with validated Hermiticity, unit trace and positivity.
class QState {
public:
    static QState from_density(FockSpace space, Matrix density) {
        QOperator op(std::move(space), std::move(density));
        if (!op.is_hermitian()) throw DomainError("density matrix is not Hermitian");
        const cplx tr = op.matrix.trace();
        if (std::abs(tr - cplx{1.0, 0.0}) > tol::trace)
            throw DomainError("density matrix trace is " + std::to_string(tr.real()));
        Eigen::SelfAdjointEigenSolver<Matrix> es(op.matrix, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < tol::positivity)
            throw DomainError("density matrix has a negative eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
        return QState(std::move(op));
    }

    /// |ψ⟩⟨ψ| with ψ normalized here.
    static QState pure(FockSpace space, const Vector& psi) {
        if (psi.size() != static_cast<Eigen::Index>(space.dimension()))
            throw ShapeError("state vector length does not match space dimension");
        const double norm = psi.norm();
        if (!(norm > 0.0)) throw DomainError("cannot normalize a zero state vector");
        const Vector v = psi / norm;
        return QState(QOperator(std::move(space), v * v.adjoint()));
    }

    static QState basis(FockSpace space, std::size_t index) {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return pure(std::move(space), v);
    }

    const FockSpace& space() const noexcept { return op_.space; }
    const Matrix& density() const noexcept { return op_.matrix; }
    const QOperator& as_operator() const noexcept { return op_; }

    double purity() const { return (op_.matrix * op_.matrix).trace().real(); }

private:
    explicit QState(QOperator op) : op_(std::move(op)) {}
    QOperator op_;
};

/// ρ ⊗ σ on the joint space; ρ must be photon-only and σ apparatus-only.
inline QState tensor(const QState& rho, const QState& sigma) {
    return QState::from_density(joint_space(rho.space(), sigma.space()), kron(rho.density(), sigma.density()));
}

namespace detail {
inline QOperator embed_factor(const FockSpace& space, std::size_t factor, const Matrix& local) {
    const auto d = static_cast<Eigen::Index>(space.factor_dim(factor));
    if (local.rows() != d || local.cols() != d)
        throw ShapeError("local matrix is " + std::to_string(local.rows()) + "x" + std::to_string(local.cols()) +
                         ", factor dimension is " + std::to_string(d));
    const auto left = static_cast<Eigen::Index>(space.dimension() / (space.stride(factor) * space.factor_dim(factor)));
    const auto right = static_cast<Eigen::Index>(space.stride(factor));
    Matrix m = kron(kron(Matrix::Identity(left, left), local), Matrix::Identity(right, right));
    return {space, std::move(m)};
}
} // namespace detail

/// Single-mode ladder matrix on {|0⟩..|cutoff⟩}: a|n⟩ = √n |n−1⟩.
inline Matrix ladder_matrix(int cutoff) {
    Matrix a = Matrix::Zero(cutoff + 1, cutoff + 1);
    for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline QOperator annihilation_op(const FockSpace& space, std::size_t mode) {
    if (mode >= space.num_modes())
        throw IndexError("mode " + std::to_string(mode) + " out of range (" + std::to_string(space.num_modes()) +
                         " modes)");
    return detail::embed_factor(space, mode, ladder_matrix(space.cutoff(mode)));
}

inline QOperator creation_op(const FockSpace& space, std::size_t mode) {
    return annihilation_op(space, mode).adjoint();
}

inline QOperator embed_atom_op(const FockSpace& space, std::size_t atom, const Matrix& local) {
    if (atom >= space.num_atoms())
        throw IndexError("atom " + std::to_string(atom) + " out of range (" + std::to_string(space.num_atoms()) +
                         " atoms)");
    return detail::embed_factor(space, space.num_modes() + atom, local);
}

/// |to⟩⟨from| on a d-level system.
inline Matrix transition_matrix(int dim, int to, int from) {
    Matrix m = Matrix::Zero(dim, dim);
    m(to, from) = 1.0;
    return m;
}

/// Tr over every atom factor; the result acts on the photon space.
inline QOperator partial_trace_apparatus(const QOperator& op) {
    const FockSpace& s = op.space;
    if (s.num_atoms() == 0) throw ConfigError("partial trace needs at least one apparatus factor");
    const auto nh = static_cast<Eigen::Index>(s.photon_dimension());
    const auto nk = static_cast<Eigen::Index>(s.apparatus_dimension());
    Matrix out = Matrix::Zero(nh, nh);
    for (Eigen::Index i = 0; i < nh; ++i)
        for (Eigen::Index j = 0; j < nh; ++j) {
            cplx acc = 0.0;
            for (Eigen::Index a = 0; a < nk; ++a) acc += op.matrix(i * nk + a, j * nk + a);
            out(i, j) = acc;
        }
    return {s.photon_space(), std::move(out)};
}

/// Tr(a·b) without forming the product.
inline cplx trace_product(const QOperator& a, const QOperator& b) {
    a.check_same(b);
    return (a.matrix.transpose().cwiseProduct(b.matrix)).sum();
}

inline cplx trace_product(const QOperator& a, const QState& rho) { return trace_product(a, rho.as_operator()); }

} // namespace photon_detect
