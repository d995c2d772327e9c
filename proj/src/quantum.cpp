#include "tlsscope/quantum.hpp"

#include <cmath>
#include <string>

#include "tlsscope/errors.hpp"

namespace tlsscope {

namespace {

constexpr double kHermitianFlagTol = 1e-12;

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

Operator::Operator(Matrix entries, bool hermitian) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
        throw ShapeError("operator must be square with dim >= 1, got " +
                         std::to_string(entries_.rows()) + "x" + std::to_string(entries_.cols()));
    }
    if (hermitian && hermiticity_error() > kHermitianFlagTol) {
        throw ContractError("operator flagged Hermitian deviates by " +
                            std::to_string(hermiticity_error()));
    }
}

Operator Operator::identity(int dim) { return Operator(Matrix::Identity(dim, dim), true); }

Operator Operator::zero(int dim) { return Operator(Matrix::Zero(dim, dim), true); }

Operator Operator::diagonal(const std::initializer_list<Complex>& entries) {
    Vector d(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index i = 0;
    for (const auto& e : entries) d(i++) = e;
    return Operator(Matrix(d.asDiagonal()));
}

Operator Operator::adjoint() const { return Operator(entries_.adjoint()); }

double Operator::hermiticity_error() const { return max_abs(entries_ - entries_.adjoint()); }

Operator operator+(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw ShapeError("operator sum dimension mismatch");
    return Operator(a.entries_ + b.entries_);
}

Operator operator-(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw ShapeError("operator difference dimension mismatch");
    return Operator(a.entries_ - b.entries_);
}

Operator operator*(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw ShapeError("operator product dimension mismatch");
    return Operator(a.entries_ * b.entries_);
}

Operator operator*(Complex s, const Operator& a) { return Operator(s * a.entries_); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

double max_abs_difference(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw ShapeError("operator comparison dimension mismatch");
    return max_abs(a.matrix() - b.matrix());
}

LadderOps ladder_ops(int n_levels) {
    if (n_levels < 2 || n_levels > kMaxQubitLevels) {
        throw DimensionError("ladder_ops: n_levels must be in [2, 10], got " +
                             std::to_string(n_levels));
    }
    Matrix b = Matrix::Zero(n_levels, n_levels);
    for (int k = 0; k + 1 < n_levels; ++k) b(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
    Matrix bd = b.adjoint();
    return {Operator(std::move(b)), Operator(std::move(bd))};
}

PauliOps pauli_ops() {
    const Complex i{0.0, 1.0};
    Matrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -i, i, 0;
    z << 1, 0, 0, -1;
    Matrix plus = 0.5 * (x + i * y);
    Matrix minus = 0.5 * (x - i * y);
    return {Operator(x, true), Operator(y, true), Operator(z, true), Operator(plus),
            Operator(minus)};
}

Operator tensor(const Operator& a, const Operator& b) {
    const int da = a.dim();
    const int db = b.dim();
    Matrix out(da * db, da * db);
    for (int i = 0; i < da; ++i) {
        for (int j = 0; j < da; ++j) {
            out.block(i * db, j * db, db, db) = a(i, j) * b.matrix();
        }
    }
    return Operator(std::move(out));
}

StateVector::StateVector(Vector amplitudes, double norm_tol) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() < 1) throw DimensionError("state vector must have dim >= 1");
    const double n = amplitudes_.norm();
    if (std::abs(n - 1.0) > norm_tol) {
        throw ContractError("state vector norm " + std::to_string(n) + " is not 1");
    }
}

StateVector StateVector::basis(int dim, int index) {
    if (index < 0 || index >= dim) throw DimensionError("basis index out of range");
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return StateVector(std::move(v));
}

Complex StateVector::inner(const StateVector& other) const {
    if (dim() != other.dim()) throw ShapeError("inner product dimension mismatch");
    return amplitudes_.dot(other.amplitudes_);
}

Operator StateVector::projector() const {
    return Operator(amplitudes_ * amplitudes_.adjoint(), false);
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    Vector out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i) out.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
    return StateVector(std::move(out));
}

RotatingEigenstates ket_rotating_eigenstates(int n_levels) {
    if (n_levels < 2) throw DimensionError("rotating eigenstates need at least 2 levels");
    const double s = 1.0 / std::sqrt(2.0);
    Vector minus = Vector::Zero(n_levels);
    Vector plus = Vector::Zero(n_levels);
    minus(0) = s;
    minus(1) = Complex(0.0, -s);
    plus(0) = s;
    plus(1) = Complex(0.0, s);
    return {StateVector(std::move(minus)), StateVector(std::move(plus))};
}

DensityMatrix::DensityMatrix(Matrix entries, const DensityTolerances& tol)
    : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
        throw ShapeError("density matrix must be square");
    }
    const Complex tr = entries_.trace();
    if (std::abs(tr - 1.0) > tol.trace) {
        throw InstabilityError("density matrix trace deviates from 1 by " +
                               std::to_string(std::abs(tr - 1.0)));
    }
    const double herm = hermiticity_error();
    if (herm > tol.hermitian) {
        throw InstabilityError("density matrix non-Hermitian by " + std::to_string(herm));
    }
    const double lo = min_eigenvalue();
    if (lo < tol.min_eigenvalue) {
        throw InstabilityError("density matrix eigenvalue " + std::to_string(lo) +
                               " is below positivity tolerance");
    }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::min_eigenvalue() const {
    const Matrix herm = 0.5 * (entries_ + entries_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double DensityMatrix::hermiticity_error() const { return max_abs(entries_ - entries_.adjoint()); }

Complex DensityMatrix::expectation(const Operator& op) const {
    if (op.dim() != dim()) throw ShapeError("expectation dimension mismatch");
    return (op.matrix() * entries_).trace();
}

void HilbertSpec::validate() const {
    if (qubit_levels < 2 || qubit_levels > kMaxQubitLevels) {
        throw DimensionError("qubit_levels must be in [2, 10], got " +
                             std::to_string(qubit_levels));
    }
}

}  // namespace tlsscope
