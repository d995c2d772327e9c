#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace tlsscope {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kUnitNormTol = 1e-12;
inline constexpr int kMaxQubitLevels = 10;

// Dense complex operator. Immutable after construction.
class Operator {
public:
    explicit Operator(Matrix entries, bool hermitian = false);

    static Operator identity(int dim);
    static Operator zero(int dim);
    static Operator diagonal(const std::initializer_list<Complex>& entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& matrix() const { return entries_; }
    Complex operator()(int row, int col) const { return entries_(row, col); }

    Operator adjoint() const;
    // max |M - M^dagger|
    double hermiticity_error() const;
    bool is_hermitian(double tol = kHermitianTol) const { return hermiticity_error() <= tol; }

    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(Complex s, const Operator& a);

private:
    Matrix entries_;
};

Operator commutator(const Operator& a, const Operator& b);
double max_abs_difference(const Operator& a, const Operator& b);

struct LadderOps {
    Operator annihilation;
    Operator creation;
};

// Truncated bosonic b and b^dagger on n_levels Fock states.
LadderOps ladder_ops(int n_levels);

// Two-level Pauli set. The defect basis is ordered (|e>, |g>), i.e. index 0 is
// the excited state, so sigma_z = diag(1, -1) and sigma_+ |g> = |e>.
struct PauliOps {
    Operator x;
    Operator y;
    Operator z;
    Operator plus;
    Operator minus;
};

PauliOps pauli_ops();

inline constexpr int kTlsExcited = 0;
inline constexpr int kTlsGround = 1;

// Kronecker product. Composite index = i_a * dim_b + i_b, so the first
// (qubit) factor varies slower than the second (defect) factor.
Operator tensor(const Operator& a, const Operator& b);

class StateVector {
public:
    explicit StateVector(Vector amplitudes, double norm_tol = kUnitNormTol);

    static StateVector basis(int dim, int index);

    int dim() const { return static_cast<int>(amplitudes_.size()); }
    const Vector& amplitudes() const { return amplitudes_; }
    Complex operator[](int i) const { return amplitudes_(i); }

    // <this|other>
    Complex inner(const StateVector& other) const;
    Operator projector() const;

private:
    Vector amplitudes_;
};

StateVector tensor(const StateVector& a, const StateVector& b);

struct RotatingEigenstates {
    StateVector minus;  // (|0> - i|1>)/sqrt2
    StateVector plus;   // (|0> + i|1>)/sqrt2
};

// Eigenstates of the resonant drive term on a qubit truncated to n_levels;
// amplitudes on levels >= 2 are zero.
RotatingEigenstates ket_rotating_eigenstates(int n_levels);

struct DensityTolerances {
    double trace = 1e-9;
    double hermitian = kHermitianTol;
    double min_eigenvalue = -1e-8;
};

class DensityMatrix {
public:
    explicit DensityMatrix(Matrix entries, const DensityTolerances& tol = {});

    static DensityMatrix from_pure(const StateVector& psi);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& matrix() const { return entries_; }

    Complex trace() const { return entries_.trace(); }
    double min_eigenvalue() const;
    double hermiticity_error() const;
    // tr(O rho)
    Complex expectation(const Operator& op) const;

private:
    Matrix entries_;
};

struct HilbertSpec {
    int qubit_levels = 2;
    static constexpr int tls_levels = 2;

    int dim() const { return qubit_levels * tls_levels; }
    // Throws DimensionError outside 2..10 qubit levels.
    void validate() const;
};

}  // namespace tlsscope
