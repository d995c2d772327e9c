#pragma once

#include <map>
#include <string>
#include <vector>

#include "tlsscope/quantum.hpp"
#include "tlsscope/units.hpp"

namespace tlsscope {

// Collapse operators stored pre-scaled as sqrt(rate) * op.
class CollapseSet {
public:
    CollapseSet() = default;

    // Zero rates are accepted and dropped.
    CollapseSet& add(const Operator& op, PerUs rate);

    const std::vector<Operator>& scaled_ops() const { return ops_; }
    const std::vector<double>& rates() const { return rates_; }
    bool empty() const { return ops_.empty(); }

private:
    std::vector<Operator> ops_;
    std::vector<double> rates_;
};

// Generator acting on column-stacked density matrices: vec(rho) stacks the
// columns of rho, so vec(A rho B) = (B^T (x) A) vec(rho).
class Superoperator {
public:
    Superoperator(Matrix generator, int hilbert_dim);

    int hilbert_dim() const { return hilbert_dim_; }
    const Matrix& matrix() const { return generator_; }

private:
    Matrix generator_;
    int hilbert_dim_;
};

Vector vec(const Matrix& rho);
Matrix unvec(const Vector& v, int dim);

// L(rho) = -i[H, rho] + sum_k (C rho C^dag - {C^dag C, rho}/2), H in rad/us.
Superoperator liouvillian(const Operator& hamiltonian, const CollapseSet& collapse);

struct Trajectory {
    std::vector<double> times;  // us, times[0] == 0
    std::vector<DensityMatrix> states;
    std::map<std::string, std::vector<double>> populations;

    const std::vector<double>& series(const std::string& name) const;
};

// One matrix exponential per distinct step; steps that agree to 1e-12
// relative share a propagator. A missing t = 0 is prepended.
Trajectory propagate(const DensityMatrix& rho0, const Superoperator& generator,
                     const std::vector<double>& times);

// p(t) = tr(P rho(t)), clipped to [-1e-9, 1 + 1e-9]. Throws ContractError if
// P is not a projector.
std::vector<double> population(const Trajectory& traj, const Operator& projector);

// n uniformly spaced points on [0, t_end].
std::vector<double> uniform_times(double t_end, int points);

}  // namespace tlsscope
