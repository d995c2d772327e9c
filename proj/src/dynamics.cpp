#include "tlsscope/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "tlsscope/errors.hpp"

namespace tlsscope {

namespace {

constexpr double kTraceDriftTol = 1e-9;
constexpr double kHermitianDriftTol = 1e-8;
constexpr double kProjectorTol = 1e-10;
constexpr double kStepMatchTol = 1e-12;

}  // namespace

CollapseSet& CollapseSet::add(const Operator& op, PerUs rate) {
    if (rate.value < 0.0) throw DomainError("collapse rate must be >= 0");
    if (rate.value == 0.0) return *this;
    ops_.push_back(Complex(std::sqrt(rate.value)) * op);
    rates_.push_back(rate.value);
    return *this;
}

Superoperator::Superoperator(Matrix generator, int hilbert_dim)
    : generator_(std::move(generator)), hilbert_dim_(hilbert_dim) {
    if (generator_.rows() != hilbert_dim * hilbert_dim || generator_.cols() != generator_.rows()) {
        throw ShapeError("superoperator must be dim^2 x dim^2");
    }
}

Vector vec(const Matrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unvec(const Vector& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) throw ShapeError("unvec size mismatch");
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Superoperator liouvillian(const Operator& hamiltonian, const CollapseSet& collapse) {
    const int d = hamiltonian.dim();
    const Operator eye = Operator::identity(d);
    const Operator h = hamiltonian;
    const Complex minus_i{0.0, -1.0};

    Matrix l = minus_i * (tensor(eye, h).matrix() -
                          tensor(Operator(h.matrix().transpose()), eye).matrix());
    for (const Operator& c : collapse.scaled_ops()) {
        if (c.dim() != d) {
            throw ShapeError("collapse operator dim " + std::to_string(c.dim()) +
                             " does not match Hamiltonian dim " + std::to_string(d));
        }
        const Matrix cdc = c.matrix().adjoint() * c.matrix();
        l += tensor(Operator(c.matrix().conjugate()), c).matrix();
        l -= 0.5 * tensor(eye, Operator(cdc)).matrix();
        l -= 0.5 * tensor(Operator(cdc.transpose()), eye).matrix();
    }
    return Superoperator(std::move(l), d);
}

const std::vector<double>& Trajectory::series(const std::string& name) const {
    const auto it = populations.find(name);
    if (it == populations.end()) throw RangeError("trajectory has no series '" + name + "'");
    return it->second;
}

Trajectory propagate(const DensityMatrix& rho0, const Superoperator& generator,
                     const std::vector<double>& times) {
    const int d = generator.hilbert_dim();
    if (rho0.dim() != d) throw ShapeError("initial state does not match generator dimension");
    if (times.empty()) throw RangeError("propagate: empty time list");
    if (times.front() < 0.0) throw RangeError("propagate: times must start at >= 0");
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) throw RangeError("propagate: times must be strictly increasing");
    }

    Trajectory traj;
    traj.times.reserve(times.size() + 1);
    if (times.front() != 0.0) traj.times.push_back(0.0);
    traj.times.insert(traj.times.end(), times.begin(), times.end());
    traj.states.reserve(traj.times.size());
    traj.states.push_back(rho0);

    const DensityTolerances drift{kTraceDriftTol, kHermitianDriftTol, -1e-8};
    std::vector<std::pair<double, Matrix>> cache;
    Vector v = vec(rho0.matrix());

    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double step = traj.times[k] - traj.times[k - 1];
        const Matrix* prop = nullptr;
        for (const auto& [dt, m] : cache) {
            if (std::abs(dt - step) <= kStepMatchTol * std::max(dt, step)) {
                prop = &m;
                break;
            }
        }
        if (prop == nullptr) {
            cache.emplace_back(step, Matrix((generator.matrix() * step).exp()));
            prop = &cache.back().second;
        }
        v = (*prop) * v;
        Matrix rho = unvec(v, d);
        try {
            traj.states.emplace_back(std::move(rho), drift);
        } catch (const InstabilityError& e) {
            throw InstabilityError("propagation unstable at t=" + std::to_string(traj.times[k]) +
                                   " us: " + e.what());
        }
    }
    return traj;
}

std::vector<double> population(const Trajectory& traj, const Operator& projector) {
    const double idem = max_abs_difference(projector * projector, projector);
    if (idem > kProjectorTol || projector.hermiticity_error() > kProjectorTol) {
        throw ContractError("population: operator is not a projector (|P^2 - P| = " +
                            std::to_string(idem) + ")");
    }
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const DensityMatrix& rho : traj.states) {
        const Complex p = rho.expectation(projector);
        if (std::abs(p.imag()) > 1e-10) {
            throw InstabilityError("population has imaginary part " + std::to_string(p.imag()));
        }
        out.push_back(std::clamp(p.real(), -1e-9, 1.0 + 1e-9));
    }
    return out;
}

std::vector<double> uniform_times(double t_end, int points) {
    if (points < 2 || !(t_end > 0.0)) throw RangeError("uniform_times needs >= 2 points and t_end > 0");
    std::vector<double> t(static_cast<std::size_t>(points));
    const double h = t_end / (points - 1);
    for (int k = 0; k < points; ++k) t[static_cast<std::size_t>(k)] = k * h;
    t.back() = t_end;
    return t;
}

}  // namespace tlsscope
