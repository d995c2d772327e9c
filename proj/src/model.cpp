#include "tlsscope/model.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "tlsscope/diagnostics.hpp"
#include "tlsscope/errors.hpp"

namespace tlsscope {

namespace {

constexpr std::array<int, 4> kChargeCutoffs{30, 60, 120, 200};
constexpr double kFrequencyConvergence = 1e-6;  // GHz

std::string join(const std::vector<std::string>& items) {
    std::ostringstream out;
    for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "; " : "") << items[i];
    return out.str();
}

void require_single_well(double alpha, const char* where) {
    if (!(alpha < 0.5)) {
        throw DomainError(std::string(where) + ": alpha must be < 0.5 (single-well regime), got " +
                          std::to_string(alpha));
    }
}

std::array<double, 3> lowest_levels(const QubitDeviceParams& p, FluxBias flux, int cutoff) {
    const Operator h = csfq_hamiltonian_1d(p, flux, cutoff);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("charge-basis diagonalization failed at cutoff " +
                               std::to_string(cutoff));
    }
    const auto& e = solver.eigenvalues();
    return {e(0), e(1), e(2)};
}

}  // namespace

std::vector<std::string> QubitDeviceParams::violations() const {
    std::vector<std::string> out;
    if (!(alpha > 0.0 && alpha < 0.5)) {
        out.push_back("alpha=" + std::to_string(alpha) +
                      " violates the single-well condition 0 < alpha < 0.5");
    }
    if (!(e_cs.value > 0.0)) out.push_back("e_cs must be > 0 GHz");
    if (!(e_j.value > 0.0)) out.push_back("e_j must be > 0 GHz");
    if (gamma1q.value < 0.0) out.push_back("gamma1q must be >= 0 per us");
    if (gamma2q.value < 0.0) out.push_back("gamma2q must be >= 0 per us");
    if (sweet_spot_omega01 && !(sweet_spot_omega01->value > 0.0)) {
        out.push_back("sweet-spot omega01 must be > 0 GHz");
    }
    return out;
}

void QubitDeviceParams::validate() const {
    const auto v = violations();
    if (!v.empty()) throw DomainError("invalid device parameters: " + join(v));
}

std::string_view to_string(CouplingKind kind) {
    return kind == CouplingKind::LinearCharge ? "linear" : "nonlinear";
}

std::optional<CouplingKind> parse_coupling_kind(std::string_view text) {
    if (text == "linear" || text == "LinearCharge") return CouplingKind::LinearCharge;
    if (text == "nonlinear" || text == "NonlinearCurrent") return CouplingKind::NonlinearCurrent;
    return std::nullopt;
}

std::vector<std::string> DefectSpec::violations() const {
    std::vector<std::string> out;
    const std::string who = name.empty() ? std::string("defect") : "defect " + name;
    if (!(omega_tls.value > 0.0)) out.push_back(who + ": omega_tls must be > 0 GHz");
    if (!(gamma1.value > 0.0)) out.push_back(who + ": gamma1tls must be > 0 per us");
    if (!std::isfinite(g.value)) out.push_back(who + ": g must be finite");
    return out;
}

namespace {
DuffingParams duffing_values(const QubitDeviceParams& p);
}  // namespace

Operator csfq_hamiltonian_1d(const QubitDeviceParams& p, FluxBias flux, int charge_cutoff) {
    if (charge_cutoff < 20) {
        throw DomainError("charge cutoff " + std::to_string(charge_cutoff) +
                          " is below the minimum of 20");
    }
    const int n = 2 * charge_cutoff + 1;
    const double ecs = p.e_cs.value;
    const double ej = p.e_j.value;
    const double aej = p.alpha * ej;
    const Complex phase = std::polar(1.0, kTwoPi * flux.f);

    Matrix h = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double charge = i - charge_cutoff;
        h(i, i) = ecs * charge * charge + 2.0 * ej + aej;
    }
    // -2 E_J cos(phi): e^{+i phi} raises n by one.
    for (int i = 0; i + 1 < n; ++i) {
        h(i + 1, i) = -ej;
        h(i, i + 1) = -ej;
    }
    // -alpha E_J cos(2 pi f + 2 phi)
    for (int i = 0; i + 2 < n; ++i) {
        h(i + 2, i) = -0.5 * aej * phase;
        h(i, i + 2) = -0.5 * aej * std::conj(phase);
    }
    return Operator(std::move(h), true);
}

DerivedQubitFreqs csfq_frequencies(const QubitDeviceParams& p, FluxBias flux) {
    require_single_well(p.alpha, "csfq_frequencies");
    const DuffingParams duff = duffing_values(p);
    std::array<double, 3> prev = lowest_levels(p, flux, kChargeCutoffs[0]);
    for (std::size_t k = 1; k < kChargeCutoffs.size(); ++k) {
        const std::array<double, 3> cur = lowest_levels(p, flux, kChargeCutoffs[k]);
        const double w_prev = prev[1] - prev[0];
        const double w_cur = cur[1] - cur[0];
        if (std::abs(w_cur - w_prev) < kFrequencyConvergence) {
            const double w12 = cur[2] - cur[1];
            return {Ghz{w_cur}, Ghz{w12}, Ghz{w12 - w_cur}, duff.omega_b, kChargeCutoffs[k]};
        }
        prev = cur;
    }
    throw ConvergenceError("omega01 not converged to 1e-6 GHz at charge cutoff 200 (flux " +
                           std::to_string(flux.f) + ")");
}

QubitFrequencyModel::QubitFrequencyModel(QubitDeviceParams p) : params_(std::move(p)) {
    params_.validate();
    if (params_.sweet_spot_omega01 || params_.sweet_spot_anharmonicity) {
        const DerivedQubitFreqs sweet = csfq_frequencies(params_, FluxBias{0.5});
        if (params_.sweet_spot_omega01) {
            omega_offset_ = Ghz{params_.sweet_spot_omega01->value - sweet.omega01.value};
        }
        if (params_.sweet_spot_anharmonicity) {
            anharm_offset_ =
                Ghz{params_.sweet_spot_anharmonicity->value - sweet.anharmonicity.value};
        }
        anchored_ = true;
    }
}

DerivedQubitFreqs QubitFrequencyModel::at(FluxBias flux) const {
    DerivedQubitFreqs out = csfq_frequencies(params_, flux);
    if (!anchored_) return out;
    out.omega01.value += omega_offset_.value;
    out.anharmonicity.value += anharm_offset_.value;
    out.omega12.value = out.omega01.value + out.anharmonicity.value;
    return out;
}

namespace {

DuffingParams duffing_values(const QubitDeviceParams& p) {
    require_single_well(p.alpha, "duffing_params");
    const double one_minus = 1.0 - 2.0 * p.alpha;
    const double wb = std::sqrt(4.0 * p.e_cs.value * p.e_j.value * one_minus);
    const double a = (8.0 * p.alpha - 1.0) / (4.0 * one_minus) * p.e_cs.value;
    return {Ghz{wb}, Ghz{a}, a > wb / 4.0};
}

}  // namespace

DuffingParams duffing_params(const QubitDeviceParams& p) {
    const DuffingParams d = duffing_values(p);
    if (d.validity_warning) {
        warn("perturbative Duffing anharmonicity " + std::to_string(d.anharmonicity.value) +
             " GHz exceeds omega_b/4; the A << omega_b condition fails");
    }
    return d;
}

Mhz coupling_g_linear(double delta_n_tls, Ghz omega_b, Ghz e_cs) {
    return to_mhz(Ghz{0.5 * delta_n_tls * std::sqrt(omega_b.value * e_cs.value)});
}

double charge_fluctuation_from_g(Mhz g_c, Ghz omega_b, Ghz e_cs) {
    return 2.0 * to_ghz(g_c).value / std::sqrt(omega_b.value * e_cs.value);
}

CurrentCouplings coupling_g_current(const QubitDeviceParams& p, double r, FluxBias flux) {
    require_single_well(p.alpha, "coupling_g_current");
    if (r < 0.0) throw DomainError("relative critical-current fluctuation r must be >= 0");
    const double wb = duffing_values(p).omega_b.value;
    const double one_minus = 1.0 - 2.0 * p.alpha;
    const double g1 = -std::numbers::pi * flux.delta_f() * (p.alpha / std::sqrt(one_minus)) * r *
                      std::sqrt(wb * p.e_j.value);
    const double g2 = -(p.alpha / (4.0 * one_minus)) * r * wb;
    return {to_mhz(Ghz{g1}), to_mhz(Ghz{g2})};
}

double current_fluctuation_from_g2(const QubitDeviceParams& p, Mhz g2) {
    const double per_unit_r = std::abs(coupling_g_current(p, 1.0, FluxBias{0.5}).g2.value);
    return std::abs(g2.value) / per_unit_r;
}

TlsEigen tls_eigen(const TlsMicroscopic& m) {
    if (m.epsilon == 0.0 && m.delta0 == 0.0) {
        throw DomainError("degenerate defect: epsilon and delta0 are both zero");
    }
    const double w = std::hypot(m.epsilon, m.delta0);
    return {Ghz{w / (kTwoPi * 1e3)}, std::atan2(m.delta0, m.epsilon)};
}

PositionPaulis position_paulis_in_eigenbasis(double theta) {
    const PauliOps s = pauli_ops();
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    return {Complex(c) * s.x + Complex(sn) * s.z, s.y, Complex(c) * s.z - Complex(sn) * s.x};
}

namespace {

// (A/2)[(b^dag b)^2 - b^dag b] + i(Omega/2)(b^dag - b), lifted onto qubit (x) defect,
// plus (Delta/2) sigma_z.
Matrix driven_duffing_part(double a_rad, double omega_rad, double delta_rad, int levels) {
    const LadderOps lad = ladder_ops(levels);
    const Matrix& b = lad.annihilation.matrix();
    const Matrix& bd = lad.creation.matrix();
    const Matrix num = bd * b;
    const Matrix qubit = 0.5 * a_rad * (num * num - num) + Complex(0.0, 0.5 * omega_rad) * (bd - b);
    const Matrix h_q = tensor(Operator(qubit), Operator::identity(2)).matrix();
    const Matrix h_tls =
        tensor(Operator::identity(levels), Complex(0.5 * delta_rad) * pauli_ops().z).matrix();
    return h_q + h_tls;
}

}  // namespace

Operator h_rot_linear(Ghz anharmonicity, Mhz omega, Mhz delta_l, Mhz g_c,
                      const HilbertSpec& spec) {
    spec.validate();
    const int n = spec.qubit_levels;
    Matrix h = driven_duffing_part(angular(anharmonicity), angular(omega), angular(delta_l), n);
    const LadderOps lad = ladder_ops(n);
    const PauliOps s = pauli_ops();
    const Matrix coupling =
        (tensor(lad.creation, s.minus) - tensor(lad.annihilation, s.plus)).matrix();
    h += Complex(0.0, angular(g_c)) * coupling;
    return Operator(std::move(h), true);
}

Operator h_rot_nonlinear(Ghz anharmonicity, Mhz omega, Mhz delta_nl, Mhz g2,
                         const HilbertSpec& spec) {
    spec.validate();
    if (spec.qubit_levels < 3) {
        throw DimensionError(
            "nonlinear coupling needs qubit_levels >= 3; it vanishes on two levels");
    }
    const int n = spec.qubit_levels;
    Matrix h = driven_duffing_part(angular(anharmonicity), angular(omega), angular(delta_nl), n);
    const LadderOps lad = ladder_ops(n);
    const PauliOps s = pauli_ops();
    const Operator bd2 = lad.creation * lad.creation;
    const Operator b2 = lad.annihilation * lad.annihilation;
    h += angular(g2) * (tensor(bd2, s.minus) + tensor(b2, s.plus)).matrix();
    return Operator(std::move(h), true);
}

Operator h_rot_virtual_surrogate(Mhz omega, Mhz delta, Mhz g_eff) {
    Matrix h = driven_duffing_part(0.0, angular(omega), angular(delta), 2);
    const PauliOps s = pauli_ops();
    // tau_z = |0><0| - |1><1| = |i+><i-| + |i-><i+|
    h += angular(g_eff) * tensor(s.z, s.x).matrix();
    return Operator(std::move(h), true);
}

Mhz g_eff_virtual(Mhz g2, Mhz omega, Ghz anharmonicity) {
    if (anharmonicity.value == 0.0) throw DomainError("g_eff_virtual: anharmonicity is zero");
    const Mhz a = to_mhz(anharmonicity);
    if (std::abs(omega.value) > std::abs(a.value) / 10.0) {
        warn("g_eff_virtual: drive Omega exceeds A/10; second-order estimate is unreliable");
    }
    return Mhz{g2.value * omega.value / (2.0 * a.value)};
}

Mhz g_eff_counter_rotating(Mhz g2, Mhz omega, Ghz omega_q) {
    if (!(omega_q.value > 0.0)) throw DomainError("g_eff_counter_rotating: omega_q must be > 0");
    return Mhz{g2.value * omega.value / (4.0 * to_mhz(omega_q).value)};
}

Mhz defect_detuning(const DefectSpec& defect, Ghz omega_q) {
    const double photons = defect.kind == CouplingKind::LinearCharge ? 1.0 : 2.0;
    return to_mhz(Ghz{defect.omega_tls.value - photons * omega_q.value});
}

}  // namespace tlsscope
