#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tlsscope/quantum.hpp"
#include "tlsscope/units.hpp"

namespace tlsscope {

/// Circuit energies (E/h) and decay rates of a capacitively shunted flux qubit.
///
/// The optional sweet-spot values are measured device frequencies at
/// Phi_e = 0.5 Phi_0. When present, QubitFrequencyModel reports the
/// diagonalized flux dispersion offset so that it passes through them.
struct QubitDeviceParams {
    Ghz e_cs{0.24};
    Ghz e_j{160.0};
    Ghz e_c{3.2};  // junction charging energy; stored for reference only
    double alpha = 0.457;
    PerUs gamma1q{0.03};
    PerUs gamma2q{0.0};
    std::optional<Ghz> sweet_spot_omega01;
    std::optional<Ghz> sweet_spot_anharmonicity;

    std::vector<std::string> violations() const;
    void validate() const;  // throws DomainError listing all violations
};

enum class CouplingKind { LinearCharge, NonlinearCurrent };

std::string_view to_string(CouplingKind kind);
std::optional<CouplingKind> parse_coupling_kind(std::string_view text);

struct DefectSpec {
    std::string name;
    CouplingKind kind = CouplingKind::LinearCharge;
    Ghz omega_tls{};
    Mhz g{};  // g_C for charge defects, g_I^(2) for critical-current defects
    PerUs gamma1{1.0};

    std::vector<std::string> violations() const;
};

// Tunneling-model parameters in rad/us.
struct TlsMicroscopic {
    double epsilon = 0.0;
    double delta0 = 0.0;
};

struct TlsEigen {
    Ghz omega_tls;
    double theta = 0.0;  // rad
};

struct DerivedQubitFreqs {
    Ghz omega01;
    Ghz omega12;
    Ghz anharmonicity;  // omega12 - omega01
    Ghz omega_b;        // perturbative harmonic frequency
    int charge_cutoff = 0;
};

struct FluxBias {
    double f = 0.5;  // Phi_e / Phi_0

    double delta_f() const { return f - 0.5; }
};

// Charge-basis Hamiltonian on n in [-N, N], in GHz (E/h). Throws DomainError
// when charge_cutoff < 20.
Operator csfq_hamiltonian_1d(const QubitDeviceParams& p, FluxBias flux, int charge_cutoff);

// Diagonalizes with cutoffs 30, 60, 120, 200 until omega01 moves < 1e-6 GHz.
DerivedQubitFreqs csfq_frequencies(const QubitDeviceParams& p, FluxBias flux);

// Flux-dependent qubit frequencies used by drive simulations and line
// predictions. Without sweet-spot values this is csfq_frequencies verbatim.
class QubitFrequencyModel {
public:
    explicit QubitFrequencyModel(QubitDeviceParams p);

    DerivedQubitFreqs at(FluxBias flux) const;
    bool anchored() const { return anchored_; }
    const QubitDeviceParams& params() const { return params_; }

private:
    QubitDeviceParams params_;
    Ghz omega_offset_{};
    Ghz anharm_offset_{};
    bool anchored_ = false;
};

struct DuffingParams {
    Ghz omega_b;
    Ghz anharmonicity;
    bool validity_warning = false;  // A > omega_b / 4
};

DuffingParams duffing_params(const QubitDeviceParams& p);

Mhz coupling_g_linear(double delta_n_tls, Ghz omega_b, Ghz e_cs);
// Inverse of coupling_g_linear.
double charge_fluctuation_from_g(Mhz g_c, Ghz omega_b, Ghz e_cs);

struct CurrentCouplings {
    Mhz g1;
    Mhz g2;
};

// r = dI_TLS / (alpha I_c). Both couplings carry the negative sign of the
// expansion.
CurrentCouplings coupling_g_current(const QubitDeviceParams& p, double r, FluxBias flux);
// r reproducing |g2|.
double current_fluctuation_from_g2(const QubitDeviceParams& p, Mhz g2);

TlsEigen tls_eigen(const TlsMicroscopic& m);

// Position-basis Pauli operators expressed in the defect eigenbasis.
struct PositionPaulis {
    Operator x;
    Operator y;
    Operator z;
};

PositionPaulis position_paulis_in_eigenbasis(double theta);

// Rotating-frame Hamiltonians in rad/us on qubit (x) defect.
Operator h_rot_linear(Ghz anharmonicity, Mhz omega, Mhz delta_l, Mhz g_c, const HilbertSpec& spec);
Operator h_rot_nonlinear(Ghz anharmonicity, Mhz omega, Mhz delta_nl, Mhz g2,
                         const HilbertSpec& spec);

// Two-level stand-in for the nonlinear coupling: the second-order
// |i+,g> <-> |i-,e> exchange written as g_eff tau_z sigma_x in the Fock basis.
Operator h_rot_virtual_surrogate(Mhz omega, Mhz delta, Mhz g_eff);

Mhz g_eff_virtual(Mhz g2, Mhz omega, Ghz anharmonicity);
Mhz g_eff_counter_rotating(Mhz g2, Mhz omega, Ghz omega_q);

// Delta_L = omega_TLS - omega_q or Delta_NL = omega_TLS - 2 omega_q.
Mhz defect_detuning(const DefectSpec& defect, Ghz omega_q);

}  // namespace tlsscope
