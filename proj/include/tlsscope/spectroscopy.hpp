#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tlsscope/dynamics.hpp"
#include "tlsscope/model.hpp"

namespace tlsscope {

// S1 prepares |i+>, S2 prepares |i-> (inverted X-pulse phases).
enum class Sequence { S1, S2 };

std::string_view to_string(Sequence s);
std::optional<Sequence> parse_sequence(std::string_view text);

struct SpinLockConfig {
    Sequence sequence = Sequence::S1;
    Mhz omega{25.0};
    double tau_us = 60.0;
    HilbertSpec spec{};
    int time_points = 601;

    void validate() const;
};

struct QubitRates {
    PerUs gamma1q{0.03};
    PerUs gamma2q{0.0};
};

using DefectCatalog = std::vector<DefectSpec>;

// Population series names written into every drive trajectory.
inline constexpr const char* kSeriesPlus = "i+";
inline constexpr const char* kSeriesMinus = "i-";
inline constexpr const char* kSeriesLeak = "2";
inline constexpr const char* kSeriesGround = "0";

struct SystemProjectors {
    Operator plus;   // |i+><i+| (x) I
    Operator minus;  // |i-><i-| (x) I
    Operator leak;   // sum_{k>=2} |k><k| (x) I (zero when two levels)
    Operator ground; // |0><0| (x) I
};

SystemProjectors system_projectors(int qubit_levels);

// Collapse set {sqrt(G1q) b, sqrt(2 G2q) b^dag b, sqrt(G1tls) sigma_-}.
CollapseSet qubit_defect_collapse(int qubit_levels, const QubitRates& rates, PerUs gamma1tls);

// Ideal instantaneous X-pulses followed by a constant Y-drive of length tau.
// Detuning is Delta_L or Delta_NL depending on the defect kind.
Trajectory simulate_spinlock(const SpinLockConfig& cfg, const DefectSpec& defect, Mhz detuning,
                             Ghz anharmonicity, const QubitRates& rates);

Trajectory simulate_spinlock_at(const SpinLockConfig& cfg, const DefectSpec& defect,
                                Mhz detuning, Ghz anharmonicity, const QubitRates& rates,
                                const std::vector<double>& times);

// Same drive as the nonlinear spin-lock run but with the defect coupled
// through the two-level virtual-transition surrogate at g_eff.
Trajectory simulate_spinlock_surrogate(const SpinLockConfig& cfg, Mhz g_eff, Mhz detuning,
                                       PerUs gamma1tls, const QubitRates& rates);

// P1 = 1/2 + (P1_S1 - P1_S2) / 2, clipped to [0, 1].
double phase_cycle_combine(double p1_s1, double p1_s2);

// Measured |1> population after the closing X-pulse.
double readout_p1(Sequence s, double p_plus);

struct SpectroscopyMap {
    std::vector<double> flux_grid;   // Phi_e / Phi_0
    std::vector<double> omega_grid;  // MHz
    // Row-major |flux| x |omega|.
    std::vector<double> values;
    std::vector<double> baseline;
    std::vector<int> dominant_defect;  // -1 when the catalog is empty
    Sequence sequence = Sequence::S1;
    bool cycled = false;
    double tau_us = 0.0;
    std::uint64_t catalog_hash = 0;

    double value(std::size_t i_flux, std::size_t i_omega) const {
        return values[i_flux * omega_grid.size() + i_omega];
    }
    double baseline_at(std::size_t i_flux, std::size_t i_omega) const {
        return baseline[i_flux * omega_grid.size() + i_omega];
    }
};

std::uint64_t catalog_hash(const DefectCatalog& catalog);

// Each defect is simulated alone; a grid entry shows the defect with the
// largest |P - baseline|. Nonlinear defects use at least three qubit levels.
SpectroscopyMap sweep_map(const QubitDeviceParams& p, const DefectCatalog& catalog,
                          const std::vector<double>& flux_grid,
                          const std::vector<double>& omega_grid, const SpinLockConfig& cfg,
                          bool cycle, unsigned workers = 1);

struct DefectLine {
    std::string name;
    CouplingKind kind = CouplingKind::LinearCharge;
    std::vector<double> omega_mhz;     // resonance drive |Delta| per flux
    std::vector<double> detuning_mhz;  // signed Delta per flux
    std::vector<double> zero_crossings;  // flux where Delta changes sign
};

struct LineSet {
    std::vector<double> flux_grid;
    std::vector<DefectLine> lines;
};

LineSet predict_lines(const QubitDeviceParams& p, const DefectCatalog& catalog,
                      const std::vector<double>& flux_grid);

std::vector<double> rabi_amplitude_model(const std::vector<double>& amplitudes, double slope_mhz);
// Least-squares slope of Omega = slope * amplitude (line through origin).
double fit_rabi_slope(const std::vector<double>& amplitudes, const std::vector<double>& omega_mhz);

struct RabiOptions {
    double dt_us = 0.002;
    HilbertSpec spec{};
    std::optional<Ghz> anharmonicity;  // defaults to the sweet-spot model value
};

// Starts from |0> (x) |g>; fills series "0" with the qubit ground population.
Trajectory simulate_rabi(const QubitDeviceParams& p, const DefectSpec& defect, Mhz omega,
                         Mhz detuning, double tmax_us, const RabiOptions& opts = {});

}  // namespace tlsscope
