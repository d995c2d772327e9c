#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "tlsscope/spectroscopy.hpp"

namespace tlsscope {

struct DatasetMeta {
    Mhz omega{};   // drive (Rabi) frequency
    Mhz delta{};   // qubit-defect detuning (Delta_L or Delta_NL)
    Sequence sequence = Sequence::S2;
    PerUs gamma1q{0.02};
    PerUs gamma2q{0.03};

    // delta_Omega = Delta - Omega
    Mhz delta_omega() const { return Mhz{delta.value - omega.value}; }
};

// Population of the prepared rotating-frame state (|i+> for S1, |i-> for S2)
// sampled during the drive.
struct DecayDataset {
    std::vector<double> times_us;
    std::vector<double> populations;
    DatasetMeta meta;

    void validate() const;
};

// Fixed model structure; drive, detuning and qubit rates come from the
// dataset metadata.
struct ModelConfig {
    CouplingKind kind = CouplingKind::NonlinearCurrent;
    Ghz anharmonicity{1.0};
    HilbertSpec spec{3};
};

std::vector<double> model_curve(const DatasetMeta& meta, const std::vector<double>& times_us,
                                const ModelConfig& cfg, Mhz g, PerUs gamma_tls);

double rms_deviation(const std::vector<double>& a, const std::vector<double>& b);

double residual_sigma(const DecayDataset& data, const ModelConfig& cfg, Mhz g, PerUs gamma_tls);

struct ResidualSurface {
    std::vector<double> g_grid;      // MHz
    std::vector<double> gamma_grid;  // 1/us
    std::vector<double> sigma;       // row-major |g| x |gamma|
    double sigma_min = 0.0;
    std::size_t argmin_g = 0;
    std::size_t argmin_gamma = 0;

    double at(std::size_t i_g, std::size_t i_gamma) const {
        return sigma[i_g * gamma_grid.size() + i_gamma];
    }
    double argmin_g_mhz() const { return g_grid[argmin_g]; }
    double argmin_gamma_per_us() const { return gamma_grid[argmin_gamma]; }
};

// Model curves for every grid cell, reusable across noisy realisations of
// the same measurement.
struct ModelCurveBank {
    DatasetMeta meta;
    std::vector<double> times_us;
    std::vector<double> g_grid;
    std::vector<double> gamma_grid;
    std::vector<std::vector<double>> curves;  // row-major |g| x |gamma|
};

ModelCurveBank build_curve_bank(const DatasetMeta& meta, const std::vector<double>& times_us,
                                const ModelConfig& cfg, const std::vector<double>& g_grid,
                                const std::vector<double>& gamma_grid, unsigned workers = 1);

ResidualSurface grid_scan(const DecayDataset& data, const ModelCurveBank& bank);
ResidualSurface grid_scan(const DecayDataset& data, const ModelConfig& cfg,
                          const std::vector<double>& g_grid,
                          const std::vector<double>& gamma_grid, unsigned workers = 1);

struct ParamRegion {
    std::vector<double> g_grid;
    std::vector<double> gamma_grid;
    std::vector<std::uint8_t> mask;  // row-major |g| x |gamma|
    std::vector<double> thresholds;  // one per surface that defined the region

    bool at(std::size_t i_g, std::size_t i_gamma) const {
        return mask[i_g * gamma_grid.size() + i_gamma] != 0;
    }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
    // Tests the cell nearest to (g, gamma) in log coordinates.
    bool contains(double g_mhz, double gamma_per_us) const;
};

ParamRegion optimal_region(const ResidualSurface& s, double factor = 2.0);
ParamRegion region_overlap(const ParamRegion& a, const ParamRegion& b);

enum class PurcellConvention {
    EffectiveCoupling,  // 4 g_eff^2 / Gamma1TLS
    LinearCharge,       // g_C^2 / Gamma1TLS (effective coupling g_C / 2)
};

PerUs purcell_rate(Mhz g, PerUs gamma_tls,
                   PurcellConvention convention = PurcellConvention::EffectiveCoupling);

struct StationaryValue {
    double value = 0.0;
    int polarity = 0;  // sign(value - baseline)
};

// Mean of the named series over [window_start, window_end].
StationaryValue stationary_population(const Trajectory& traj, double window_start_us,
                                      double window_end_us, double baseline,
                                      const std::string& series = kSeriesPlus);
double window_mean(const Trajectory& traj, double window_start_us, double window_end_us,
                   const std::string& series = kSeriesPlus);

// Additive Gaussian noise, clipped to [0, 1].
DecayDataset synthesize_dataset(const DatasetMeta& meta, const std::vector<double>& times_us,
                                const ModelConfig& cfg, Mhz g, PerUs gamma_tls,
                                double noise_sigma, std::mt19937_64& rng);
DecayDataset add_noise(const DatasetMeta& meta, const std::vector<double>& times_us,
                       const std::vector<double>& clean, double noise_sigma,
                       std::mt19937_64& rng);

std::vector<double> log_grid(double lo, double hi, int points);

struct EstimateResult {
    std::vector<ResidualSurface> surfaces;
    std::vector<ParamRegion> regions;
    ParamRegion overlap;
    bool bounded = false;  // at least two datasets contributed
};

// Scans each dataset, forms factor * sigma_min regions and intersects them.
EstimateResult estimate_defect(const std::vector<DecayDataset>& datasets, const ModelConfig& cfg,
                               const std::vector<double>& g_grid,
                               const std::vector<double>& gamma_grid, double factor = 2.0,
                               unsigned workers = 1);

}  // namespace tlsscope
