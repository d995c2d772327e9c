#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tlsscope/estimation.hpp"
#include "tlsscope/model.hpp"
#include "tlsscope/spectroscopy.hpp"

namespace tlsscope {

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int points = 1;
    bool log_spaced = false;

    std::vector<double> values() const;
};

struct SimulateSpec {
    std::string defect;                  // catalog name; empty selects the first entry
    std::vector<double> detunings_mhz;   // one trajectory per entry
    std::optional<double> flux_phi0;     // alternative: detuning from the frequency model
    std::optional<Ghz> anharmonicity;    // defaults to the device value at the sweet spot
    bool surrogate = false;              // also run the two-level virtual surrogate
};

struct RabiSpec {
    std::string defect;
    std::vector<double> omegas_mhz{25.0};
    Mhz detuning{100.0};
    double tmax_us = 1.0;
    double dt_us = 0.002;
};

struct SyntheticSpec {
    Mhz g{15.0};
    PerUs gamma1tls{2.0};
    Mhz delta{23.4};
    std::vector<double> delta_omegas_mhz{0.0, 1.2};
    Sequence sequence = Sequence::S2;
    PerUs gamma1q{0.02};
    PerUs gamma2q{0.03};
    double noise_sigma = 0.01;
    double tau_us = 60.0;
    int time_points = 121;
};

struct EstimationSpec {
    ModelConfig model;
    GridSpec g_grid{1.0, 40.0, 60, true};
    GridSpec gamma_grid{0.2, 10.0, 60, true};
    double factor = 2.0;
    std::vector<std::filesystem::path> datasets;
    std::optional<SyntheticSpec> synthetic;
};

struct RunConfig {
    QubitDeviceParams device;
    DefectCatalog catalog;
    SpinLockConfig drive;
    bool phase_cycle = false;
    GridSpec flux_grid{0.498, 0.508, 100, false};
    GridSpec omega_grid{5.0, 100.0, 100, false};
    GridSpec spectrum_flux{0.49, 0.51, 41, false};
    SimulateSpec simulate;
    RabiSpec rabi;
    EstimationSpec estimation;
    std::filesystem::path output_dir = "out";
    std::string source;  // file the config was read from

    const DefectSpec& defect(const std::string& name) const;  // RangeError when absent
};

// Throws ConfigError carrying every violation found.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir);

std::filesystem::path preset_dir();
std::filesystem::path preset_path(const std::string& name);  // RangeError for unknown presets
std::vector<std::string> preset_names();

}  // namespace tlsscope
