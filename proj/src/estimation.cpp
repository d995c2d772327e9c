#include "tlsscope/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "tlsscope/diagnostics.hpp"
#include "tlsscope/errors.hpp"
#include "tlsscope/parallel.hpp"

namespace tlsscope {

namespace {

std::string cell_coords(double g, double gamma) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(g=%.6g MHz, Gamma1TLS=%.6g /us)", g, gamma);
    return buf;
}

void require_positive_grid(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw RangeError(std::string(name) + " grid is empty");
    for (double v : grid) {
        if (!(v > 0.0)) throw RangeError(std::string(name) + " grid values must be > 0");
    }
}

double nearest_log_index_distance(double a, double b) { return std::abs(std::log(a) - std::log(b)); }

std::size_t nearest_index(const std::vector<double>& grid, double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (nearest_log_index_distance(grid[i], x) < nearest_log_index_distance(grid[best], x)) best = i;
    }
    return best;
}

}  // namespace

void DecayDataset::validate() const {
    if (times_us.size() != populations.size()) {
        throw ShapeError("dataset times and populations differ in length");
    }
    if (times_us.empty()) throw ShapeError("dataset is empty");
    for (std::size_t k = 1; k < times_us.size(); ++k) {
        if (!(times_us[k] > times_us[k - 1])) throw RangeError("dataset times must be strictly increasing");
    }
}

std::vector<double> model_curve(const DatasetMeta& meta, const std::vector<double>& times_us,
                                const ModelConfig& cfg, Mhz g, PerUs gamma_tls) {
    SpinLockConfig sl;
    sl.sequence = meta.sequence;
    sl.omega = meta.omega;
    sl.tau_us = times_us.back();
    sl.spec = cfg.spec;
    const DefectSpec defect{"fit", cfg.kind, Ghz{1.0}, g, gamma_tls};
    const Trajectory traj = simulate_spinlock_at(sl, defect, meta.delta, cfg.anharmonicity,
                                                 {meta.gamma1q, meta.gamma2q}, times_us);
    const auto& series = traj.series(meta.sequence == Sequence::S1 ? kSeriesPlus : kSeriesMinus);
    // propagate prepends t = 0 when absent
    const std::size_t skip = traj.times.size() - times_us.size();
    return {series.begin() + static_cast<std::ptrdiff_t>(skip), series.end()};
}

double rms_deviation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty()) throw ShapeError("rms_deviation: length mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(acc / static_cast<double>(a.size()));
}

double residual_sigma(const DecayDataset& data, const ModelConfig& cfg, Mhz g, PerUs gamma_tls) {
    data.validate();
    try {
        return rms_deviation(data.populations, model_curve(data.meta, data.times_us, cfg, g, gamma_tls));
    } catch (const NumericalError& e) {
        throw InstabilityError("residual failed at " + cell_coords(g.value, gamma_tls.value) + ": " +
                               e.what());
    }
}

ModelCurveBank build_curve_bank(const DatasetMeta& meta, const std::vector<double>& times_us,
                                const ModelConfig& cfg, const std::vector<double>& g_grid,
                                const std::vector<double>& gamma_grid, unsigned workers) {
    require_positive_grid(g_grid, "g");
    require_positive_grid(gamma_grid, "gamma");
    ModelCurveBank bank{meta, times_us, g_grid, gamma_grid, {}};
    bank.curves.resize(g_grid.size() * gamma_grid.size());
    parallel_for(bank.curves.size(), workers, [&](std::size_t cell) {
        const double g = g_grid[cell / gamma_grid.size()];
        const double gamma = gamma_grid[cell % gamma_grid.size()];
        try {
            bank.curves[cell] = model_curve(meta, times_us, cfg, Mhz{g}, PerUs{gamma});
        } catch (const NumericalError& e) {
            throw InstabilityError("model curve failed at " + cell_coords(g, gamma) + ": " + e.what());
        }
    });
    return bank;
}

ResidualSurface grid_scan(const DecayDataset& data, const ModelCurveBank& bank) {
    data.validate();
    if (data.times_us != bank.times_us) throw ShapeError("grid_scan: dataset times differ from curve bank");
    ResidualSurface s;
    s.g_grid = bank.g_grid;
    s.gamma_grid = bank.gamma_grid;
    s.sigma.resize(bank.curves.size());
    s.sigma_min = std::numeric_limits<double>::infinity();
    for (std::size_t cell = 0; cell < bank.curves.size(); ++cell) {
        const double v = rms_deviation(data.populations, bank.curves[cell]);
        s.sigma[cell] = v;
        if (v < s.sigma_min) {
            s.sigma_min = v;
            s.argmin_g = cell / s.gamma_grid.size();
            s.argmin_gamma = cell % s.gamma_grid.size();
        }
    }
    return s;
}

ResidualSurface grid_scan(const DecayDataset& data, const ModelConfig& cfg,
                          const std::vector<double>& g_grid,
                          const std::vector<double>& gamma_grid, unsigned workers) {
    data.validate();
    return grid_scan(data, build_curve_bank(data.meta, data.times_us, cfg, g_grid, gamma_grid, workers));
}

std::size_t ParamRegion::count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

bool ParamRegion::contains(double g_mhz, double gamma_per_us) const {
    return at(nearest_index(g_grid, g_mhz), nearest_index(gamma_grid, gamma_per_us));
}

ParamRegion optimal_region(const ResidualSurface& s, double factor) {
    if (!(factor > 1.0)) throw DomainError("optimal_region: factor must be > 1");
    ParamRegion r;
    r.g_grid = s.g_grid;
    r.gamma_grid = s.gamma_grid;
    const double threshold = factor * s.sigma_min;
    r.thresholds = {threshold};
    r.mask.reserve(s.sigma.size());
    for (double v : s.sigma) r.mask.push_back(v <= threshold ? 1 : 0);
    return r;
}

ParamRegion region_overlap(const ParamRegion& a, const ParamRegion& b) {
    if (a.g_grid != b.g_grid || a.gamma_grid != b.gamma_grid || a.mask.size() != b.mask.size()) {
        throw ShapeError("region_overlap: regions are defined on different grids");
    }
    ParamRegion r;
    r.g_grid = a.g_grid;
    r.gamma_grid = a.gamma_grid;
    r.thresholds = a.thresholds;
    r.thresholds.insert(r.thresholds.end(), b.thresholds.begin(), b.thresholds.end());
    r.mask.resize(a.mask.size());
    for (std::size_t k = 0; k < a.mask.size(); ++k) r.mask[k] = (a.mask[k] && b.mask[k]) ? 1 : 0;
    return r;
}

PerUs purcell_rate(Mhz g, PerUs gamma_tls, PurcellConvention convention) {
    if (!(gamma_tls.value > 0.0)) throw DomainError("purcell_rate: Gamma1TLS must be > 0");
    const double w = angular(g);
    const double prefactor = convention == PurcellConvention::EffectiveCoupling ? 4.0 : 1.0;
    return PerUs{prefactor * w * w / gamma_tls.value};
}

double window_mean(const Trajectory& traj, double window_start_us, double window_end_us,
                   const std::string& series) {
    if (traj.times.empty() || window_start_us > window_end_us ||
        window_start_us < traj.times.front() - 1e-12 || window_end_us > traj.times.back() + 1e-12) {
        throw RangeError("stationary window lies outside the trajectory span");
    }
    const auto& p = traj.series(series);
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] >= window_start_us - 1e-12 && traj.times[k] <= window_end_us + 1e-12) {
            acc += p[k];
            ++n;
        }
    }
    if (n == 0) throw RangeError("stationary window contains no samples");
    return acc / static_cast<double>(n);
}

StationaryValue stationary_population(const Trajectory& traj, double window_start_us,
                                      double window_end_us, double baseline,
                                      const std::string& series) {
    const double v = window_mean(traj, window_start_us, window_end_us, series);
    const int sign = v > baseline ? 1 : (v < baseline ? -1 : 0);
    return {v, sign};
}

DecayDataset add_noise(const DatasetMeta& meta, const std::vector<double>& times_us,
                       const std::vector<double>& clean, double noise_sigma,
                       std::mt19937_64& rng) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    DecayDataset d{times_us, {}, meta};
    d.populations.reserve(clean.size());
    for (double v : clean) {
        const double n = noise_sigma > 0.0 ? noise(rng) : 0.0;
        d.populations.push_back(std::clamp(v + n, 0.0, 1.0));
    }
    return d;
}

DecayDataset synthesize_dataset(const DatasetMeta& meta, const std::vector<double>& times_us,
                                const ModelConfig& cfg, Mhz g, PerUs gamma_tls,
                                double noise_sigma, std::mt19937_64& rng) {
    return add_noise(meta, times_us, model_curve(meta, times_us, cfg, g, gamma_tls), noise_sigma, rng);
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw RangeError("log_grid: need 0 < lo <= hi, points >= 1");
    if (points == 1) return {lo};
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = std::log(hi / lo) / (points - 1);
    for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = lo * std::exp(step * k);
    g.front() = lo;
    g.back() = hi;
    return g;
}

EstimateResult estimate_defect(const std::vector<DecayDataset>& datasets, const ModelConfig& cfg,
                               const std::vector<double>& g_grid,
                               const std::vector<double>& gamma_grid, double factor,
                               unsigned workers) {
    if (datasets.empty()) throw RangeError("estimate_defect: no datasets");
    EstimateResult out;
    out.bounded = datasets.size() >= 2;
    if (!out.bounded) {
        warn("estimate_defect: a single dataset leaves the g^2/Gamma degeneracy unresolved; "
             "supply a detuned (delta_Omega != 0) dataset for a bounded estimate");
    }
    for (const DecayDataset& d : datasets) {
        out.surfaces.push_back(grid_scan(d, cfg, g_grid, gamma_grid, workers));
        out.regions.push_back(optimal_region(out.surfaces.back(), factor));
    }
    out.overlap = out.regions.front();
    for (std::size_t k = 1; k < out.regions.size(); ++k) out.overlap = region_overlap(out.overlap, out.regions[k]);
    return out;
}

}  // namespace tlsscope
