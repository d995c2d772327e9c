#include "tlsscope/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "tlsscope/diagnostics.hpp"
#include "tlsscope/errors.hpp"
#include "tlsscope/parallel.hpp"

namespace tlsscope {

std::string_view to_string(Sequence s) { return s == Sequence::S1 ? "S1" : "S2"; }

std::optional<Sequence> parse_sequence(std::string_view text) {
    if (text == "S1" || text == "s1") return Sequence::S1;
    if (text == "S2" || text == "s2") return Sequence::S2;
    return std::nullopt;
}

void SpinLockConfig::validate() const {
    spec.validate();
    if (!(tau_us > 0.0)) throw DomainError("spin-lock tau must be > 0 us");
    if (omega.value < 0.0) throw DomainError("spin-lock Omega must be >= 0 MHz");
    if (time_points < 2) throw DomainError("spin-lock time_points must be >= 2");
}

SystemProjectors system_projectors(int qubit_levels) {
    const RotatingEigenstates eig = ket_rotating_eigenstates(qubit_levels);
    const Operator tls_id = Operator::identity(2);
    Matrix leak = Matrix::Zero(qubit_levels, qubit_levels);
    for (int k = 2; k < qubit_levels; ++k) leak(k, k) = 1.0;
    return {tensor(eig.plus.projector(), tls_id), tensor(eig.minus.projector(), tls_id),
            tensor(Operator(leak), tls_id),
            tensor(StateVector::basis(qubit_levels, 0).projector(), tls_id)};
}

CollapseSet qubit_defect_collapse(int qubit_levels, const QubitRates& rates, PerUs gamma1tls) {
    const LadderOps lad = ladder_ops(qubit_levels);
    const Operator tls_id = Operator::identity(2);
    CollapseSet c;
    c.add(tensor(lad.annihilation, tls_id), rates.gamma1q);
    c.add(tensor(lad.creation * lad.annihilation, tls_id), PerUs{2.0 * rates.gamma2q.value});
    c.add(tensor(Operator::identity(qubit_levels), pauli_ops().minus), gamma1tls);
    return c;
}

namespace {

DensityMatrix prepared_state(Sequence seq, int qubit_levels) {
    const RotatingEigenstates eig = ket_rotating_eigenstates(qubit_levels);
    const StateVector& q = seq == Sequence::S1 ? eig.plus : eig.minus;
    return DensityMatrix::from_pure(tensor(q, StateVector::basis(2, kTlsGround)));
}

Trajectory run_with_projectors(const Operator& h, const CollapseSet& c, const DensityMatrix& rho0,
                               int qubit_levels, const std::vector<double>& times) {
    Trajectory traj = propagate(rho0, liouvillian(h, c), times);
    const SystemProjectors proj = system_projectors(qubit_levels);
    traj.populations[kSeriesPlus] = population(traj, proj.plus);
    traj.populations[kSeriesMinus] = population(traj, proj.minus);
    traj.populations[kSeriesLeak] = population(traj, proj.leak);
    return traj;
}

std::string coords(double flux, double omega) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(flux=%.6f Phi0, Omega=%.4f MHz)", flux, omega);
    return buf;
}

}  // namespace

Trajectory simulate_spinlock_at(const SpinLockConfig& cfg, const DefectSpec& defect,
                                Mhz detuning, Ghz anharmonicity, const QubitRates& rates,
                                const std::vector<double>& times) {
    cfg.validate();
    const int levels = cfg.spec.qubit_levels;
    const Operator h = defect.kind == CouplingKind::LinearCharge
                           ? h_rot_linear(anharmonicity, cfg.omega, detuning, defect.g, cfg.spec)
                           : h_rot_nonlinear(anharmonicity, cfg.omega, detuning, defect.g, cfg.spec);
    return run_with_projectors(h, qubit_defect_collapse(levels, rates, defect.gamma1),
                               prepared_state(cfg.sequence, levels), levels, times);
}

Trajectory simulate_spinlock(const SpinLockConfig& cfg, const DefectSpec& defect, Mhz detuning,
                             Ghz anharmonicity, const QubitRates& rates) {
    return simulate_spinlock_at(cfg, defect, detuning, anharmonicity, rates,
                                uniform_times(cfg.tau_us, cfg.time_points));
}

Trajectory simulate_spinlock_surrogate(const SpinLockConfig& cfg, Mhz g_eff, Mhz detuning,
                                       PerUs gamma1tls, const QubitRates& rates) {
    SpinLockConfig two = cfg;
    two.spec.qubit_levels = 2;
    two.validate();
    const Operator h = h_rot_virtual_surrogate(cfg.omega, detuning, g_eff);
    return run_with_projectors(h, qubit_defect_collapse(2, rates, gamma1tls),
                               prepared_state(cfg.sequence, 2), 2,
                               uniform_times(cfg.tau_us, cfg.time_points));
}

double phase_cycle_combine(double p1_s1, double p1_s2) {
    const double p = 0.5 + 0.5 * (p1_s1 - p1_s2);
    if (p < 0.0 || p > 1.0) {
        warn("phase_cycle_combine: combined population " + std::to_string(p) +
             " clipped to [0, 1]");
        return std::clamp(p, 0.0, 1.0);
    }
    return p;
}

double readout_p1(Sequence s, double p_plus) { return s == Sequence::S1 ? p_plus : 1.0 - p_plus; }

std::uint64_t catalog_hash(const DefectCatalog& catalog) {
    std::ostringstream text;
    text.precision(17);
    for (const DefectSpec& d : catalog) {
        text << d.name << '|' << to_string(d.kind) << '|' << d.omega_tls.value << '|' << d.g.value
             << '|' << d.gamma1.value << ';';
    }
    // FNV-1a
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text.str()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

SpectroscopyMap sweep_map(const QubitDeviceParams& p, const DefectCatalog& catalog,
                          const std::vector<double>& flux_grid,
                          const std::vector<double>& omega_grid, const SpinLockConfig& cfg,
                          bool cycle, unsigned workers) {
    cfg.validate();
    if (flux_grid.empty() || omega_grid.empty()) throw RangeError("sweep_map: empty grid");
    if (!std::is_sorted(flux_grid.begin(), flux_grid.end()) ||
        !std::is_sorted(omega_grid.begin(), omega_grid.end())) {
        throw RangeError("sweep_map: grids must be sorted");
    }
    if (flux_grid.front() < 0.48 || flux_grid.back() > 0.52) {
        warn("sweep_map: flux grid leaves [0.48, 0.52]; flux-independent couplings are a poor "
             "approximation there");
    }

    const QubitFrequencyModel model(p);
    std::vector<DerivedQubitFreqs> freqs(flux_grid.size());
    parallel_for(flux_grid.size(), workers,
                 [&](std::size_t i) { freqs[i] = model.at(FluxBias{flux_grid[i]}); });

    const QubitRates rates{p.gamma1q, p.gamma2q};
    const std::vector<double> final_time{cfg.tau_us};
    const int linear_levels = cfg.spec.qubit_levels;
    const int nonlinear_levels = std::max(3, cfg.spec.qubit_levels);

    SpectroscopyMap map;
    map.flux_grid = flux_grid;
    map.omega_grid = omega_grid;
    map.sequence = cfg.sequence;
    map.cycled = cycle;
    map.tau_us = cfg.tau_us;
    map.catalog_hash = catalog_hash(catalog);
    const std::size_t n_omega = omega_grid.size();
    const std::size_t cells = flux_grid.size() * n_omega;
    map.values.assign(cells, 0.0);
    map.baseline.assign(cells, 0.0);
    map.dominant_defect.assign(cells, -1);

    parallel_for(cells, workers, [&](std::size_t cell) {
        const std::size_t i_flux = cell / n_omega;
        const std::size_t i_omega = cell % n_omega;
        const DerivedQubitFreqs& f = freqs[i_flux];
        try {
            // Measured P1 at tau for one defect, optionally phase cycled.
            auto measure = [&](const DefectSpec& d, Mhz detuning, int levels) {
                auto run = [&](Sequence seq) {
                    SpinLockConfig c = cfg;
                    c.sequence = seq;
                    c.omega = Mhz{omega_grid[i_omega]};
                    c.spec.qubit_levels = levels;
                    const Trajectory t =
                        simulate_spinlock_at(c, d, detuning, f.anharmonicity, rates, final_time);
                    return readout_p1(seq, t.series(kSeriesPlus).back());
                };
                if (!cycle) return run(cfg.sequence);
                return phase_cycle_combine(run(Sequence::S1), run(Sequence::S2));
            };
            auto baseline_for = [&](CouplingKind kind) {
                DefectSpec free{"", kind, Ghz{1.0}, Mhz{0.0}, PerUs{1.0}};
                const int levels =
                    kind == CouplingKind::LinearCharge ? linear_levels : nonlinear_levels;
                return measure(free, Mhz{0.0}, levels);
            };

            std::optional<double> base_linear, base_nonlinear;
            auto baseline_of = [&](CouplingKind kind) {
                auto& slot = kind == CouplingKind::LinearCharge ? base_linear : base_nonlinear;
                if (!slot) slot = baseline_for(kind);
                return *slot;
            };

            double best_dev = -1.0;
            double value = 0.0;
            double base = 0.0;
            int best = -1;
            for (std::size_t k = 0; k < catalog.size(); ++k) {
                const DefectSpec& d = catalog[k];
                const int levels =
                    d.kind == CouplingKind::LinearCharge ? linear_levels : nonlinear_levels;
                const double v = measure(d, defect_detuning(d, f.omega01), levels);
                const double b = baseline_of(d.kind);
                if (std::abs(v - b) > best_dev) {
                    best_dev = std::abs(v - b);
                    value = v;
                    base = b;
                    best = static_cast<int>(k);
                }
            }
            if (best < 0) {
                base = baseline_of(CouplingKind::LinearCharge);
                value = base;
            }
            map.values[cell] = value;
            map.baseline[cell] = base;
            map.dominant_defect[cell] = best;
        } catch (const NumericalError& e) {
            throw InstabilityError("sweep failed at " + coords(flux_grid[i_flux], omega_grid[i_omega]) +
                                   ": " + e.what());
        } catch (const InputError& e) {
            throw ContractError("sweep failed at " + coords(flux_grid[i_flux], omega_grid[i_omega]) +
                                ": " + e.what());
        }
    });
    return map;
}

LineSet predict_lines(const QubitDeviceParams& p, const DefectCatalog& catalog,
                      const std::vector<double>& flux_grid) {
    const QubitFrequencyModel model(p);
    std::vector<Ghz> omega_q;
    omega_q.reserve(flux_grid.size());
    for (double f : flux_grid) omega_q.push_back(model.at(FluxBias{f}).omega01);

    LineSet out;
    out.flux_grid = flux_grid;
    for (const DefectSpec& d : catalog) {
        DefectLine line;
        line.name = d.name;
        line.kind = d.kind;
        for (const Ghz& w : omega_q) {
            const double delta = defect_detuning(d, w).value;
            line.detuning_mhz.push_back(delta);
            line.omega_mhz.push_back(std::abs(delta));
        }
        for (std::size_t i = 0; i + 1 < flux_grid.size(); ++i) {
            const double a = line.detuning_mhz[i];
            const double b = line.detuning_mhz[i + 1];
            if (a == 0.0) {
                line.zero_crossings.push_back(flux_grid[i]);
            } else if (a * b < 0.0) {
                const double t = a / (a - b);
                line.zero_crossings.push_back(flux_grid[i] + t * (flux_grid[i + 1] - flux_grid[i]));
            }
        }
        if (!flux_grid.empty() && line.detuning_mhz.back() == 0.0) {
            line.zero_crossings.push_back(flux_grid.back());
        }
        out.lines.push_back(std::move(line));
    }
    return out;
}

std::vector<double> rabi_amplitude_model(const std::vector<double>& amplitudes, double slope_mhz) {
    if (!(slope_mhz > 0.0)) throw DomainError("Rabi calibration slope must be > 0 MHz/unit");
    std::vector<double> out;
    out.reserve(amplitudes.size());
    for (double a : amplitudes) out.push_back(slope_mhz * a);
    return out;
}

double fit_rabi_slope(const std::vector<double>& amplitudes, const std::vector<double>& omega_mhz) {
    if (amplitudes.size() != omega_mhz.size() || amplitudes.empty()) {
        throw ShapeError("fit_rabi_slope: amplitude and frequency lists differ in length");
    }
    const double sxy = std::inner_product(amplitudes.begin(), amplitudes.end(), omega_mhz.begin(), 0.0);
    const double sxx = std::inner_product(amplitudes.begin(), amplitudes.end(), amplitudes.begin(), 0.0);
    if (sxx == 0.0) throw DomainError("fit_rabi_slope: all amplitudes are zero");
    return sxy / sxx;
}

Trajectory simulate_rabi(const QubitDeviceParams& p, const DefectSpec& defect, Mhz omega,
                         Mhz detuning, double tmax_us, const RabiOptions& opts) {
    if (!(opts.dt_us > 0.0) || !(tmax_us > 0.0)) throw DomainError("simulate_rabi: tmax and dt must be > 0");
    HilbertSpec spec = opts.spec;
    spec.validate();
    if (defect.kind == CouplingKind::NonlinearCurrent && spec.qubit_levels < 3) {
        throw DimensionError("simulate_rabi: nonlinear defect needs qubit_levels >= 3");
    }
    const Ghz a = opts.anharmonicity ? *opts.anharmonicity
                                     : QubitFrequencyModel(p).at(FluxBias{0.5}).anharmonicity;
    const Operator h = defect.kind == CouplingKind::LinearCharge
                           ? h_rot_linear(a, omega, detuning, defect.g, spec)
                           : h_rot_nonlinear(a, omega, detuning, defect.g, spec);
    const int levels = spec.qubit_levels;
    const DensityMatrix rho0 = DensityMatrix::from_pure(
        tensor(StateVector::basis(levels, 0), StateVector::basis(2, kTlsGround)));
    const int points = static_cast<int>(std::lround(tmax_us / opts.dt_us)) + 1;
    Trajectory traj = propagate(rho0, liouvillian(h, qubit_defect_collapse(levels, {p.gamma1q, p.gamma2q}, defect.gamma1)),
                                uniform_times(tmax_us, points));
    traj.populations[kSeriesGround] = population(traj, system_projectors(levels).ground);
    return traj;
}

}  // namespace tlsscope
