#include "tlsscope/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "tlsscope/config.hpp"
#include "tlsscope/diagnostics.hpp"
#include "tlsscope/errors.hpp"
#include "tlsscope/table_io.hpp"

namespace tlsscope {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string config;
    std::string preset;
    std::string out;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

struct Context {
    RunConfig cfg;
    Options opts;
    fs::path out;

    fs::path file(const std::string& name) const { return out / name; }
};

Context load(const Options& opts) {
    Context ctx;
    ctx.opts = opts;
    if (!opts.config.empty() && !opts.preset.empty()) {
        throw ConfigError({"--config and --preset are mutually exclusive"});
    }
    if (!opts.config.empty()) {
        ctx.cfg = parse_config(opts.config);
    } else if (!opts.preset.empty()) {
        ctx.cfg = parse_config(preset_path(opts.preset));
    }
    ctx.out = opts.out.empty() ? ctx.cfg.output_dir : fs::path(opts.out);
    if (opts.workers == 0) throw ConfigError({"--workers must be >= 1"});
    return ctx;
}

void emit(const fs::path& path, Table t, const Context& ctx, const std::string& command) {
    t.meta.insert(t.meta.begin(), {"command", command});
    if (!ctx.cfg.source.empty()) {
        t.meta.insert(t.meta.begin() + 1, {"config", fs::path(ctx.cfg.source).filename().string()});
    }
    write_table(path, t);
    std::cout << "wrote " << path.string() << '\n';
}

void add_device_meta(Table& t, const QubitDeviceParams& d) {
    t.set_meta("e_cs_ghz", d.e_cs.value);
    t.set_meta("e_j_ghz", d.e_j.value);
    t.set_meta("alpha", d.alpha);
    t.set_meta("gamma1q_per_us", d.gamma1q.value);
    t.set_meta("gamma2q_per_us", d.gamma2q.value);
    if (d.sweet_spot_omega01) t.set_meta("sweet_spot_omega01_ghz", d.sweet_spot_omega01->value);
    if (d.sweet_spot_anharmonicity) {
        t.set_meta("sweet_spot_anharmonicity_ghz", d.sweet_spot_anharmonicity->value);
    }
}

void add_defect_meta(Table& t, const DefectSpec& d) {
    t.set_meta("defect", d.name);
    t.set_meta("coupling", std::string(to_string(d.kind)));
    t.set_meta("omega_tls_ghz", d.omega_tls.value);
    t.set_meta("g_mhz", d.g.value);
    t.set_meta("gamma1tls_per_us", d.gamma1.value);
}

std::vector<std::string> drive_series(int levels) {
    std::vector<std::string> s{kSeriesPlus, kSeriesMinus};
    if (levels > 2) s.push_back(kSeriesLeak);
    return s;
}

int cmd_spectrum(const Context& ctx) {
    const QubitFrequencyModel model(ctx.cfg.device);
    Table t;
    t.schema = "spectrum";
    add_device_meta(t, ctx.cfg.device);
    t.set_meta("frequencies", "exact charge-basis diagonalization, E/h in GHz");
    t.columns = {"flux_phi0", "omega01_ghz", "omega12_ghz", "anharmonicity_ghz", "charge_cutoff",
                 "model_omega01_ghz", "model_anharmonicity_ghz"};
    for (double f : ctx.cfg.spectrum_flux.values()) {
        const DerivedQubitFreqs raw = csfq_frequencies(ctx.cfg.device, FluxBias{f});
        const DerivedQubitFreqs m = model.at(FluxBias{f});
        t.rows.push_back({f, raw.omega01.value, raw.omega12.value, raw.anharmonicity.value,
                          static_cast<double>(raw.charge_cutoff), m.omega01.value,
                          m.anharmonicity.value});
    }
    emit(ctx.file("spectrum.csv"), std::move(t), ctx, "spectrum");
    return kExitOk;
}

int cmd_simulate(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const DefectSpec& defect = cfg.defect(cfg.simulate.defect);
    const QubitFrequencyModel model(cfg.device);
    const DerivedQubitFreqs sweet = model.at(FluxBias{0.5});
    const Ghz a = cfg.simulate.anharmonicity.value_or(sweet.anharmonicity);
    const QubitRates rates{cfg.device.gamma1q, cfg.device.gamma2q};

    SpinLockConfig drive = cfg.drive;
    if (defect.kind == CouplingKind::NonlinearCurrent && drive.spec.qubit_levels < 3) {
        drive.spec.qubit_levels = 3;
    }
    std::vector<double> detunings = cfg.simulate.detunings_mhz;
    if (cfg.simulate.flux_phi0) {
        const DerivedQubitFreqs q = model.at(FluxBias{*cfg.simulate.flux_phi0});
        detunings.push_back(defect_detuning(defect, q.omega01).value);
    }
    if (detunings.empty()) throw ConfigError({"simulate: give detunings_mhz or flux_phi0"});

    for (std::size_t k = 0; k < detunings.size(); ++k) {
        const Mhz delta{detunings[k]};
        const Trajectory traj = simulate_spinlock(drive, defect, delta, a, rates);
        Table t = trajectory_table(traj, drive_series(drive.spec.qubit_levels));
        add_device_meta(t, cfg.device);
        add_defect_meta(t, defect);
        t.set_meta("sequence", std::string(to_string(drive.sequence)));
        t.set_meta("omega_mhz", drive.omega.value);
        t.set_meta("detuning_mhz", delta.value);
        t.set_meta("anharmonicity_ghz", a.value);
        t.set_meta("qubit_levels", static_cast<double>(drive.spec.qubit_levels));
        t.set_meta("tau_us", drive.tau_us);
        t.set_meta("baseline", "[1+exp(-gamma1q t/2)]/2");
        emit(ctx.file("trajectory_" + std::to_string(k) + ".csv"), std::move(t), ctx, "simulate");

        if (cfg.simulate.surrogate && defect.kind == CouplingKind::NonlinearCurrent) {
            const Mhz g_eff = g_eff_virtual(defect.g, drive.omega, a);
            SpinLockConfig two = drive;
            two.spec.qubit_levels = 2;
            const Trajectory s = simulate_spinlock_surrogate(two, g_eff, delta, defect.gamma1, rates);
            Table ts = trajectory_table(s, drive_series(2));
            add_defect_meta(ts, defect);
            ts.set_meta("model", "two-level virtual-transition surrogate");
            ts.set_meta("g_eff_mhz", g_eff.value);
            ts.set_meta("sequence", std::string(to_string(drive.sequence)));
            ts.set_meta("omega_mhz", drive.omega.value);
            ts.set_meta("detuning_mhz", delta.value);
            emit(ctx.file("surrogate_" + std::to_string(k) + ".csv"), std::move(ts), ctx, "simulate");
        }
    }
    return kExitOk;
}

Table predicted_lines(const Context& ctx) {
    const LineSet lines = predict_lines(ctx.cfg.device, ctx.cfg.catalog, ctx.cfg.flux_grid.values());
    Table t = lines_table(lines);
    add_device_meta(t, ctx.cfg.device);
    return t;
}

int cmd_predict(const Context& ctx) {
    emit(ctx.file("lines.csv"), predicted_lines(ctx), ctx, "predict");
    return kExitOk;
}

int cmd_sweep(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const SpectroscopyMap m = sweep_map(cfg.device, cfg.catalog, cfg.flux_grid.values(),
                                        cfg.omega_grid.values(), cfg.drive, cfg.phase_cycle,
                                        ctx.opts.workers);
    Table t = map_table(m);
    add_device_meta(t, cfg.device);
    for (std::size_t k = 0; k < cfg.catalog.size(); ++k) {
        const DefectSpec& d = cfg.catalog[k];
        t.set_meta("defect." + std::to_string(k),
                   d.name + " " + std::string(to_string(d.kind)) + " omega_tls_ghz=" +
                       format_number(d.omega_tls.value) + " g_mhz=" + format_number(d.g.value) +
                       " gamma1tls_per_us=" + format_number(d.gamma1.value));
    }
    emit(ctx.file("map.csv"), std::move(t), ctx, "sweep");
    emit(ctx.file("lines.csv"), predicted_lines(ctx), ctx, "predict");
    return kExitOk;
}

std::vector<DecayDataset> synthetic_datasets(const Context& ctx, const SyntheticSpec& syn) {
    std::mt19937_64 rng(ctx.opts.seed);
    const std::vector<double> times = uniform_times(syn.tau_us, syn.time_points);
    std::vector<DecayDataset> out;
    for (double d_omega : syn.delta_omegas_mhz) {
        DatasetMeta meta;
        meta.delta = syn.delta;
        meta.omega = Mhz{syn.delta.value - d_omega};
        meta.sequence = syn.sequence;
        meta.gamma1q = syn.gamma1q;
        meta.gamma2q = syn.gamma2q;
        out.push_back(synthesize_dataset(meta, times, ctx.cfg.estimation.model, syn.g, syn.gamma1tls,
                                         syn.noise_sigma, rng));
    }
    return out;
}

int cmd_fit(const Context& ctx) {
    const EstimationSpec& est = ctx.cfg.estimation;
    std::vector<DecayDataset> datasets;
    for (const auto& p : est.datasets) datasets.push_back(dataset_from_table(read_table(p, "dataset")));
    if (est.synthetic) {
        const auto syn = synthetic_datasets(ctx, *est.synthetic);
        for (std::size_t k = 0; k < syn.size(); ++k) {
            Table t = dataset_table(syn[k]);
            t.set_meta("seed", std::to_string(ctx.opts.seed));
            t.set_meta("true_g_mhz", est.synthetic->g.value);
            t.set_meta("true_gamma1tls_per_us", est.synthetic->gamma1tls.value);
            t.set_meta("noise_sigma", est.synthetic->noise_sigma);
            emit(ctx.file("dataset_" + std::to_string(k) + ".csv"), std::move(t), ctx, "fit");
        }
        datasets.insert(datasets.end(), syn.begin(), syn.end());
    }
    if (datasets.empty()) throw ConfigError({"fit: no datasets (give estimation.datasets or estimation.synthetic)"});

    const EstimateResult r = estimate_defect(datasets, est.model, est.g_grid.values(),
                                             est.gamma_grid.values(), est.factor, ctx.opts.workers);
    Table summary;
    summary.schema = "fit-summary";
    summary.set_meta("coupling", std::string(to_string(est.model.kind)));
    summary.set_meta("region_factor", est.factor);
    summary.set_meta("bounded", r.bounded ? "true" : "false");
    summary.set_meta("overlap_cells", static_cast<double>(r.overlap.count()));
    summary.set_meta("overlap_empty", r.overlap.empty() ? "true" : "false");
    if (!r.overlap.empty()) {
        double g_lo = 1e300, g_hi = 0.0, gm_lo = 1e300, gm_hi = 0.0;
        for (std::size_t i = 0; i < r.overlap.g_grid.size(); ++i) {
            for (std::size_t j = 0; j < r.overlap.gamma_grid.size(); ++j) {
                if (!r.overlap.at(i, j)) continue;
                g_lo = std::min(g_lo, r.overlap.g_grid[i]);
                g_hi = std::max(g_hi, r.overlap.g_grid[i]);
                gm_lo = std::min(gm_lo, r.overlap.gamma_grid[j]);
                gm_hi = std::max(gm_hi, r.overlap.gamma_grid[j]);
            }
        }
        summary.set_meta("overlap_g_mhz_min", g_lo);
        summary.set_meta("overlap_g_mhz_max", g_hi);
        summary.set_meta("overlap_gamma1tls_per_us_min", gm_lo);
        summary.set_meta("overlap_gamma1tls_per_us_max", gm_hi);
    }
    if (est.synthetic) {
        const bool hit = r.overlap.contains(est.synthetic->g.value, est.synthetic->gamma1tls.value);
        summary.set_meta("truth_in_overlap", hit ? "true" : "false");
    }
    summary.columns = {"dataset", "omega_mhz", "delta_mhz", "delta_omega_mhz", "sigma_min",
                       "argmin_g_mhz", "argmin_gamma1tls_per_us", "purcell_rate_per_us",
                       "region_cells"};
    for (std::size_t k = 0; k < datasets.size(); ++k) {
        const ResidualSurface& s = r.surfaces[k];
        Table ts = surface_table(s);
        ts.set_meta("omega_mhz", datasets[k].meta.omega.value);
        ts.set_meta("delta_mhz", datasets[k].meta.delta.value);
        emit(ctx.file("surface_" + std::to_string(k) + ".csv"), std::move(ts), ctx, "fit");
        emit(ctx.file("region_" + std::to_string(k) + ".csv"), region_table(r.regions[k]), ctx, "fit");
        const Mhz g_best{s.argmin_g_mhz()};
        const double gamma_p = purcell_rate(
            est.model.kind == CouplingKind::NonlinearCurrent
                ? g_eff_virtual(g_best, datasets[k].meta.omega, est.model.anharmonicity)
                : Mhz{g_best.value / 2.0},
            PerUs{s.argmin_gamma_per_us()}).value;
        summary.rows.push_back({static_cast<double>(k), datasets[k].meta.omega.value,
                                datasets[k].meta.delta.value, datasets[k].meta.delta_omega().value,
                                s.sigma_min, s.argmin_g_mhz(), s.argmin_gamma_per_us(), gamma_p,
                                static_cast<double>(r.regions[k].count())});
    }
    Table overlap = region_table(r.overlap);
    overlap.set_meta("bounded", r.bounded ? "true" : "false");
    emit(ctx.file("overlap.csv"), std::move(overlap), ctx, "fit");
    emit(ctx.file("fit_summary.csv"), std::move(summary), ctx, "fit");
    return kExitOk;
}

int cmd_rabi(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const DefectSpec& defect = cfg.defect(cfg.rabi.defect);
    RabiOptions opts;
    opts.dt_us = cfg.rabi.dt_us;
    opts.spec = cfg.drive.spec;
    if (defect.kind == CouplingKind::NonlinearCurrent && opts.spec.qubit_levels < 3) opts.spec.qubit_levels = 3;
    opts.anharmonicity = cfg.simulate.anharmonicity;
    for (std::size_t k = 0; k < cfg.rabi.omegas_mhz.size(); ++k) {
        const Mhz omega{cfg.rabi.omegas_mhz[k]};
        const Trajectory traj = simulate_rabi(cfg.device, defect, omega, cfg.rabi.detuning, cfg.rabi.tmax_us, opts);
        Table t = trajectory_table(traj, {kSeriesGround});
        add_device_meta(t, cfg.device);
        add_defect_meta(t, defect);
        t.set_meta("omega_mhz", omega.value);
        t.set_meta("detuning_mhz", cfg.rabi.detuning.value);
        t.set_meta("initial_state", "|0>|g>");
        emit(ctx.file("rabi_" + std::to_string(k) + ".csv"), std::move(t), ctx, "rabi");
    }
    return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& argv) {
    CLI::App app{"Strong-drive spectroscopy of two-level defects in superconducting qubits", "tlsscope"};
    app.require_subcommand(1);
    Options opts;
    int (*handler)(const Context&) = nullptr;

    auto add = [&](const std::string& name, const std::string& help, int (*fn)(const Context&)) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.config, "JSON run configuration");
        sub->add_option("--preset", opts.preset, "bundled configuration name");
        sub->add_option("--out", opts.out, "output directory (overrides output.dir)");
        sub->add_option("--seed", opts.seed, "seed for all randomness")->capture_default_str();
        sub->add_option("--workers", opts.workers, "worker threads")->capture_default_str();
        sub->callback([&handler, fn] { handler = fn; });
    };
    add("spectrum", "qubit transition frequencies versus flux", cmd_spectrum);
    add("simulate", "spin-locking trajectories", cmd_simulate);
    add("sweep", "flux x drive-amplitude map plus predicted lines", cmd_sweep);
    add("predict", "predicted spectral lines", cmd_predict);
    add("fit", "residual-grid estimate of defect coupling and decay", cmd_fit);
    add("rabi", "Rabi-drive decay trajectories", cmd_rabi);

    std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        const Context ctx = load(opts);
        return handler(ctx);
    } catch (const ConfigError& e) {
        std::cerr << "config error:\n";
        for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
        return kExitInput;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

int run_command(int argc, const char* const* argv) {
    return run_command(std::vector<std::string>(argv, argv + argc));
}

}  // namespace tlsscope
