#include "tlsscope/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tlsscope/errors.hpp"

#ifndef TLSSCOPE_PRESET_DIR
#define TLSSCOPE_PRESET_DIR "presets"
#endif

namespace tlsscope {

namespace {

using nlohmann::json;

constexpr const char* kUnitSuffixes[] = {"_ghz", "_mhz", "_per_us", "_us", "_phi0"};

std::string unit_stem(const std::string& key) {
    for (const char* s : kUnitSuffixes) {
        const std::string suffix(s);
        if (key.size() > suffix.size() && key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0) {
            return key.substr(0, key.size() - suffix.size());
        }
    }
    return key;
}

// Reads the keys of one JSON object, recording every problem instead of
// stopping at the first.
class Section {
public:
    Section(const json& j, std::string where, std::vector<std::string>& errors)
        : j_(j), where_(std::move(where)), errors_(errors) {
        if (!j_.is_object()) error("must be an object");
    }

    bool has(const std::string& key) {
        known_.insert(key);
        return j_.is_object() && j_.contains(key);
    }

    template <class T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            error("'" + key + "' has the wrong type");
        }
    }

    template <class T>
    void read(const std::string& key, std::optional<T>& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            error("'" + key + "' has the wrong type");
        }
    }

    template <class Unit>
    void read_unit(const std::string& key, Unit& out) {
        double v = out.value;
        read(key, v);
        out.value = v;
    }

    template <class Unit>
    void read_unit(const std::string& key, std::optional<Unit>& out) {
        std::optional<double> v;
        read(key, v);
        if (v) out = Unit{*v};
    }

    const json* child(const std::string& key) {
        if (!has(key)) return nullptr;
        return &j_.at(key);
    }

    void error(const std::string& msg) { errors_.push_back(where_ + ": " + msg); }

    // Unknown keys are errors; a key that only differs in its unit suffix is
    // reported as a unit mismatch.
    void finish() {
        if (!j_.is_object()) return;
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            const std::string& key = it.key();
            if (known_.count(key)) continue;
            std::string hint;
            for (const auto& k : known_) {
                if (unit_stem(k) == unit_stem(key) && k != key) hint = k;
            }
            if (!hint.empty()) {
                error("unit mismatch: '" + key + "' is not accepted, expected '" + hint + "'");
            } else {
                error("unknown key '" + key + "'");
            }
        }
    }

    const std::string& where() const { return where_; }

private:
    const json& j_;
    std::string where_;
    std::vector<std::string>& errors_;
    std::set<std::string> known_;
};

void read_grid(Section& parent, const std::string& key, GridSpec& grid,
               std::vector<std::string>& errors) {
    const json* j = parent.child(key);
    if (j == nullptr) return;
    Section s(*j, parent.where() + "." + key, errors);
    s.read("start", grid.start);
    s.read("stop", grid.stop);
    s.read("points", grid.points);
    s.read("log", grid.log_spaced);
    s.finish();
    if (grid.points < 1) s.error("points must be >= 1");
    if (grid.stop < grid.start) s.error("stop must be >= start");
    if (grid.log_spaced && !(grid.start > 0.0)) s.error("log-spaced grids need start > 0");
}

template <class Enum, class Parser>
void read_enum(Section& s, const std::string& key, Enum& out, Parser parse) {
    std::optional<std::string> text;
    s.read(key, text);
    if (!text) return;
    const auto v = parse(*text);
    if (!v) {
        s.error("'" + key + "' has invalid value '" + *text + "'");
        return;
    }
    out = *v;
}

void read_device(Section& s, QubitDeviceParams& d) {
    s.read_unit("e_cs_ghz", d.e_cs);
    s.read_unit("e_j_ghz", d.e_j);
    s.read_unit("e_c_ghz", d.e_c);
    s.read("alpha", d.alpha);
    s.read_unit("gamma1q_per_us", d.gamma1q);
    s.read_unit("gamma2q_per_us", d.gamma2q);
    s.read_unit("sweet_spot_omega01_ghz", d.sweet_spot_omega01);
    s.read_unit("sweet_spot_anharmonicity_ghz", d.sweet_spot_anharmonicity);
    s.finish();
    for (const auto& v : d.violations()) s.error(v);
}

void read_defects(const json& j, DefectCatalog& catalog, std::vector<std::string>& errors) {
    if (!j.is_array()) {
        errors.push_back("defects: must be an array");
        return;
    }
    std::set<std::string> names;
    for (std::size_t k = 0; k < j.size(); ++k) {
        Section s(j[k], "defects[" + std::to_string(k) + "]", errors);
        DefectSpec d;
        s.read("name", d.name);
        read_enum(s, "kind", d.kind, [](const std::string& t) { return parse_coupling_kind(t); });
        s.read_unit("omega_tls_ghz", d.omega_tls);
        s.read_unit("g_mhz", d.g);
        s.read_unit("gamma1tls_per_us", d.gamma1);
        s.finish();
        if (d.name.empty()) s.error("name is required");
        if (!names.insert(d.name).second) s.error("duplicate defect name '" + d.name + "'");
        for (const auto& v : d.violations()) s.error(v);
        catalog.push_back(std::move(d));
    }
}

void read_drive(Section& s, RunConfig& cfg) {
    SpinLockConfig& d = cfg.drive;
    read_enum(s, "sequence", d.sequence, [](const std::string& t) { return parse_sequence(t); });
    s.read_unit("omega_mhz", d.omega);
    s.read("tau_us", d.tau_us);
    s.read("time_points", d.time_points);
    s.read("qubit_levels", d.spec.qubit_levels);
    int tls_levels = HilbertSpec::tls_levels;
    s.read("tls_levels", tls_levels);
    s.read("phase_cycle", cfg.phase_cycle);
    s.finish();
    try {
        d.validate();
    } catch (const InputError& e) {
        s.error(e.what());
    }
    if (tls_levels != HilbertSpec::tls_levels) s.error("tls_levels must be 2");
}

void read_simulate(Section& s, SimulateSpec& sim) {
    s.read("defect", sim.defect);
    s.read("detunings_mhz", sim.detunings_mhz);
    s.read("flux_phi0", sim.flux_phi0);
    s.read_unit("anharmonicity_ghz", sim.anharmonicity);
    s.read("surrogate", sim.surrogate);
    s.finish();
    if (sim.anharmonicity && !(sim.anharmonicity->value > 0.0)) s.error("anharmonicity must be > 0 GHz");
}

void read_rabi(Section& s, RabiSpec& r) {
    s.read("defect", r.defect);
    s.read("omegas_mhz", r.omegas_mhz);
    s.read_unit("detuning_mhz", r.detuning);
    s.read("tmax_us", r.tmax_us);
    s.read("dt_us", r.dt_us);
    s.finish();
    if (r.omegas_mhz.empty()) s.error("omegas_mhz must not be empty");
    if (!(r.tmax_us > 0.0)) s.error("tmax_us must be > 0");
    if (!(r.dt_us > 0.0) || r.dt_us > r.tmax_us) s.error("dt_us must be in (0, tmax_us]");
}

void read_synthetic(Section& s, SyntheticSpec& syn) {
    s.read_unit("g_mhz", syn.g);
    s.read_unit("gamma1tls_per_us", syn.gamma1tls);
    s.read_unit("delta_mhz", syn.delta);
    s.read("delta_omegas_mhz", syn.delta_omegas_mhz);
    read_enum(s, "sequence", syn.sequence, [](const std::string& t) { return parse_sequence(t); });
    s.read_unit("gamma1q_per_us", syn.gamma1q);
    s.read_unit("gamma2q_per_us", syn.gamma2q);
    s.read("noise_sigma", syn.noise_sigma);
    s.read("tau_us", syn.tau_us);
    s.read("time_points", syn.time_points);
    s.finish();
    if (!(syn.g.value > 0.0)) s.error("g must be > 0 MHz");
    if (!(syn.gamma1tls.value > 0.0)) s.error("gamma1tls must be > 0 per us");
    if (syn.noise_sigma < 0.0) s.error("noise_sigma must be >= 0");
    if (!(syn.tau_us > 0.0)) s.error("tau_us must be > 0");
    if (syn.time_points < 2) s.error("time_points must be >= 2");
    if (syn.delta_omegas_mhz.empty()) s.error("delta_omegas_mhz must not be empty");
    for (double d : syn.delta_omegas_mhz) {
        if (syn.delta.value - d < 0.0) s.error("delta_omega leaves a negative drive frequency");
    }
}

void read_estimation(Section& s, EstimationSpec& est, const std::filesystem::path& base_dir,
                     std::vector<std::string>& errors) {
    read_enum(s, "kind", est.model.kind, [](const std::string& t) { return parse_coupling_kind(t); });
    s.read_unit("anharmonicity_ghz", est.model.anharmonicity);
    s.read("qubit_levels", est.model.spec.qubit_levels);
    read_grid(s, "g_mhz", est.g_grid, errors);
    read_grid(s, "gamma1tls_per_us", est.gamma_grid, errors);
    s.read("region_factor", est.factor);
    std::vector<std::string> files;
    s.read("datasets", files);
    if (const json* syn = s.child("synthetic")) {
        Section ss(*syn, s.where() + ".synthetic", errors);
        SyntheticSpec spec;
        read_synthetic(ss, spec);
        est.synthetic = spec;
    }
    s.finish();
    try {
        est.model.spec.validate();
    } catch (const InputError& e) {
        s.error(e.what());
    }
    if (est.model.kind == CouplingKind::NonlinearCurrent && est.model.spec.qubit_levels < 3) {
        s.error("nonlinear model needs qubit_levels >= 3");
    }
    if (!(est.factor > 1.0)) s.error("region_factor must be > 1");
    if (!(est.g_grid.start > 0.0) || !(est.gamma_grid.start > 0.0)) s.error("grid values must be > 0");
    for (const auto& f : files) {
        std::filesystem::path p(f);
        if (p.is_relative()) p = base_dir / p;
        if (!std::filesystem::exists(p)) s.error("dataset file '" + p.string() + "' does not exist");
        est.datasets.push_back(p);
    }
}

}  // namespace

std::vector<double> GridSpec::values() const {
    if (log_spaced) return log_grid(start, stop, points);
    if (points == 1) return {start};
    std::vector<double> v(static_cast<std::size_t>(points));
    const double h = (stop - start) / (points - 1);
    for (int k = 0; k < points; ++k) v[static_cast<std::size_t>(k)] = start + k * h;
    v.back() = stop;
    return v;
}

const DefectSpec& RunConfig::defect(const std::string& name) const {
    if (catalog.empty()) throw RangeError("config has no defects");
    if (name.empty()) return catalog.front();
    for (const auto& d : catalog) {
        if (d.name == name) return d;
    }
    throw RangeError("no defect named '" + name + "' in the catalog");
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    }
    std::vector<std::string> errors;
    RunConfig cfg;
    Section top(root, "config", errors);
    if (const json* j = top.child("device")) {
        Section s(*j, "device", errors);
        read_device(s, cfg.device);
    }
    if (const json* j = top.child("defects")) read_defects(*j, cfg.catalog, errors);
    if (const json* j = top.child("drive")) {
        Section s(*j, "drive", errors);
        read_drive(s, cfg);
    }
    if (const json* j = top.child("grids")) {
        Section s(*j, "grids", errors);
        read_grid(s, "flux_phi0", cfg.flux_grid, errors);
        read_grid(s, "omega_mhz", cfg.omega_grid, errors);
        read_grid(s, "spectrum_flux_phi0", cfg.spectrum_flux, errors);
        s.finish();
    }
    if (const json* j = top.child("simulate")) {
        Section s(*j, "simulate", errors);
        read_simulate(s, cfg.simulate);
    }
    if (const json* j = top.child("rabi")) {
        Section s(*j, "rabi", errors);
        read_rabi(s, cfg.rabi);
    }
    if (const json* j = top.child("estimation")) {
        Section s(*j, "estimation", errors);
        read_estimation(s, cfg.estimation, base_dir, errors);
    }
    if (const json* j = top.child("output")) {
        Section s(*j, "output", errors);
        std::string dir = cfg.output_dir.string();
        s.read("dir", dir);
        s.finish();
        cfg.output_dir = dir;
    }
    std::string description;
    top.read("description", description);
    top.finish();

    auto check_defect_ref = [&](const std::string& where, const std::string& name) {
        if (name.empty()) return;
        const bool found = std::any_of(cfg.catalog.begin(), cfg.catalog.end(),
                                       [&](const DefectSpec& d) { return d.name == name; });
        if (!found) errors.push_back(where + ": defect '" + name + "' is not in the catalog");
    };
    check_defect_ref("simulate", cfg.simulate.defect);
    check_defect_ref("rabi", cfg.rabi.defect);

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError({"cannot read config file '" + path.string() + "'"});
    std::ostringstream ss;
    ss << is.rdbuf();
    RunConfig cfg = parse_config_text(ss.str(), path.parent_path());
    cfg.source = path.string();
    return cfg;
}

std::filesystem::path preset_dir() { return TLSSCOPE_PRESET_DIR; }

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    if (!std::filesystem::is_directory(preset_dir())) return out;
    for (const auto& e : std::filesystem::directory_iterator(preset_dir())) {
        if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::filesystem::path preset_path(const std::string& name) {
    const auto p = preset_dir() / (name + ".json");
    if (!std::filesystem::exists(p)) {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw RangeError("unknown preset '" + name + "' (available: " + known + ")");
    }
    return p;
}

}  // namespace tlsscope
