#include "tlsscope/table_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tlsscope/errors.hpp"

namespace tlsscope {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) out.push_back(trim(field));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_number(const std::string& text, std::size_t line_no) {
    if (text.empty()) throw ShapeError("line " + std::to_string(line_no) + ": empty numeric field");
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) {
        throw ShapeError("line " + std::to_string(line_no) + ": not a number '" + text + "'");
    }
    return v;
}

// Unique values in order of first appearance.
std::vector<double> distinct(const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v) {
        bool seen = false;
        for (double y : out) seen = seen || (y == x);
        if (!seen) out.push_back(x);
    }
    return out;
}

void require_rows(const Table& t, std::size_t n) {
    if (t.rows.size() != n) {
        throw ShapeError("schema " + t.schema + ": expected " + std::to_string(n) + " rows, got " +
                         std::to_string(t.rows.size()));
    }
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

void Table::set_meta(const std::string& key, const std::string& value) {
    for (auto& [k, v] : meta) {
        if (k == key) {
            v = value;
            return;
        }
    }
    meta.emplace_back(key, value);
}

void Table::set_meta(const std::string& key, double value) { set_meta(key, format_number(value)); }

std::optional<std::string> Table::find_meta(const std::string& key) const {
    for (const auto& [k, v] : meta) {
        if (k == key) return v;
    }
    return std::nullopt;
}

const std::string& Table::meta_value(const std::string& key) const {
    for (const auto& [k, v] : meta) {
        if (k == key) return v;
    }
    throw RangeError("schema " + schema + ": missing metadata key '" + key + "'");
}

double Table::meta_number(const std::string& key) const { return parse_number(meta_value(key), 0); }

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw RangeError("schema " + schema + ": missing column '" + name + "'");
}

std::vector<double> Table::column_values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_table(std::ostream& os, const Table& t) {
    os << "# schema=" << t.schema << " version=" << t.version << '\n';
    for (const auto& [k, v] : t.meta) os << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
        os << '\n';
    }
}

void write_table(const std::filesystem::path& path, const Table& t) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw RangeError("cannot open '" + path.string() + "' for writing");
    write_table(os, t);
    if (!os) throw RangeError("failed writing '" + path.string() + "'");
}

Table read_table(std::istream& is) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw ShapeError("empty table file");
    ++line_no;
    line = trim(line);
    if (line.rfind("# schema=", 0) != 0) throw ShapeError("line 1: expected '# schema=<name> version=1'");
    {
        std::istringstream hs(line.substr(2));
        std::string tok;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq);
            if (key == "schema") t.schema = tok.substr(eq + 1);
            if (key == "version") t.version = static_cast<int>(parse_number(tok.substr(eq + 1), 1));
        }
    }
    if (t.version != 1) throw ShapeError("unsupported table version " + std::to_string(t.version));

    bool have_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (!have_header && line[0] == '#') {
            const std::string body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            t.meta.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
            continue;
        }
        if (!have_header) {
            t.columns = split(line, ',');
            have_header = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != t.columns.size()) {
            throw ShapeError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(t.columns.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_number(f, line_no));
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw ShapeError("table has no header row");
    return t;
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw RangeError("cannot open '" + path.string() + "'");
    try {
        return read_table(is);
    } catch (const ShapeError& e) {
        throw ShapeError(path.string() + ": " + e.what());
    }
}

Table read_table(const std::filesystem::path& path, const std::string& schema) {
    Table t = read_table(path);
    if (t.schema != schema) {
        throw ShapeError(path.string() + ": expected schema '" + schema + "', found '" + t.schema + "'");
    }
    return t;
}

Table map_table(const SpectroscopyMap& m) {
    Table t;
    t.schema = "map";
    t.set_meta("sequence", std::string(to_string(m.sequence)));
    t.set_meta("phase_cycled", m.cycled ? "true" : "false");
    t.set_meta("tau_us", m.tau_us);
    t.set_meta("catalog_hash", hex64(m.catalog_hash));
    t.set_meta("n_flux", static_cast<double>(m.flux_grid.size()));
    t.set_meta("n_omega", static_cast<double>(m.omega_grid.size()));
    t.set_meta("value", m.cycled ? "phase-cycled P1" : "P_i+ of the prepared sequence");
    t.columns = {"flux_phi0", "omega_mhz", "value", "baseline", "dominant_defect"};
    for (std::size_t i = 0; i < m.flux_grid.size(); ++i) {
        for (std::size_t j = 0; j < m.omega_grid.size(); ++j) {
            const std::size_t k = i * m.omega_grid.size() + j;
            t.rows.push_back({m.flux_grid[i], m.omega_grid[j], m.values[k], m.baseline[k],
                              static_cast<double>(m.dominant_defect[k])});
        }
    }
    return t;
}

SpectroscopyMap map_from_table(const Table& t) {
    SpectroscopyMap m;
    m.flux_grid = distinct(t.column_values("flux_phi0"));
    m.omega_grid = distinct(t.column_values("omega_mhz"));
    require_rows(t, m.flux_grid.size() * m.omega_grid.size());
    m.values = t.column_values("value");
    m.baseline = t.column_values("baseline");
    for (double d : t.column_values("dominant_defect")) m.dominant_defect.push_back(static_cast<int>(d));
    const auto seq = parse_sequence(t.meta_value("sequence"));
    if (!seq) throw ShapeError("map: bad sequence '" + t.meta_value("sequence") + "'");
    m.sequence = *seq;
    m.cycled = t.meta_value("phase_cycled") == "true";
    m.tau_us = t.meta_number("tau_us");
    m.catalog_hash = std::stoull(t.meta_value("catalog_hash"), nullptr, 16);
    return m;
}

Table lines_table(const LineSet& lines) {
    Table t;
    t.schema = "lines";
    t.set_meta("n_defects", static_cast<double>(lines.lines.size()));
    for (std::size_t d = 0; d < lines.lines.size(); ++d) {
        const DefectLine& l = lines.lines[d];
        std::string crossings;
        for (std::size_t k = 0; k < l.zero_crossings.size(); ++k) {
            crossings += (k ? ";" : "") + format_number(l.zero_crossings[k]);
        }
        t.set_meta("defect." + std::to_string(d), l.name + " " + std::string(to_string(l.kind)));
        t.set_meta("defect." + std::to_string(d) + ".zero_crossings_phi0", crossings);
    }
    t.columns = {"defect", "flux_phi0", "omega_mhz", "detuning_mhz"};
    for (std::size_t d = 0; d < lines.lines.size(); ++d) {
        for (std::size_t i = 0; i < lines.flux_grid.size(); ++i) {
            t.rows.push_back({static_cast<double>(d), lines.flux_grid[i], lines.lines[d].omega_mhz[i],
                              lines.lines[d].detuning_mhz[i]});
        }
    }
    return t;
}

LineSet lines_from_table(const Table& t) {
    LineSet out;
    const auto n = static_cast<std::size_t>(t.meta_number("n_defects"));
    out.flux_grid = distinct(t.column_values("flux_phi0"));
    require_rows(t, n * out.flux_grid.size());
    const std::size_t c_om = t.column("omega_mhz");
    const std::size_t c_de = t.column("detuning_mhz");
    for (std::size_t d = 0; d < n; ++d) {
        DefectLine l;
        std::istringstream hs(t.meta_value("defect." + std::to_string(d)));
        std::string kind;
        hs >> l.name >> kind;
        const auto k = parse_coupling_kind(kind);
        if (!k) throw ShapeError("lines: bad coupling kind '" + kind + "'");
        l.kind = *k;
        for (const auto& c : split(t.meta_value("defect." + std::to_string(d) + ".zero_crossings_phi0"), ';')) {
            if (!c.empty()) l.zero_crossings.push_back(parse_number(c, 0));
        }
        for (std::size_t i = 0; i < out.flux_grid.size(); ++i) {
            const auto& row = t.rows[d * out.flux_grid.size() + i];
            l.omega_mhz.push_back(row[c_om]);
            l.detuning_mhz.push_back(row[c_de]);
        }
        out.lines.push_back(std::move(l));
    }
    return out;
}

Table trajectory_table(const Trajectory& traj, const std::vector<std::string>& series) {
    Table t;
    t.schema = "trajectory";
    t.columns = {"t_us"};
    for (const auto& s : series) t.columns.push_back("p_" + s);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::vector<double> row{traj.times[k]};
        for (const auto& s : series) row.push_back(traj.series(s)[k]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table surface_table(const ResidualSurface& s) {
    Table t;
    t.schema = "surface";
    t.set_meta("n_g", static_cast<double>(s.g_grid.size()));
    t.set_meta("n_gamma", static_cast<double>(s.gamma_grid.size()));
    t.set_meta("sigma_min", s.sigma_min);
    t.set_meta("argmin_g_mhz", s.argmin_g_mhz());
    t.set_meta("argmin_gamma1tls_per_us", s.argmin_gamma_per_us());
    t.columns = {"g_mhz", "gamma1tls_per_us", "sigma"};
    for (std::size_t i = 0; i < s.g_grid.size(); ++i) {
        for (std::size_t j = 0; j < s.gamma_grid.size(); ++j) {
            t.rows.push_back({s.g_grid[i], s.gamma_grid[j], s.at(i, j)});
        }
    }
    return t;
}

ResidualSurface surface_from_table(const Table& t) {
    ResidualSurface s;
    s.g_grid = distinct(t.column_values("g_mhz"));
    s.gamma_grid = distinct(t.column_values("gamma1tls_per_us"));
    require_rows(t, s.g_grid.size() * s.gamma_grid.size());
    s.sigma = t.column_values("sigma");
    s.sigma_min = s.sigma.front();
    for (std::size_t k = 0; k < s.sigma.size(); ++k) {
        if (s.sigma[k] < s.sigma_min) {
            s.sigma_min = s.sigma[k];
            s.argmin_g = k / s.gamma_grid.size();
            s.argmin_gamma = k % s.gamma_grid.size();
        }
    }
    return s;
}

Table region_table(const ParamRegion& r) {
    Table t;
    t.schema = "region";
    std::string th;
    for (std::size_t k = 0; k < r.thresholds.size(); ++k) th += (k ? ";" : "") + format_number(r.thresholds[k]);
    t.set_meta("sigma_thresholds", th);
    t.set_meta("cells_inside", static_cast<double>(r.count()));
    t.columns = {"g_mhz", "gamma1tls_per_us", "inside"};
    for (std::size_t i = 0; i < r.g_grid.size(); ++i) {
        for (std::size_t j = 0; j < r.gamma_grid.size(); ++j) {
            t.rows.push_back({r.g_grid[i], r.gamma_grid[j], r.at(i, j) ? 1.0 : 0.0});
        }
    }
    return t;
}

ParamRegion region_from_table(const Table& t) {
    ParamRegion r;
    r.g_grid = distinct(t.column_values("g_mhz"));
    r.gamma_grid = distinct(t.column_values("gamma1tls_per_us"));
    require_rows(t, r.g_grid.size() * r.gamma_grid.size());
    for (double v : t.column_values("inside")) r.mask.push_back(v != 0.0 ? 1 : 0);
    for (const auto& c : split(t.meta_value("sigma_thresholds"), ';')) {
        if (!c.empty()) r.thresholds.push_back(parse_number(c, 0));
    }
    return r;
}

Table dataset_table(const DecayDataset& d) {
    Table t;
    t.schema = "dataset";
    t.set_meta("omega_mhz", d.meta.omega.value);
    t.set_meta("delta_mhz", d.meta.delta.value);
    t.set_meta("sequence", std::string(to_string(d.meta.sequence)));
    t.set_meta("gamma1q_per_us", d.meta.gamma1q.value);
    t.set_meta("gamma2q_per_us", d.meta.gamma2q.value);
    t.set_meta("observable", d.meta.sequence == Sequence::S1 ? "P_i+" : "P_i-");
    t.columns = {"t_us", "population"};
    for (std::size_t k = 0; k < d.times_us.size(); ++k) t.rows.push_back({d.times_us[k], d.populations[k]});
    return t;
}

DecayDataset dataset_from_table(const Table& t) {
    DecayDataset d;
    d.meta.omega = Mhz{t.meta_number("omega_mhz")};
    d.meta.delta = Mhz{t.meta_number("delta_mhz")};
    const auto seq = parse_sequence(t.meta_value("sequence"));
    if (!seq) throw ShapeError("dataset: bad sequence '" + t.meta_value("sequence") + "'");
    d.meta.sequence = *seq;
    d.meta.gamma1q = PerUs{t.meta_number("gamma1q_per_us")};
    d.meta.gamma2q = PerUs{t.meta_number("gamma2q_per_us")};
    d.times_us = t.column_values("t_us");
    d.populations = t.column_values("population");
    d.validate();
    return d;
}

}  // namespace tlsscope
