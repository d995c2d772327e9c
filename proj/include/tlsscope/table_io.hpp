#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tlsscope/estimation.hpp"
#include "tlsscope/spectroscopy.hpp"

namespace tlsscope {

// Comma-separated text table:
//   # schema=<name> version=1
//   # key=value          (metadata, units in the key or value)
//   col_a,col_b,...
//   1.00000000000,2,...  (12 significant digits)
struct Table {
    std::string schema;
    int version = 1;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void set_meta(const std::string& key, const std::string& value);
    void set_meta(const std::string& key, double value);
    std::optional<std::string> find_meta(const std::string& key) const;
    const std::string& meta_value(const std::string& key) const;  // RangeError when absent
    double meta_number(const std::string& key) const;
    std::size_t column(const std::string& name) const;  // RangeError when absent
    std::vector<double> column_values(const std::string& name) const;
};

std::string format_number(double v);

void write_table(std::ostream& os, const Table& t);
void write_table(const std::filesystem::path& path, const Table& t);
Table read_table(std::istream& is);
Table read_table(const std::filesystem::path& path);
// read_table plus a schema check.
Table read_table(const std::filesystem::path& path, const std::string& schema);

Table map_table(const SpectroscopyMap& m);
SpectroscopyMap map_from_table(const Table& t);

Table lines_table(const LineSet& lines);
LineSet lines_from_table(const Table& t);

Table trajectory_table(const Trajectory& traj, const std::vector<std::string>& series);

Table surface_table(const ResidualSurface& s);
ResidualSurface surface_from_table(const Table& t);

Table region_table(const ParamRegion& r);
ParamRegion region_from_table(const Table& t);

Table dataset_table(const DecayDataset& d);
DecayDataset dataset_from_table(const Table& t);

}  // namespace tlsscope
