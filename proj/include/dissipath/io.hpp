// io.hpp — locale-independent CSV emission (17 significant digits), JSON
// sidecars, and serialization of the spectral-density and grid-state records.
#pragma once

#include <string>
#include <vector>

// vendored single-header nlohmann/json
#include <json.hpp>

#include "dissipath/bath.hpp"
#include "dissipath/pathgrid.hpp"

namespace dissipath::io {

using json = nlohmann::json;

// shortest round-trip decimal, dot separator, independent of locale
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);
void write_text(const std::string& path, const std::string& text);

json spectral_density_to_json(const bath::SpectralDensity& sd);
bath::SpectralDensity spectral_density_from_json(const json& j);

// GridState <-> CSV (x, re, im) with a JSON sidecar describing grid and norm.
CsvTable grid_state_table(const pathgrid::GridState& state);
json grid_state_sidecar(const pathgrid::GridState& state, double leakage);

// Kernel tabulations: (t, re, im) or (tau, value).
CsvTable kernel_table_complex(const std::vector<std::pair<double, complex>>& samples);
CsvTable kernel_table_real(const std::vector<std::pair<double, double>>& samples,
                           const std::string& argname = "tau",
                           const std::string& valname = "value");

} // namespace dissipath::io
