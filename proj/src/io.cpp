#include "dissipath/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace dissipath::io {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string to_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("io: cannot open " + path + " for writing");
    f << text;
}

void write_csv(const std::string& path, const CsvTable& table) {
    write_text(path, to_csv(table));
}

json spectral_density_to_json(const bath::SpectralDensity& sd) {
    json j;
    j["kind"] = sd.kind == bath::SpectralKind::ohmic ? "ohmic" : "drude";
    j["gamma"] = sd.gamma;
    if (sd.kind == bath::SpectralKind::drude) j["omega_d"] = sd.omega_d;
    j["mass"] = sd.mass;
    return j;
}

bath::SpectralDensity spectral_density_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const double gamma = j.at("gamma").get<double>();
    const double mass = j.value("mass", 1.0);
    if (kind == "ohmic") return bath::SpectralDensity::ohmic(gamma, mass);
    if (kind == "drude")
        return bath::SpectralDensity::drude(gamma, j.at("omega_d").get<double>(), mass);
    throw domain_error(errc::precondition, "spectral density: unknown kind '" + kind + "'");
}

CsvTable grid_state_table(const pathgrid::GridState& state) {
    CsvTable t;
    t.columns = {"x", "re", "im"};
    t.rows.reserve(state.amplitudes.size());
    for (int j = 0; j < state.grid.n_points; ++j)
        t.rows.push_back({state.grid.x(j), state.amplitudes[j].real(),
                          state.amplitudes[j].imag()});
    return t;
}

json grid_state_sidecar(const pathgrid::GridState& state, double leakage) {
    json j;
    j["grid"] = {{"x_min", state.grid.x_min},
                 {"x_max", state.grid.x_max},
                 {"n_points", state.grid.n_points}};
    j["norm_convention"] =
        state.norm_convention == pathgrid::NormConvention::sum_dx ? "sum_dx" : "unit_vector";
    j["norm"] = state.norm();
    j["leakage"] = leakage;
    return j;
}

CsvTable kernel_table_complex(const std::vector<std::pair<double, complex>>& samples) {
    CsvTable t;
    t.columns = {"t", "re", "im"};
    for (const auto& [arg, v] : samples) t.rows.push_back({arg, v.real(), v.imag()});
    return t;
}

CsvTable kernel_table_real(const std::vector<std::pair<double, double>>& samples,
                           const std::string& argname, const std::string& valname) {
    CsvTable t;
    t.columns = {argname, valname};
    for (const auto& [arg, v] : samples) t.rows.push_back({arg, v});
    return t;
}

} // namespace dissipath::io
