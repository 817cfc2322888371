#include "trap/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace trap::io {

using nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_landscape_json(std::ostream& os, const EnergyLandscape& l) {
    // json writes doubles in round-trip form.
    json j;
    j["alpha"] = l.alpha();
    j["seed"] = l.seed();
    j["energies"] = std::vector<double>(l.energies().begin(), l.energies().end());
    os << j.dump(1) << '\n';
}

EnergyLandscape read_landscape_json(std::istream& is) {
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("landscape json: ") + e.what());
    }
    for (const auto& [key, _] : j.items())
        if (key != "alpha" && key != "seed" && key != "energies")
            throw std::runtime_error("landscape json: unknown field '" + key + "'");
    if (!j.contains("alpha") || !j.contains("energies"))
        throw std::runtime_error("landscape json: alpha and energies are required");
    return EnergyLandscape::from_energies(j.at("alpha").get<double>(), j.value("seed", std::uint64_t{0}),
                                          j.at("energies").get<std::vector<double>>());
}

void write_landscape_csv(std::ostream& os, const EnergyLandscape& l) {
    os << "index,energy,rate,tau\n";
    for (Eigen::Index i = 0; i < l.size(); ++i)
        os << i << ',' << fmt(l.energies()[i]) << ',' << fmt(l.rates()[i]) << ',' << fmt(l.waiting_times()[i])
           << '\n';
}

void write_spectrum_csv(std::ostream& os, const SpectralDecomposition& s) {
    os << "k,lambda_k,gamma_k\n";
    for (Eigen::Index k = 0; k < s.size(); ++k)
        os << k << ',' << fmt(s.eigenvalues[k]) << ',' << fmt(s.weights[k]) << '\n';
}

void write_spectrum_json(std::ostream& os, const SpectralDecomposition& s) {
    json j;
    j["n"] = s.size();
    j["eigenvalues"] = std::vector<double>(s.eigenvalues.begin(), s.eigenvalues.end());
    j["weights"] = std::vector<double>(s.weights.begin(), s.weights.end());
    os << j.dump(1) << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("csv: no column '" + name + "'");
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (c >= r.size()) throw std::runtime_error("csv: short row");
        const std::string& s = r[c];
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw std::runtime_error("csv: '" + s + "' in column " + name + " is not a number");
        out.push_back(v);
    }
    return out;
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
    t.header = split(line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto row = split(line);
        if (row.size() != t.header.size()) throw std::runtime_error("csv: row width differs from header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    return read_csv(f);
}

void write_file(const std::filesystem::path& p, const std::string& contents) {
    const auto tmp = std::filesystem::path(p.string() + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << contents;
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, p);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace trap::io
