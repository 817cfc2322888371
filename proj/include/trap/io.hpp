#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "trap/landscape.hpp"
#include "trap/spectral.hpp"

namespace trap::io {

/// Shortest text that parses back to the same double (%.17g).
std::string fmt(double v);

/// {"alpha": .., "seed": .., "energies": [..]}; energies in sampled (sorted) order.
void write_landscape_json(std::ostream& os, const EnergyLandscape& l);
EnergyLandscape read_landscape_json(std::istream& is);

/// index,energy,rate,tau
void write_landscape_csv(std::ostream& os, const EnergyLandscape& l);

/// k,lambda_k,gamma_k
void write_spectrum_csv(std::ostream& os, const SpectralDecomposition& s);
void write_spectrum_json(std::ostream& os, const SpectralDecomposition& s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws std::runtime_error if absent.
    std::size_t column(const std::string& name) const;
    std::vector<double> numbers(const std::string& name) const;
};

/// Plain comma-separated reader (no quoting), first line is the header.
CsvTable read_csv(std::istream& is);
CsvTable read_csv(const std::filesystem::path& p);

/// Writes through a temporary so a failed run does not leave a half file.
void write_file(const std::filesystem::path& p, const std::string& contents);
std::string read_file(const std::filesystem::path& p);

}  // namespace trap::io
