#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace trap::cli {

inline constexpr int kManifestVersion = 1;

enum class Kind { sample, spectrum, aging, mc, ppp, tauber, validate };

std::string to_string(Kind k);
Kind kind_from_string(const std::string& s);

/// A manifest or run directory failed its checks; maps to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// {"version": 1, "kind": ..., "params": {...}, "output": "dir"}. After
/// parse_manifest every parameter of the kind is present, so the resolved
/// form alone reproduces a run.
struct Manifest {
    Kind kind = Kind::sample;
    nlohmann::json params = nlohmann::json::object();
    std::string output;  ///< empty: decided by the caller
};

/// Fail-closed: unknown top-level fields, unknown parameters, wrong types and
/// out-of-range values throw ValidationError. Missing parameters take defaults.
Manifest parse_manifest(const nlohmann::json& j);
Manifest parse_manifest_text(const std::string& text);

/// All defaults of a kind.
Manifest default_manifest(Kind k);

/// Command-line flags that override the manifest.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<std::string> out;
};

/// Throws ValidationError for a flag the kind has no parameter for.
Manifest apply_overrides(Manifest m, const Overrides& o);

/// The resolved manifest without the output directory, so that two runs of
/// the same manifest produce identical files wherever they are written.
nlohmann::json resolved_json(const Manifest& m);

/// n points from lo to hi, evenly spaced in log.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace trap::cli
