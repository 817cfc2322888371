#pragma once

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "trap/cli/manifest.hpp"
#include "trap/tauberian.hpp"

namespace trap::cli {

/// Trajectories use their own Philox key so that replica r never shares a
/// stream with round r of the landscape draw.
inline std::uint64_t trajectory_seed(std::uint64_t seed) { return seed + 0x9E3779B97F4A7C15ull; }

struct RunOutcome {
    std::filesystem::path dir;
    nlohmann::json summary;
};

/// Transform of a tauber manifest with its exponents and the exact constant B.
struct TauberSetup {
    Transform ghat;
    double beta = 1.0;
    double gamma = 1.0;
    double expected_B = 0.0;
};
TauberSetup tauber_setup(const nlohmann::json& params);

/// Runs the pipeline of m.kind into `dir` (created if needed): curves.csv,
/// summary.json, manifest.json plus kind-specific files. Kind validate is
/// not a run; use validate_run. Errors propagate: ValidationError and
/// std::invalid_argument for bad input, NonConvergence for numerical failure.
RunOutcome run_manifest(const Manifest& m, const std::filesystem::path& dir);

}  // namespace trap::cli
