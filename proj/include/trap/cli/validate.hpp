#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace trap::cli {

struct ValidationReport {
    std::string kind;
    std::vector<std::string> passed;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Replays the invariants of the run kind recorded in dir/manifest.json.
/// Throws ValidationError when an artifact is missing or unreadable.
ValidationReport validate_run(const std::filesystem::path& dir);

}  // namespace trap::cli
