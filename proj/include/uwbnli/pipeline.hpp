#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uwbnli/cfm_engine.hpp"
#include "uwbnli/gn_oracle.hpp"

namespace uwbnli {

inline constexpr const char* tool_version = "0.1.0";

enum class OutputFormat { csv, json };

struct RunOptions {
    std::string subcommand;  // solve, fit, nli, oracle, compare, all
    std::filesystem::path config;
    std::filesystem::path out_dir;
    std::optional<double> step_m;
    std::optional<int> island_grid;
    std::optional<std::filesystem::path> rho_file;
    std::optional<OracleMode> oracle_mode;
    std::optional<std::uint64_t> seed;  // reserved; recorded in the manifest only
    OutputFormat format = OutputFormat::csv;
};

struct RunResult {
    std::string run_id;
    std::vector<std::filesystem::path> files;  // relative to out_dir, manifest last
    std::vector<std::string> warnings;
};

/// Load rho from JSON: a number (all entries), a list per channel (every
/// span), or a list of lists [span][channel].
MlFactors load_rho_file(const std::filesystem::path& path, std::size_t spans, std::size_t channels);

/// Execute one CLI subcommand and write its files plus manifest.json.
/// Throws uwbnli::Error subclasses; the CLI maps them to exit codes.
RunResult run(const RunOptions& opts);

}  // namespace uwbnli
