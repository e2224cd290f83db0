#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "uwbnli/link_model.hpp"

namespace uwbnli {

/// Parse a config document (engineering units) into a normalized LinkSpec.
/// Field names are documented in README.md. Throws ConfigError.
LinkSpec load_config(const nlohmann::json& doc);
LinkSpec load_config_text(const std::string& text);
LinkSpec load_config_file(const std::filesystem::path& path);

/// Serialize a LinkSpec back into the config format. Every span is written
/// with its own inline fiber, so the output reloads to the same SI values.
nlohmann::json to_config(const LinkSpec& link);

/// "exact" or "split"; throws ConfigError otherwise.
OracleMode parse_oracle_mode(const std::string& s);

}  // namespace uwbnli
