#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "uwbnli/cfm_engine.hpp"
#include "uwbnli/gn_oracle.hpp"

namespace uwbnli {

/// "%.17g"; non-finite values print as inf, -inf or nan.
std::string format_double(double v);

/// 64-bit FNV-1a, printed as 16 hex digits by hex64().
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

using Cell = std::variant<double, long long, std::string>;

/// A named table that can be written as CSV or as a JSON object.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::string to_csv(const std::string& run_id = {}) const;
    nlohmann::json to_json() const;
};

Table profile_table(const PowerProfile& profile);
Table fit_table(const LinkPropagation& prop, const LinkFits& fits);
Table overlay_table(const PowerProfile& profile, const std::vector<TwoSegmentFit>& fits);
Table nli_table(const NliReport& report);
Table nli_breakdown_table(const NliReport& report, const std::vector<Channel>& channels);
Table oracle_table(const OracleReport& report);
Table oracle_breakdown_table(const OracleReport& report, const std::vector<Channel>& channels);
Table compare_table(const Comparison& cmp);

}  // namespace uwbnli
