#include "uwbnli/report_io.hpp"

#include <cmath>
#include <cstdio>

#include "uwbnli/units.hpp"

namespace uwbnli {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

nlohmann::json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return format_double(*d);
    }
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

double thz(double f) { return f / units::thz; }

const char* segment_name(int contribution) { return contribution == 1 ? "st" : "end"; }

}  // namespace

std::string Table::to_csv(const std::string& run_id) const {
    std::string out;
    if (!run_id.empty()) out += "# run_id=" + run_id + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += cell_text(row[i]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json Table::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        rows_json.push_back(std::move(r));
    }
    return {{"columns", columns}, {"rows", rows_json}};
}

Table profile_table(const PowerProfile& profile) {
    Table t;
    t.name = "profile";
    t.columns.push_back("z_m");
    for (const auto& w : profile.waves) t.columns.push_back(w.label);
    for (std::size_t k = 0; k < profile.z.size(); ++k) {
        std::vector<Cell> row{profile.z[k]};
        for (const auto& p : profile.power) row.emplace_back(p[k]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table fit_table(const LinkPropagation& prop, const LinkFits& fits) {
    Table t;
    t.name = "fits";
    t.columns = {"span", "channel_thz", "segment", "split_km", "alpha0_per_km", "alpha1_per_km", "sigma_per_km",
                 "mse"};
    for (std::size_t s = 0; s < fits.size(); ++s) {
        const auto& prof = prop.profiles[s];
        for (std::size_t c = 0; c < fits[s].size(); ++c) {
            const auto& f = fits[s][c];
            const double f_thz = thz(prof.waves[prof.channel_wave[c]].frequency);
            auto add = [&](const SegmentFit& seg, int contribution) {
                t.rows.push_back({static_cast<long long>(s + 1), f_thz, std::string(segment_name(contribution)),
                                  f.split_z / units::km, seg.alpha0 * units::km, seg.alpha1 * units::km,
                                  seg.sigma * units::km, seg.weighted_mse});
            };
            if (f.dark) continue;
            add(f.st, 1);
            if (f.end) add(*f.end, 2);
        }
    }
    return t;
}

Table overlay_table(const PowerProfile& profile, const std::vector<TwoSegmentFit>& fits) {
    Table t;
    t.name = "overlay";
    t.columns.push_back("z_km");
    std::vector<std::vector<double>> model;
    for (std::size_t c = 0; c < fits.size(); ++c) {
        const auto& label = profile.waves[profile.channel_wave[c]].label;
        t.columns.push_back(label + "_numeric_dbm");
        t.columns.push_back(label + "_fitted_dbm");
        model.push_back(fits[c].dark ? std::vector<double>(profile.z.size(), 0.0) : synthesize(fits[c], profile.z));
    }
    for (std::size_t k = 0; k < profile.z.size(); ++k) {
        std::vector<Cell> row{profile.z[k] / units::km};
        for (std::size_t c = 0; c < fits.size(); ++c) {
            row.emplace_back(units::watt_to_dbm(profile.channel(c)[k]));
            row.emplace_back(units::watt_to_dbm(model[c][k]));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table nli_table(const NliReport& report) {
    Table t;
    t.name = "nli";
    t.columns = {"cut_thz", "nli_total_w", "nli_total_dbm", "psd_w_per_hz"};
    for (const auto& c : report.cuts)
        t.rows.push_back({thz(c.frequency), c.power, units::watt_to_dbm(c.power), c.psd});
    return t;
}

Table nli_breakdown_table(const NliReport& report, const std::vector<Channel>& channels) {
    Table t;
    t.name = "nli_breakdown";
    t.columns = {"cut_thz", "span", "contribution", "interferer_thz", "nli_w"};
    for (const auto& term : report.terms) {
        t.rows.push_back({thz(channels[term.cut].center_frequency), static_cast<long long>(term.span + 1),
                          static_cast<long long>(term.contribution),
                          thz(channels[term.interferer].center_frequency), term.power});
    }
    return t;
}

Table oracle_table(const OracleReport& report) {
    Table t;
    t.name = "oracle";
    t.columns = {"cut_thz", "oracle_w", "oracle_dbm", "psd_w_per_hz", "refine_db", "oracle_mode"};
    for (const auto& c : report.cuts) {
        t.rows.push_back({thz(c.frequency), c.power, units::watt_to_dbm(c.power), c.psd, c.refine_db,
                          std::string(to_string(report.mode))});
    }
    return t;
}

Table oracle_breakdown_table(const OracleReport& report, const std::vector<Channel>& channels) {
    Table t;
    t.name = "oracle_breakdown";
    t.columns = {"cut_thz", "span", "contribution", "interferer_thz", "oracle_w"};
    for (const auto& term : report.terms) {
        t.rows.push_back({thz(channels[term.cut].center_frequency), static_cast<long long>(term.span + 1),
                          static_cast<long long>(term.contribution),
                          thz(channels[term.interferer].center_frequency), term.power});
    }
    return t;
}

Table compare_table(const Comparison& cmp) {
    Table t;
    t.name = "compare";
    t.columns = {"cut_thz", "cfm_dbm", "oracle_dbm", "delta_db", "oracle_mode"};
    for (const auto& r : cmp.rows) {
        t.rows.push_back({thz(r.frequency), units::watt_to_dbm(r.cfm_power), units::watt_to_dbm(r.oracle_power),
                          r.delta_db, std::string(to_string(cmp.mode))});
    }
    return t;
}

}  // namespace uwbnli
