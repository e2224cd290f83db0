#include "uwbnli/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "uwbnli/config.hpp"
#include "uwbnli/errors.hpp"
#include "uwbnli/report_io.hpp"

namespace uwbnli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

class Writer {
public:
    Writer(fs::path dir, std::string run_id, OutputFormat format)
        : dir_(std::move(dir)), run_id_(std::move(run_id)), format_(format) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void add(const std::string& stem, const Table& table) {
        if (format_ == OutputFormat::csv) {
            write(stem + ".csv", table.to_csv(run_id_));
        } else {
            doc_[stem] = table.to_json();
        }
    }

    std::vector<fs::path> finish(const std::string& subcommand) {
        if (format_ == OutputFormat::json) {
            json out = {{"run_id", run_id_}, {"tables", doc_}};
            write(subcommand + ".json", out.dump(1) + "\n");
        }
        return files_;
    }

    void write(const std::string& name, const std::string& body) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (dir_ / name).string());
        out << body;
        files_.emplace_back(name);
        hashes_.push_back(hex64(fnv1a64(body)));
    }

    const std::vector<std::string>& hashes() const { return hashes_; }

private:
    fs::path dir_;
    std::string run_id_;
    OutputFormat format_;
    json doc_ = json::object();
    std::vector<fs::path> files_;
    std::vector<std::string> hashes_;
};

}  // namespace

MlFactors load_rho_file(const fs::path& path, std::size_t spans, std::size_t channels) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("rho file " + path.string() + ": " + e.what());
    }
    if (doc.is_object() && doc.contains("rho")) doc = doc.at("rho");
    MlFactors ml = MlFactors::ones(spans, channels);
    auto num = [&](const json& v) {
        if (!v.is_number()) throw ConfigError("rho file: entries must be numbers");
        return v.get<double>();
    };
    if (doc.is_number()) {
        for (auto& row : ml.rho) std::fill(row.begin(), row.end(), num(doc));
    } else if (doc.is_array() && !doc.empty() && doc[0].is_array()) {
        if (doc.size() != spans) throw ConfigError("rho file: expected one row per span");
        for (std::size_t s = 0; s < spans; ++s) {
            if (doc[s].size() != channels) throw ConfigError("rho file: expected one column per channel");
            for (std::size_t c = 0; c < channels; ++c) ml.rho[s][c] = num(doc[s][c]);
        }
    } else if (doc.is_array()) {
        if (doc.size() != channels) throw ConfigError("rho file: expected one entry per channel");
        for (auto& row : ml.rho)
            for (std::size_t c = 0; c < channels; ++c) row[c] = num(doc[c]);
    } else {
        throw ConfigError("rho file: expected a number or a list");
    }
    ml.check(spans, channels);
    return ml;
}

RunResult run(const RunOptions& opts) {
    static const std::set<std::string> known = {"solve", "fit", "nli", "oracle", "compare", "all"};
    if (!known.count(opts.subcommand)) throw ConfigError("unknown subcommand '" + opts.subcommand + "'");

    const std::string text = read_file(opts.config);
    LinkSpec link = load_config_text(text);
    json overrides = json::object();
    if (opts.step_m) {
        link.solver.step = *opts.step_m;
        overrides["step_m"] = *opts.step_m;
    }
    if (opts.island_grid) {
        link.oracle.island_grid = *opts.island_grid;
        overrides["island_grid"] = *opts.island_grid;
    }
    if (opts.oracle_mode) {
        link.oracle.mode = *opts.oracle_mode;
        overrides["oracle_mode"] = to_string(*opts.oracle_mode);
    }
    if (opts.seed) overrides["seed"] = *opts.seed;
    link = normalize(std::move(link));

    std::string rho_text;
    if (opts.rho_file) {
        rho_text = read_file(*opts.rho_file);
        overrides["rho_file"] = opts.rho_file->filename().string();
    }
    const MlFactors ml = opts.rho_file ? load_rho_file(*opts.rho_file, link.spans.size(), link.channels.size())
                                       : MlFactors::ones(link.spans.size(), link.channels.size());

    const std::string config_hash = hex64(fnv1a64(text));
    std::uint64_t h = fnv1a64(text);
    h = fnv1a64(opts.subcommand, h);
    h = fnv1a64(overrides.dump(), h);
    h = fnv1a64(rho_text, h);
    h = fnv1a64(opts.format == OutputFormat::csv ? "csv" : "json", h);
    h = fnv1a64(tool_version, h);

    RunResult result;
    result.run_id = hex64(h);
    result.warnings = link.warnings;
    Writer out(opts.out_dir, result.run_id, opts.format);

    const std::string& cmd = opts.subcommand;
    const bool all = cmd == "all";
    const LinkPropagation prop = propagate_link(link);
    result.warnings.insert(result.warnings.end(), prop.warnings.begin(), prop.warnings.end());

    if (cmd == "solve" || all) {
        for (std::size_t s = 0; s < prop.profiles.size(); ++s)
            out.add("profile_span" + std::to_string(s + 1), profile_table(prop.profiles[s]));
    }
    if (cmd != "solve") {
        const LinkFits fits = fit_link(prop, link.fitter);
        if (cmd == "fit" || all) {
            out.add("fits", fit_table(prop, fits));
            for (std::size_t s = 0; s < prop.profiles.size(); ++s)
                out.add("overlay_span" + std::to_string(s + 1), overlay_table(prop.profiles[s], fits[s]));
        }
        std::optional<NliReport> nli;
        if (cmd == "nli" || cmd == "compare" || all) {
            nli = total_nli(link, prop, fits, ml);
            result.warnings.insert(result.warnings.end(), nli->warnings.begin(), nli->warnings.end());
            if (cmd != "compare" || all) {
                out.add("nli", nli_table(*nli));
                out.add("nli_breakdown", nli_breakdown_table(*nli, link.channels));
            }
        }
        if (cmd == "oracle" || cmd == "compare" || all) {
            const OracleReport oracle = nli_numeric(link, prop, fits, ml);
            if (cmd != "compare" || all) {
                out.add("oracle", oracle_table(oracle));
                out.add("oracle_breakdown", oracle_breakdown_table(oracle, link.channels));
            }
            if (nli) out.add("compare", compare_table(compare(*nli, oracle)));
        }
    }
    result.files = out.finish(cmd);

    json files = json::array();
    for (std::size_t i = 0; i < result.files.size(); ++i)
        files.push_back({{"path", result.files[i].generic_string()}, {"fnv1a64", out.hashes()[i]}});
    json manifest = {{"run_id", result.run_id},
                     {"tool", "uwbnli"},
                     {"version", tool_version},
                     {"subcommand", cmd},
                     {"config", {{"path", opts.config.filename().string()}, {"fnv1a64", config_hash}}},
                     {"overrides", overrides},
                     {"format", opts.format == OutputFormat::csv ? "csv" : "json"},
                     {"outputs", files},
                     {"warnings", result.warnings}};
    out.write("manifest.json", manifest.dump(2) + "\n");
    result.files.emplace_back("manifest.json");
    return result;
}

}  // namespace uwbnli
