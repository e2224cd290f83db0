#include "uwbnli/config.hpp"

#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>

#include "uwbnli/errors.hpp"
#include "uwbnli/units.hpp"

namespace uwbnli {

using nlohmann::json;

namespace {

void allow_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : keys) known = known || item.key() == k;
        if (!known) throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

int integer_or(const json& obj, const char* key, int fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + ": '" + key + "' must be an integer");
    return v.get<int>();
}

// Either a bare number (constant) or [[x, y], ...]; x and y are scaled to SI.
Table1D read_table(const json& v, double x_scale, double y_scale, const std::string& name) {
    if (v.is_number()) return Table1D::constant(v.get<double>() * y_scale, name);
    if (!v.is_array() || v.empty()) throw ConfigError(name + ": expected a number or [[x, y], ...]");
    std::vector<std::pair<double, double>> samples;
    for (const auto& row : v) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
            throw ConfigError(name + ": every row must be [x, y]");
        samples.emplace_back(row[0].get<double>() * x_scale, row[1].get<double>() * y_scale);
    }
    return Table1D(std::move(samples), name);
}

RamanGainTable read_raman(const json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "synthetic_demo") return RamanGainTable::synthetic_demo();
        if (s == "none") return RamanGainTable::zero();
        throw ConfigError("raman_gain: unknown preset '" + s + "'");
    }
    if (!v.is_array()) throw ConfigError("raman_gain: expected a preset name or [[dthz, c_r], ...]");
    std::vector<std::pair<double, double>> samples;
    for (const auto& row : v) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
            throw ConfigError("raman_gain: every row must be [dthz, c_r]");
        samples.emplace_back(row[0].get<double>() * units::thz, row[1].get<double>() * units::per_w_km);
    }
    return RamanGainTable(std::move(samples));
}

double read_power(const json& obj, const std::string& where) {
    const bool dbm = obj.contains("power_dbm");
    const bool mw = obj.contains("power_mw");
    if (dbm == mw) throw ConfigError(where + ": give exactly one of power_dbm, power_mw");
    return dbm ? units::dbm_to_watt(number(obj, "power_dbm", where))
               : number(obj, "power_mw", where) * units::mw;
}

void read_channels(const json& list, std::vector<Channel>& out) {
    if (!list.is_array()) throw ConfigError("channels: expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& entry = list[i];
        const std::string where = "channels[" + std::to_string(i) + "]";
        if (entry.is_object() && entry.contains("grid")) {
            allow_keys(entry, {"grid"}, where);
            const auto& g = entry.at("grid");
            const std::string gw = where + ".grid";
            allow_keys(g, {"start_thz", "count", "spacing_ghz", "symbol_rate_gbaud", "power_dbm", "power_mw",
                           "rolloff"},
                       gw);
            const double start = number(g, "start_thz", gw) * units::thz;
            const int count = integer_or(g, "count", -1, gw);
            if (count < 1) throw ConfigError(gw + ": 'count' must be an integer >= 1");
            const double spacing = number(g, "spacing_ghz", gw) * units::ghz;
            Channel proto;
            proto.symbol_rate = number(g, "symbol_rate_gbaud", gw) * units::ghz;
            proto.launch_power = read_power(g, gw);
            proto.rolloff = number_or(g, "rolloff", 0.0, gw);
            for (int k = 0; k < count; ++k) {
                Channel ch = proto;
                ch.center_frequency = start + k * spacing;
                out.push_back(ch);
            }
        } else {
            allow_keys(entry, {"frequency_thz", "symbol_rate_gbaud", "power_dbm", "power_mw", "rolloff"}, where);
            Channel ch;
            ch.center_frequency = number(entry, "frequency_thz", where) * units::thz;
            ch.symbol_rate = number(entry, "symbol_rate_gbaud", where) * units::ghz;
            ch.launch_power = read_power(entry, where);
            ch.rolloff = number_or(entry, "rolloff", 0.0, where);
            out.push_back(ch);
        }
    }
}

FiberSpec read_fiber(const std::string& name, const json& f, const RamanGainTable& default_raman) {
    const std::string where = "fiber '" + name + "'";
    allow_keys(f,
               {"loss_db_per_km", "aeff_um2", "beta2_ps2_per_km", "beta3_ps3_per_km", "beta4_ps4_per_km",
                "f_ref_thz", "n2_m2_per_w", "raman_gain"},
               where);
    FiberSpec fiber;
    fiber.name = name;
    if (!f.contains("loss_db_per_km")) throw ConfigError(where + ": missing 'loss_db_per_km'");
    if (!f.contains("aeff_um2")) throw ConfigError(where + ": missing 'aeff_um2'");
    fiber.field_loss =
        read_table(f.at("loss_db_per_km"), units::thz, units::db_per_km_to_field_alpha(1.0), name + ".loss");
    fiber.effective_area = read_table(f.at("aeff_um2"), units::thz, units::um2, name + ".aeff");
    fiber.beta2 = number(f, "beta2_ps2_per_km", where) * units::ps2_per_km;
    fiber.beta3 = number_or(f, "beta3_ps3_per_km", 0.0, where) * units::ps3_per_km;
    fiber.beta4 = number_or(f, "beta4_ps4_per_km", 0.0, where) * units::ps4_per_km;
    fiber.f_ref = number_or(f, "f_ref_thz", fiber.f_ref / units::thz, where) * units::thz;
    fiber.n2 = number_or(f, "n2_m2_per_w", fiber.n2, where);
    fiber.raman_gain = f.contains("raman_gain") ? read_raman(f.at("raman_gain")) : default_raman;
    return fiber;
}

PostGain read_post_gain(const json& v, const std::string& where) {
    if (v.is_string()) {
        if (v.get<std::string>() == "transparent") return PostGain::transparent();
        throw ConfigError(where + ": post_gain must be \"transparent\" or an object");
    }
    allow_keys(v, {"flat_db", "table_db"}, where + ".post_gain");
    if (v.contains("flat_db") == v.contains("table_db"))
        throw ConfigError(where + ": post_gain needs exactly one of flat_db, table_db");
    if (v.contains("flat_db")) return PostGain::flat_db(number(v, "flat_db", where));
    PostGain g;
    g.kind = PostGain::Kind::explicit_table;
    const auto db = read_table(v.at("table_db"), units::thz, 1.0, "post_gain");
    std::vector<std::pair<double, double>> lin;
    for (std::size_t i = 0; i < db.xs().size(); ++i) lin.emplace_back(db.xs()[i], units::db_to_linear(db.ys()[i]));
    g.gain = Table1D(std::move(lin), "post_gain");
    return g;
}

Pump read_pump(const json& p, const std::string& where) {
    allow_keys(p, {"frequency_thz", "power_mw", "power_dbm", "direction"}, where);
    Pump pump;
    pump.center_frequency = number(p, "frequency_thz", where) * units::thz;
    pump.injected_power = read_power(p, where);
    if (p.contains("direction")) {
        const auto d = p.at("direction").get<std::string>();
        if (d == "forward") pump.direction = Direction::forward;
        else if (d == "backward") pump.direction = Direction::backward;
        else throw ConfigError(where + ": direction must be forward or backward");
    }
    return pump;
}

void read_options(const json& doc, LinkSpec& link) {
    if (doc.contains("solver")) {
        const auto& s = doc.at("solver");
        allow_keys(s, {"step_m", "bvp_tolerance", "max_iterations", "damping"}, "solver");
        link.solver.step = number_or(s, "step_m", link.solver.step, "solver");
        link.solver.bvp_tolerance = number_or(s, "bvp_tolerance", link.solver.bvp_tolerance, "solver");
        link.solver.max_iterations = integer_or(s, "max_iterations", link.solver.max_iterations, "solver");
        link.solver.damping = number_or(s, "damping", link.solver.damping, "solver");
    }
    if (doc.contains("fitter")) {
        const auto& f = doc.at("fitter");
        auto& o = link.fitter;
        allow_keys(f,
                   {"weight_exponent", "alpha0_cap_fraction", "max_series_ratio", "sigma_min_scale",
                    "sigma_max_scale", "sigma_rel_tol", "scan_points", "min_samples"},
                   "fitter");
        o.weight_exponent = number_or(f, "weight_exponent", o.weight_exponent, "fitter");
        o.alpha0_cap_fraction = number_or(f, "alpha0_cap_fraction", o.alpha0_cap_fraction, "fitter");
        o.max_series_ratio = number_or(f, "max_series_ratio", o.max_series_ratio, "fitter");
        o.sigma_min_scale = number_or(f, "sigma_min_scale", o.sigma_min_scale, "fitter");
        o.sigma_max_scale = number_or(f, "sigma_max_scale", o.sigma_max_scale, "fitter");
        o.sigma_rel_tol = number_or(f, "sigma_rel_tol", o.sigma_rel_tol, "fitter");
        o.scan_points = integer_or(f, "scan_points", o.scan_points, "fitter");
        o.min_samples = integer_or(f, "min_samples", o.min_samples, "fitter");
    }
    if (doc.contains("engine")) {
        const auto& e = doc.at("engine");
        allow_keys(e, {"series_bound", "extra_terms"}, "engine");
        if (e.contains("series_bound")) {
            const auto b = e.at("series_bound").get<std::string>();
            if (b == "per_channel") link.engine.series_bound = SeriesBound::per_channel;
            else if (b == "shared") link.engine.series_bound = SeriesBound::shared;
            else throw ConfigError("engine.series_bound must be per_channel or shared");
        }
        link.engine.extra_terms = integer_or(e, "extra_terms", link.engine.extra_terms, "engine");
    }
    if (doc.contains("oracle")) {
        const auto& o = doc.at("oracle");
        allow_keys(o, {"island_grid", "mode", "source", "refine_check", "convergence_db"}, "oracle");
        link.oracle.island_grid = integer_or(o, "island_grid", link.oracle.island_grid, "oracle");
        if (o.contains("mode")) link.oracle.mode = parse_oracle_mode(o.at("mode").get<std::string>());
        if (o.contains("source")) {
            const auto s = o.at("source").get<std::string>();
            if (s == "solver") link.oracle.source = ProfileSource::solver;
            else if (s == "fitted") link.oracle.source = ProfileSource::fitted;
            else throw ConfigError("oracle.source must be solver or fitted");
        }
        if (o.contains("refine_check")) {
            if (!o.at("refine_check").is_boolean()) throw ConfigError("oracle.refine_check must be a boolean");
            link.oracle.refine_check = o.at("refine_check").get<bool>();
        }
        link.oracle.convergence_db = number_or(o, "convergence_db", link.oracle.convergence_db, "oracle");
    }
}

json table_json(const Table1D& t, double x_scale, double y_scale) {
    if (t.is_constant()) return t.ys().front() / y_scale;
    json rows = json::array();
    for (std::size_t i = 0; i < t.xs().size(); ++i) rows.push_back({t.xs()[i] / x_scale, t.ys()[i] / y_scale});
    return rows;
}

}  // namespace

OracleMode parse_oracle_mode(const std::string& s) {
    if (s == "exact") return OracleMode::exact;
    if (s == "split") return OracleMode::split;
    throw ConfigError("oracle mode must be exact or split");
}

LinkSpec load_config(const json& doc) {
    try {
        allow_keys(doc, {"channels", "fibers", "raman_gain", "spans", "solver", "fitter", "engine", "oracle"},
                   "config");
        LinkSpec link;
        if (!doc.contains("channels")) throw ConfigError("config: missing 'channels'");
        read_channels(doc.at("channels"), link.channels);

        const RamanGainTable default_raman =
            doc.contains("raman_gain") ? read_raman(doc.at("raman_gain")) : RamanGainTable::zero();
        std::map<std::string, FiberSpec> fibers;
        if (doc.contains("fibers")) {
            const auto& fs = doc.at("fibers");
            if (!fs.is_object()) throw ConfigError("fibers: expected an object keyed by name");
            for (const auto& item : fs.items()) fibers[item.key()] = read_fiber(item.key(), item.value(), default_raman);
        }

        if (!doc.contains("spans") || !doc.at("spans").is_array())
            throw ConfigError("config: 'spans' must be a list");
        const auto& spans = doc.at("spans");
        for (std::size_t i = 0; i < spans.size(); ++i) {
            const auto& s = spans[i];
            const std::string where = "spans[" + std::to_string(i) + "]";
            allow_keys(s, {"length_km", "fiber", "pumps", "post_gain", "repeat"}, where);
            SpanSpec span;
            span.length = number(s, "length_km", where) * units::km;
            if (!s.contains("fiber")) throw ConfigError(where + ": missing 'fiber'");
            const auto& f = s.at("fiber");
            if (f.is_string()) {
                auto it = fibers.find(f.get<std::string>());
                if (it == fibers.end()) throw ConfigError(where + ": unknown fiber '" + f.get<std::string>() + "'");
                span.fiber = it->second;
            } else {
                span.fiber = read_fiber("span" + std::to_string(i + 1), f, default_raman);
            }
            if (s.contains("pumps")) {
                const auto& ps = s.at("pumps");
                if (!ps.is_array()) throw ConfigError(where + ": 'pumps' must be a list");
                for (std::size_t p = 0; p < ps.size(); ++p)
                    span.pumps.push_back(read_pump(ps[p], where + ".pumps[" + std::to_string(p) + "]"));
            }
            if (s.contains("post_gain")) span.post_gain = read_post_gain(s.at("post_gain"), where);
            const int repeat = integer_or(s, "repeat", 1, where);
            if (repeat < 1) throw ConfigError(where + ": 'repeat' must be >= 1");
            for (int r = 0; r < repeat; ++r) link.spans.push_back(span);
        }
        read_options(doc, link);
        return normalize(std::move(link));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

LinkSpec load_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return load_config(doc);
}

LinkSpec load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return load_config_text(os.str());
}

json to_config(const LinkSpec& link) {
    json doc;
    json channels = json::array();
    for (const auto& ch : link.channels) {
        channels.push_back({{"frequency_thz", ch.center_frequency / units::thz},
                            {"symbol_rate_gbaud", ch.symbol_rate / units::ghz},
                            {"power_mw", ch.launch_power / units::mw},
                            {"rolloff", ch.rolloff}});
    }
    doc["channels"] = channels;

    json spans = json::array();
    for (const auto& span : link.spans) {
        const auto& f = span.fiber;
        json raman = json::array();
        const auto& rt = f.raman_gain.table();
        for (std::size_t i = 0; i < rt.xs().size(); ++i)
            raman.push_back({rt.xs()[i] / units::thz, rt.ys()[i] / units::per_w_km});
        json fiber = {{"loss_db_per_km", table_json(f.field_loss, units::thz, units::db_per_km_to_field_alpha(1.0))},
                      {"aeff_um2", table_json(f.effective_area, units::thz, units::um2)},
                      {"beta2_ps2_per_km", f.beta2 / units::ps2_per_km},
                      {"beta3_ps3_per_km", f.beta3 / units::ps3_per_km},
                      {"beta4_ps4_per_km", f.beta4 / units::ps4_per_km},
                      {"f_ref_thz", f.f_ref / units::thz},
                      {"n2_m2_per_w", f.n2},
                      {"raman_gain", raman}};
        json pumps = json::array();
        for (const auto& p : span.pumps) {
            pumps.push_back({{"frequency_thz", p.center_frequency / units::thz},
                             {"power_mw", p.injected_power / units::mw},
                             {"direction", to_string(p.direction)}});
        }
        json post;
        if (span.post_gain.kind == PostGain::Kind::transparent) {
            post = "transparent";
        } else if (span.post_gain.gain.is_constant()) {
            post = {{"flat_db", units::linear_to_db(span.post_gain.gain.ys().front())}};
        } else {
            json rows = json::array();
            const auto& g = span.post_gain.gain;
            for (std::size_t i = 0; i < g.xs().size(); ++i)
                rows.push_back({g.xs()[i] / units::thz, units::linear_to_db(g.ys()[i])});
            post = {{"table_db", rows}};
        }
        spans.push_back({{"length_km", span.length / units::km},
                         {"fiber", fiber},
                         {"pumps", pumps},
                         {"post_gain", post}});
    }
    doc["spans"] = spans;

    doc["solver"] = {{"step_m", link.solver.step},
                     {"bvp_tolerance", link.solver.bvp_tolerance},
                     {"max_iterations", link.solver.max_iterations},
                     {"damping", link.solver.damping}};
    const auto& o = link.fitter;
    doc["fitter"] = {{"weight_exponent", o.weight_exponent},
                     {"alpha0_cap_fraction", o.alpha0_cap_fraction},
                     {"max_series_ratio", o.max_series_ratio},
                     {"sigma_min_scale", o.sigma_min_scale},
                     {"sigma_max_scale", o.sigma_max_scale},
                     {"sigma_rel_tol", o.sigma_rel_tol},
                     {"scan_points", o.scan_points},
                     {"min_samples", o.min_samples}};
    doc["engine"] = {{"series_bound", to_string(link.engine.series_bound)},
                     {"extra_terms", link.engine.extra_terms}};
    doc["oracle"] = {{"island_grid", link.oracle.island_grid},
                     {"mode", to_string(link.oracle.mode)},
                     {"source", to_string(link.oracle.source)},
                     {"refine_check", link.oracle.refine_check},
                     {"convergence_db", link.oracle.convergence_db}};
    return doc;
}

}  // namespace uwbnli
