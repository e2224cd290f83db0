// uwbnli: solve, fit, closed-form NLI, numeric oracle and comparison from one config.
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uwbnli/config.hpp"
#include "uwbnli/errors.hpp"
#include "uwbnli/pipeline.hpp"

namespace {

int fail(const char* kind, const std::string& message, int code, const nlohmann::json& extra = {}) {
    nlohmann::json rec = {{"error", kind}, {"message", message}, {"exit_code", code}};
    if (extra.is_object()) rec.update(extra);
    std::cerr << rec.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear interference estimation for Raman-amplified wideband links"};
    app.set_version_flag("--version", uwbnli::tool_version);
    app.require_subcommand(1, 1);

    uwbnli::RunOptions opts;
    std::string config, out_dir, rho_file, oracle_mode, format = "csv";
    double step_m = 0.0;
    int island_grid = 0;
    std::uint64_t seed = 0;

    const char* env_out = std::getenv("UWBNLI_OUT_DIR");
    out_dir = env_out && *env_out ? env_out : "out";

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"solve", "power profiles per span"},
        {"fit", "two-segment loss fits and fitted-vs-numeric overlays"},
        {"nli", "closed-form NLI report"},
        {"oracle", "numeric island-integral NLI"},
        {"compare", "closed form against the numeric oracle"},
        {"all", "every output above"},
    };
    std::vector<CLI::App*> apps;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("config", config, "config file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--step-m", step_m, "solver step in metres");
        sub->add_option("--island-grid", island_grid, "oracle intervals per island axis (multiple of 4)");
        sub->add_option("--rho-file", rho_file, "JSON correction factors")->check(CLI::ExistingFile);
        sub->add_option("--oracle-mode", oracle_mode, "exact or split")
            ->check(CLI::IsMember({"exact", "split"}));
        sub->add_option("--out-dir", out_dir, "output directory (default $UWBNLI_OUT_DIR or ./out)");
        sub->add_option("--seed", seed, "reserved; recorded in the manifest");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        apps.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    for (auto* sub : apps) {
        if (!sub->parsed()) continue;
        opts.subcommand = sub->get_name();
        if (sub->count("--step-m")) opts.step_m = step_m;
        if (sub->count("--island-grid")) opts.island_grid = island_grid;
        if (sub->count("--rho-file")) opts.rho_file = rho_file;
        if (sub->count("--oracle-mode")) opts.oracle_mode = uwbnli::parse_oracle_mode(oracle_mode);
        if (sub->count("--seed")) opts.seed = seed;
    }
    opts.config = config;
    opts.out_dir = out_dir;
    opts.format = format == "json" ? uwbnli::OutputFormat::json : uwbnli::OutputFormat::csv;

    try {
        const auto result = uwbnli::run(opts);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& f : result.files) std::cout << (opts.out_dir / f).string() << "\n";
        return 0;
    } catch (const uwbnli::SolverError& e) {
        return fail("solver", e.what(), e.exit_code(), {{"residual", e.residual()}});
    } catch (const uwbnli::QuadratureError& e) {
        return fail("quadrature", e.what(), e.exit_code(), {{"change_db", e.change_db()}});
    } catch (const uwbnli::Error& e) {
        return fail(uwbnli::to_string(e.kind()), e.what(), e.exit_code());
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
}
