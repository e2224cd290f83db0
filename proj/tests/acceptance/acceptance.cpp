// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "../support.hpp"
#include "oracles/frozen_values.hpp"
#include "uwbnli/cfm_engine.hpp"
#include "uwbnli/config.hpp"
#include "uwbnli/gn_oracle.hpp"
#include "uwbnli/loss_fitter.hpp"
#include "uwbnli/pipeline.hpp"
#include "uwbnli/raman_solver.hpp"

using namespace uwbnli;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [failed]");
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> launch_of(const LinkSpec& link) {
    std::vector<double> p;
    for (const auto& c : link.channels) p.push_back(c.launch_power);
    return p;
}

LinkSpec desk() { return load_config_file(testing::source_path("configs/desk_backward_pump.json")); }

Verdict loss_only() {
    Verdict v;
    auto fiber = testing::smf(0.2);
    const auto link = testing::simple_link(4, 193.0, 125, 1e-3, 95, fiber);
    const auto t0 = Clock::now();
    const auto prof = solve_span(link.spans[0], link.channels, launch_of(link), link.solver);
    const double dt = seconds_since(t0);
    double worst = 0.0;
    for (std::size_t c = 0; c < link.channels.size(); ++c) {
        const double db = 10.0 * std::log10(prof.channel_at_start(c) / prof.channel_at_end(c));
        worst = std::max(worst, std::abs(db - 19.0));
    }
    v.require(worst < 1e-6, "max |loss - 19 dB| = " + fmt("%.3g dB", worst));
    v.require(dt < 1.0, "runtime " + fmt("%.3f s", dt));
    return v;
}

double flux_drift(double step) {
    auto link = testing::simple_link(4, 190.0, 3000, 0.1, 95, testing::smf(0.0, RamanGainTable::synthetic_demo()));
    link.solver.step = step;
    link = normalize(link);
    const auto prof = solve_span(link.spans[0], link.channels, launch_of(link), link.solver);
    auto flux = [&](std::size_t k) {
        double n = 0.0;
        for (std::size_t w = 0; w < prof.waves.size(); ++w) n += prof.power[w][k] / prof.waves[w].frequency;
        return n;
    };
    double worst = 0.0;
    for (std::size_t k = 0; k < prof.z.size(); ++k) worst = std::max(worst, std::abs(flux(k) - flux(0)) / flux(0));
    return worst;
}

Verdict photon_flux() {
    Verdict v;
    const double step = SolverOptions{}.step;
    const double d1 = flux_drift(step);
    const double d2 = flux_drift(step / 2);
    v.require(d1 < 1e-6, "drift " + fmt("%.3g", d1) + " at " + fmt("%g m", step));
    // RK4 conserves this linear invariant exactly, so both drifts are rounding noise
    v.require(d2 > 0.0 && d1 / d2 >= 4.0, "halved-step drift " + fmt("%.3g", d2) + ", ratio " + fmt("%.3g", d2 > 0.0 ? d1 / d2 : 0.0));
    // truncation error of the power itself, which is what the step actually controls
    auto tail = [](double s) {
        auto link = testing::simple_link(4, 190.0, 3000, 0.1, 95, testing::smf(0.0, RamanGainTable::synthetic_demo()));
        link.solver.step = s;
        link = normalize(link);
        return solve_span(link.spans[0], link.channels, launch_of(link), link.solver).channel_at_end(0);
    };
    const double e1 = std::abs(tail(2000.0) - tail(1000.0)), e2 = std::abs(tail(1000.0) - tail(500.0));
    v.detail += "; info: end-power change ratio on step halving " + fmt("%.1f", e1 / e2);
    return v;
}

Verdict case_study() {
    Verdict v;
    const auto t0 = Clock::now();
    const auto link = load_config_file(testing::source_path("configs/case_study.json"));
    const auto prop = propagate_link(link);
    const auto fits = fit_link(prop, link.fitter);
    const double dt = seconds_since(t0);
    const auto& prof = prop.profiles[0];

    const auto& low = prof.channel(0);
    const auto k = argmin_index(low);
    v.require(k > 0 && k + 1 < low.size(), "186.1 THz minimum at " + fmt("%.2f km", prof.z[k] / 1e3));

    const std::size_t n = link.channels.size();
    for (std::size_t c : {std::size_t{0}, n / 2 - 1, n / 2, n - 1}) {
        const auto& p = prof.channel(c);
        const auto model = synthesize(fits[0][c], prof.z);
        const double floor = p.front() * 1e-3;
        double worst = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] >= floor) worst = std::max(worst, std::abs(testing::db_diff(model[i], p[i])));
        v.require(worst <= 0.25, fmt("%.2f THz", link.channels[c].center_frequency / 1e12) + " fit error " +
                                     fmt("%.3f dB", worst));
    }
    v.require(dt < 30.0, "runtime " + fmt("%.2f s", dt));
    return v;
}

Verdict round_trip() {
    Verdict v;
    FitterOptions opts;
    const double length = 100e3, split = 70e3;
    SegmentFit st, end;
    st.alpha0 = 2.3026e-5, st.alpha1 = 8e-6, st.sigma = 4e-4, st.p_start = 2e-3;
    end.alpha0 = -1e-6, end.alpha1 = 5e-5, end.sigma = 1e-4, end.p_start = 1.0;
    end.p_start = model_power(st, split) / model_power(end, length - split);
    std::vector<double> z, p;
    for (int k = 0; k <= 2000; ++k) {
        z.push_back(length * k / 2000.0);
        p.push_back(z.back() <= split ? model_power(st, z.back()) : model_power(end, length - z.back()));
    }
    const auto fit = fit_span(z, p, st.alpha0, opts);
    if (!fit.end) {
        v.require(false, "no end segment found");
        return v;
    }
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const double worst = std::max({rel(fit.st.alpha0, st.alpha0), rel(fit.st.alpha1, st.alpha1), rel(fit.st.sigma, st.sigma),
                                   rel(fit.end->alpha0, end.alpha0), rel(fit.end->alpha1, end.alpha1),
                                   rel(fit.end->sigma, end.sigma)});
    const double mse = std::max(fit.st.weighted_mse, fit.end->weighted_mse);
    v.require(worst < 0.01, "worst parameter error " + fmt("%.2g", worst));
    v.require(mse < 1e-10, "weighted MSE " + fmt("%.2g", mse));
    return v;
}

Verdict classic_gn() {
    Verdict v;
    const auto link = load_config_file(testing::source_path("configs/classic_3ch.json"));
    const auto prop = propagate_link(link);
    const auto fits = fit_link(prop, link.fitter);
    const auto ml = MlFactors::ones(1, link.channels.size());
    const auto cfm = total_nli(link, prop, fits, ml);
    const auto oracle = nli_numeric(link, prop, fits, ml);
    double eval = 0.0, worst = 0.0;
    for (std::size_t c = 0; c < link.channels.size(); ++c) {
        eval = std::max(eval, testing::rel_diff(cfm.cuts[c].power, testing::classic_gn(link, c)));
        worst = std::max(worst, std::abs(testing::db_diff(cfm.cuts[c].power, oracle.cuts[c].power)));
    }
    v.require(eval < 1e-9, "vs asinh evaluator " + fmt("%.2g", eval));
    v.require(worst < 0.02, "vs oracle " + fmt("%.4f dB", worst));
    return v;
}

struct DeskRun {
    LinkSpec link = desk();
    LinkPropagation prop = propagate_link(link);
    LinkFits fits = fit_link(prop, link.fitter);
    MlFactors ml = MlFactors::ones(link.spans.size(), link.channels.size());
};

Verdict oracle_agreement(const DeskRun& d) {
    Verdict v;
    const auto cfm = total_nli(d.link, d.prop, d.fits, d.ml);
    const auto t0 = Clock::now();
    const auto oracle = nli_numeric_at(d.link, d.prop, d.fits, d.ml, 64, OracleMode::split, ProfileSource::solver);
    const double dt = seconds_since(t0);
    const auto cmp = compare(cfm, oracle);
    v.require(cmp.max_abs_db <= 0.5, "max |delta| " + fmt("%.3f dB", cmp.max_abs_db));
    v.require(dt < 300.0, "oracle runtime " + fmt("%.1f s", dt));
    return v;
}

Verdict truncation(DeskRun d) {
    Verdict v;
    const auto base = total_nli(d.link, d.prop, d.fits, d.ml);
    d.link.engine.extra_terms += 5;
    const auto more = total_nli(d.link, d.prop, d.fits, d.ml);
    double worst = 0.0;
    for (std::size_t c = 0; c < base.cuts.size(); ++c)
        worst = std::max(worst, std::abs(testing::db_diff(more.cuts[c].power, base.cuts[c].power)));
    v.require(worst < 0.05, "max change " + fmt("%.2g dB", worst));
    return v;
}

Verdict additivity() {
    Verdict v;
    auto nli = [](const LinkSpec& link) {
        const auto prop = propagate_link(link);
        return total_nli(link, prop, fit_link(prop, link.fitter), MlFactors::ones(link.spans.size(), link.channels.size()));
    };
    const auto one = load_config_file(testing::source_path("configs/classic_3ch.json"));
    auto two = one;
    two.spans.push_back(two.spans[0]);
    two = normalize(two);
    auto loud = one;
    for (auto& ch : loud.channels) ch.launch_power *= 2.0;
    const auto a = nli(one), b = nli(two), c = nli(loud);
    double e2 = 0.0, e3 = 0.0;
    for (std::size_t k = 0; k < a.cuts.size(); ++k) {
        e2 = std::max(e2, testing::rel_diff(b.cuts[k].power, 2.0 * a.cuts[k].power));
        e3 = std::max(e3, testing::rel_diff(c.cuts[k].power, 8.0 * a.cuts[k].power));
    }
    v.require(e2 < 1e-9, "two spans " + fmt("%.2g", e2));
    v.require(e3 < 1e-9, "cubic scaling " + fmt("%.2g", e3));
    return v;
}

Verdict determinism() {
    Verdict v;
    const auto root = fs::temp_directory_path() / "uwbnli_acceptance";
    fs::remove_all(root);
    RunOptions opts;
    opts.subcommand = "all";
    opts.config = testing::source_path("configs/desk_backward_pump.json");
    opts.out_dir = root / "a";
    const auto a = run(opts);
    opts.out_dir = root / "b";
    const auto b = run(opts);
    bool same = a.files == b.files;
    for (const auto& f : a.files) same = same && testing::slurp(root / "a" / f) == testing::slurp(root / "b" / f);
    v.require(same, std::to_string(a.files.size()) + " files compared");
    fs::remove_all(root);
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"loss-only solver exactness", loss_only},
        {"photon-flux conservation", photon_flux},
        {"case-study profile shape and fits", case_study},
        {"round-trip fit identifiability", round_trip},
        {"classic GN reduction", classic_gn},
        {"oracle agreement with backward pump", [] { return oracle_agreement(DeskRun{}); }},
        {"series truncation sufficiency", [] { return truncation(DeskRun{}); }},
        {"additivity and cubic scaling", additivity},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("threw: ") + e.what();
        }
        failed += !v.pass;
        std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed ? 1 : 0;
}
