#include <doctest.h>

#include <numeric>

#include "oracles/frozen_values.hpp"
#include "support.hpp"
#include "uwbnli/config.hpp"
#include "uwbnli/errors.hpp"
#include "uwbnli/gn_oracle.hpp"

using namespace uwbnli;

TEST_CASE("z integral is exact for exponential profiles") {
    const double a = 2 * 2.3e-5, length = 80e3;
    std::vector<double> z, r;
    for (int k = 0; k <= 1600; ++k) {
        z.push_back(length * k / 1600.0);
        r.push_back(std::exp(-a * z.back()));
    }
    for (double x : {0.0, 1e-4, 3e-2, 2.0}) {
        CAPTURE(x);
        const std::complex<double> rate(-a, x);
        const auto want = (std::exp(rate * length) - 1.0) / rate;
        CHECK(std::abs(z_integral(z, r, x, 0, z.size() - 1) - want) < 1e-10 * std::abs(want));
        CHECK(std::abs(inner_z_integral(z, r, x) - want) < 1e-10 * std::abs(want));
        // pieces add up
        const auto parts = z_integral(z, r, x, 0, 700) + z_integral(z, r, x, 700, z.size() - 1);
        CHECK(std::abs(parts - want) < 1e-10 * std::abs(want));
    }
    CHECK(z_integral(z, r, 1.0, 5, 5) == std::complex<double>(0.0));
}

TEST_CASE("island nodes integrate polynomials over the band") {
    auto errors = [](double focus, int intervals) {
        const auto n = island_nodes(192.95e12, 193.05e12, focus, intervals);
        double m2 = 0.0;
        for (std::size_t k = 0; k < n.x.size(); ++k) {
            CHECK(n.x[k] >= 192.95e12 - 1.0);
            CHECK(n.x[k] <= 193.05e12 + 1.0);
            const double u = (n.x[k] - 193.0e12) / 50e9;
            m2 += n.w[k] * u * u;
        }
        return std::pair{testing::rel_diff(std::accumulate(n.w.begin(), n.w.end(), 0.0), 100e9),
                         testing::rel_diff(m2, 100e9 / 3.0)};
    };
    for (double focus : {193.0e12, 192.95e12, 193.05e12, 193.3e12}) {
        CAPTURE(focus);
        const auto [w64, m64] = errors(focus, 64);
        const auto [w128, m128] = errors(focus, 128);
        const auto [w512, m512] = errors(focus, 512);
        // Simpson in the graded variable: fourth order
        CHECK(w64 / w128 > 10.0);
        CHECK(m64 / m128 > 10.0);
        CHECK(w512 < 1e-7);
        CHECK(m512 < 1e-5);
    }
}

TEST_CASE("islands cover the interferer and CUT bands") {
    const auto link = testing::simple_link(3, 193.0, 125, 1e-3, 80);
    const auto isl = island(link.channels[0], link.channels[2]);
    CHECK(isl.f1_lo == doctest::Approx(193.25e12 - 50e9));
    CHECK(isl.f2_hi == doctest::Approx(193.0e12 + 50e9));
    CHECK(isl.f == link.channels[0].center_frequency);
    CHECK_FALSE(isl.spm);
    CHECK(island(link.channels[1], link.channels[1]).spm);
}

namespace {

struct Classic {
    LinkSpec link = load_config_file(testing::source_path("configs/classic_3ch.json"));
    LinkPropagation prop = propagate_link(link);
    LinkFits fits = fit_link(prop, link.fitter);
    MlFactors ml = MlFactors::ones(1, 3);

    OracleReport run(int grid, OracleMode mode, ProfileSource source) const {
        return nli_numeric_at(link, prop, fits, ml, grid, mode, source);
    }
};

const Classic& classic() {
    static const Classic c;
    return c;
}

}  // namespace

TEST_CASE("oracle matches the finite-length GN reference") {
    const auto rep = classic().run(128, OracleMode::exact, ProfileSource::solver);
    const double exact[] = {frozen::gn_exact_3ch_cut0, frozen::gn_exact_3ch_cut1, frozen::gn_exact_3ch_cut2};
    for (std::size_t c = 0; c < 3; ++c) {
        CAPTURE(c);
        CHECK(testing::rel_diff(rep.cuts[c].power, exact[c]) < 1e-4);
        CHECK(rep.cuts[c].psd == doctest::Approx(rep.cuts[c].power / 100e9));
    }
}

TEST_CASE("split mode is neutral without an end segment") {
    const auto exact = classic().run(32, OracleMode::exact, ProfileSource::solver);
    const auto split = classic().run(32, OracleMode::split, ProfileSource::solver);
    for (std::size_t c = 0; c < 3; ++c) CHECK(testing::rel_diff(split.cuts[c].power, exact.cuts[c].power) < 1e-12);
}

TEST_CASE("fitted profiles agree with solved ones for pure loss") {
    const auto solved = classic().run(32, OracleMode::exact, ProfileSource::solver);
    const auto fitted = classic().run(32, OracleMode::exact, ProfileSource::fitted);
    for (std::size_t c = 0; c < 3; ++c) CHECK(testing::rel_diff(fitted.cuts[c].power, solved.cuts[c].power) < 1e-6);
}

TEST_CASE("oracle grid must be a multiple of 4") {
    CHECK_THROWS_AS(classic().run(30, OracleMode::exact, ProfileSource::solver), ConfigError);
}

TEST_CASE("oracle with refinement check and comparison") {
    auto link = load_config_file(testing::source_path("configs/classic_3ch.json"));
    const auto prop = propagate_link(link);
    const auto fits = fit_link(prop, link.fitter);
    const auto ml = MlFactors::ones(1, 3);
    const auto rep = nli_numeric(link, prop, fits, ml);
    for (const auto& c : rep.cuts) CHECK(std::abs(c.refine_db) <= link.oracle.convergence_db);

    const auto cfm = total_nli(link, prop, fits, ml);
    const auto cmp = compare(cfm, rep);
    REQUIRE(cmp.rows.size() == 3);
    double worst = 0.0;
    for (const auto& row : cmp.rows) {
        CHECK(row.delta_db == doctest::Approx(10.0 * std::log10(row.cfm_power / row.oracle_power)));
        worst = std::max(worst, std::abs(row.delta_db));
    }
    CHECK(cmp.max_abs_db == worst);
    CHECK(cmp.max_abs_db < 0.02);
}

TEST_CASE("coarse grids fail the refinement check") {
    auto link = load_config_file(testing::source_path("configs/classic_3ch.json"));
    link.oracle.island_grid = 4;
    link.oracle.convergence_db = 1e-6;
    const auto prop = propagate_link(link);
    const auto fits = fit_link(prop, link.fitter);
    CHECK_THROWS_AS(nli_numeric(link, prop, fits, MlFactors::ones(1, 3)), QuadratureError);
}
