#include <doctest.h>

#include "oracles/frozen_values.hpp"
#include "support.hpp"
#include "uwbnli/config.hpp"
#include "uwbnli/errors.hpp"
#include "uwbnli/loss_fitter.hpp"
#include "uwbnli/raman_solver.hpp"

using namespace uwbnli;

namespace {

SegmentFit seg(double a0, double a1, double sigma, double p0) {
    SegmentFit s;
    s.alpha0 = a0;
    s.alpha1 = a1;
    s.sigma = sigma;
    s.p_start = p0;
    return s;
}

// P(z) from integrating the loss law with composite Simpson, independent of model_power.
double power_by_quadrature(const SegmentFit& s, double z) {
    const int n = 2000;
    const double h = z / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double a = s.alpha0 + s.alpha1 * std::exp(-s.sigma * i * h);
        acc += a * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    return s.p_start * std::exp(-2.0 * acc * h / 3.0);
}

std::vector<double> grid(double length, double step) {
    std::vector<double> z;
    const auto n = static_cast<std::size_t>(std::ceil(length / step - 1e-9));
    for (std::size_t k = 0; k <= n; ++k) z.push_back(length * static_cast<double>(k) / static_cast<double>(n));
    return z;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("model power") {
    const auto s = seg(2.3026e-5, 5e-6, 5e-4, 2e-3);
    CHECK(model_power(s, 0.0) == 2e-3);
    CHECK(rel(model_power(s, 1e4), frozen::model_power_10km) < 1e-13);
    for (double z : {1e3, 2.5e4, 8e4}) CHECK(rel(model_power(s, z), power_by_quadrature(s, z)) < 1e-10);
    const auto flat = seg(2.3026e-5, 0.0, 5e-4, 1e-3);
    CHECK(rel(model_power(flat, 5e4), 1e-3 * std::exp(-2.0 * 2.3026e-5 * 5e4)) < 1e-14);
}

TEST_CASE("split point") {
    const auto z = grid(100e3, 50.0);
    std::vector<double> v(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) v[k] = 1.0 + std::abs(z[k] - 70e3) / 1e3;
    CHECK(find_split(z, v) == doctest::Approx(70e3));
    std::vector<double> mono(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) mono[k] = std::exp(-z[k] / 2e4);
    CHECK(find_split(z, mono) == z.back());
    FitterOptions opts;
    const auto fit = fit_span(z, mono, 2.5e-5, opts);
    CHECK_FALSE(fit.end.has_value());
    CHECK(fit.split_z == z.back());
}

TEST_CASE("single segment round trip") {
    FitterOptions opts;
    const auto truth = seg(2.3026e-5, 8e-6, 4e-4, 2e-3);
    const auto t = grid(60e3, 50.0);
    std::vector<double> p(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) p[k] = model_power(truth, t[k]);
    const auto fit = fit_segment(t, p, opts);
    CHECK(rel(fit.alpha0, truth.alpha0) < 1e-2);
    CHECK(rel(fit.alpha1, truth.alpha1) < 1e-2);
    CHECK(rel(fit.sigma, truth.sigma) < 1e-2);
    CHECK(fit.weighted_mse < 1e-10);
    CHECK(fit.p_start == 2e-3);
    CHECK(fit.samples == static_cast<int>(t.size()));
}

TEST_CASE("pure exponential leaves sigma unconstrained") {
    FitterOptions opts;
    const auto t = grid(80e3, 50.0);
    std::vector<double> p(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) p[k] = 1e-3 * std::exp(-2.0 * 2.3026e-5 * t[k]);
    const auto fit = fit_segment(t, p, opts);
    CHECK(std::abs(fit.alpha1) <= 1e-8);
    CHECK(rel(fit.alpha0, 2.3026e-5) < 1e-3);
    CHECK(fit.sigma_unconstrained);
    CHECK(fit.sigma > 0.0);
}

TEST_CASE("two segment round trip with flipped end") {
    FitterOptions opts;
    const double length = 100e3, split = 70e3;
    const auto st = seg(2.3026e-5, 8e-6, 4e-4, 2e-3);
    auto end = seg(-1e-6, 5e-5, 1e-4, 1.0);
    const double p_split = model_power(st, split);
    end.p_start = p_split / model_power(end, length - split);
    const auto z = grid(length, 50.0);
    std::vector<double> p(z.size());
    for (std::size_t k = 0; k < z.size(); ++k)
        p[k] = z[k] <= split ? model_power(st, z[k]) : model_power(end, length - z[k]);

    const auto fit = fit_span(z, p, 2.3026e-5, opts);
    REQUIRE(fit.end.has_value());
    CHECK(fit.split_z == doctest::Approx(split));
    CHECK(rel(fit.st.alpha0, st.alpha0) < 1e-2);
    CHECK(rel(fit.st.alpha1, st.alpha1) < 1e-2);
    CHECK(rel(fit.st.sigma, st.sigma) < 1e-2);
    CHECK(rel(fit.end->alpha0, end.alpha0) < 1e-2);
    CHECK(rel(fit.end->alpha1, end.alpha1) < 1e-2);
    CHECK(rel(fit.end->sigma, end.sigma) < 1e-2);
    CHECK(fit.end->weighted_mse < 1e-10);

    // flip consistency: end model at t reproduces P(L - t), exactly at t = 0
    CHECK(model_power(*fit.end, 0.0) == p.back());
    for (std::size_t k = z.size() - 1; z[k] > split; k -= 50)
        CHECK(rel(model_power(*fit.end, length - z[k]), p[k]) < 1e-6);
    const auto rebuilt = synthesize(fit, z);
    for (std::size_t k = 0; k < z.size(); k += 97) CHECK(rel(rebuilt[k], p[k]) < 1e-6);
}

TEST_CASE("end fits honor the alpha0 constraint on a pumped span") {
    const auto link = load_config_file(testing::source_path("configs/desk_backward_pump.json"));
    const auto prop = propagate_link(link);
    const auto fits = fit_profile(prop.profiles[0], link.fitter);
    for (std::size_t c = 0; c < fits.size(); ++c) {
        REQUIRE(fits[c].end.has_value());
        const double cap = link.fitter.alpha0_cap_fraction * prop.profiles[0].waves[prop.profiles[0].channel_wave[c]].alpha;
        CHECK(fits[c].end->alpha0 <= 0.0);
        CHECK(fits[c].end->alpha0 >= -cap * (1.0 + 1e-12));
        CHECK(fits[c].end->sigma > 0.0);
        CHECK(fits[c].st.segment_length == doctest::Approx(fits[c].split_z));
        CHECK(fits[c].end->segment_length == doctest::Approx(prop.profiles[0].length() - fits[c].split_z));
    }
}

TEST_CASE("low-power samples barely move the fit") {
    FitterOptions opts;
    const auto truth = seg(2.3026e-5, 8e-6, 4e-4, 2e-3);
    const auto t = grid(180e3, 50.0);
    std::vector<double> p(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) p[k] = model_power(truth, t[k]);
    REQUIRE(10.0 * std::log10(p.front() / p.back()) > 30.0);
    const auto base = fit_segment(t, p, opts);
    auto bumped = p;
    bumped.back() *= 1.1;
    const auto fit = fit_segment(t, bumped, opts);
    CHECK(rel(fit.alpha0, base.alpha0) < 1e-3);
    CHECK(rel(fit.alpha1, base.alpha1) < 1e-3);
    CHECK(rel(fit.sigma, base.sigma) < 1e-3);
}

TEST_CASE("fitter input errors") {
    FitterOptions opts;
    std::vector<double> t = {0.0, 1.0, 2.0}, p = {1.0, 0.9, 0.8};
    CHECK_THROWS_AS(fit_segment(t, p, opts), NumericError);
    t = {0.0, 1.0, 2.0, 3.0};
    p = {1.0, 0.9, 0.0, 0.7};
    CHECK_THROWS_AS(fit_segment(t, p, opts), NumericError);
    const auto z = grid(10e3, 50.0);
    const auto dark = fit_span(z, std::vector<double>(z.size(), 0.0), 2.3e-5, opts);
    CHECK(dark.dark);
}
