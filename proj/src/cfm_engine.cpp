#include "uwbnli/cfm_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "uwbnli/errors.hpp"
#include "uwbnli/units.hpp"

namespace uwbnli {

using std::numbers::pi;

double gamma_nl(double f1, double f2, const FiberSpec& fiber) {
    return 2.0 * pi * f1 / units::speed_of_light * 2.0 * fiber.n2 / (fiber.aeff(f1) + fiber.aeff(f2));
}

double beta2_eff(double f1, double f2, const FiberSpec& fiber) {
    const double d1 = f1 - fiber.f_ref;
    const double d2 = f2 - fiber.f_ref;
    return fiber.beta2 + pi * fiber.beta3 * (d1 + d2) +
           2.0 / 3.0 * pi * pi * fiber.beta4 * (d1 * d1 + d1 * d2 - d2 * d2);
}

double chi(double f1, double f2, double f, const FiberSpec& fiber) {
    return 4.0 * pi * pi * (f1 - f) * (f2 - f) * beta2_eff(f1, f2, fiber);
}

int truncation_order(double alpha1, double sigma) {
    return static_cast<int>(std::floor(10.0 * std::abs(2.0 * alpha1 / sigma)));
}

double psi(double f_m, double f_cut, double r_m, double r_cut, int j, int k, const SegmentFit& seg,
           const FiberSpec& fiber) {
    const double b2 = beta2_eff(f_m, f_cut, fiber);
    const double offset = f_m - f_cut + (j % 2 == 0 ? 0.5 : -0.5) * r_m;
    return std::asinh(pi * pi * b2 * r_cut * offset / (2.0 * seg.alpha0 + k * seg.sigma));
}

MlFactors MlFactors::ones(std::size_t spans, std::size_t channels) {
    return {std::vector<std::vector<double>>(spans, std::vector<double>(channels, 1.0))};
}

void MlFactors::check(std::size_t spans, std::size_t channels) const {
    if (rho.size() != spans) throw ConfigError("rho: expected one row per span");
    for (const auto& row : rho) {
        if (row.size() != channels) throw ConfigError("rho: expected one column per channel");
        for (double v : row)
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("rho: entries must be > 0");
    }
}

namespace {

// Below this |beta2| the asinh bracket is replaced by its linear limit.
constexpr double beta_floor = 1e-35;

struct Bracket {
    double beta;       // |beta2|
    double c0, c1;     // pi^2 R_cut (f_m - f_cut +- R_m / 2)
    double r_m;
    double r_cut;

    // Sum_j (-1)^j asinh(beta c_j / d) / beta
    double value(double d) const {
        if (beta < beta_floor) return pi * pi * r_cut * r_m / d;
        return (std::asinh(beta * c0 / d) - std::asinh(beta * c1 / d)) / beta;
    }

    // d/dd of value(d)
    double slope(double d) const {
        if (beta < beta_floor) return -pi * pi * r_cut * r_m / (d * d);
        auto one = [&](double c) {
            const double u = beta * c / d;
            return -u / d / std::sqrt(1.0 + u * u) / beta;
        };
        return one(c0) - one(c1);
    }
};

// x^n e^{-x} / n!, evaluated in log form so large orders do not overflow.
std::vector<double> series_weights(double x, int order) {
    std::vector<double> t(static_cast<std::size_t>(order) + 1, 0.0);
    if (x == 0.0) {
        t[0] = 1.0;
        return t;
    }
    const double lx = std::log(std::abs(x));
    for (int n = 0; n <= order; ++n) {
        const double mag = std::exp(n * lx - std::lgamma(n + 1.0) - x);
        t[static_cast<std::size_t>(n)] = (x < 0.0 && n % 2 == 1) ? -mag : mag;
    }
    return t;
}

}  // namespace

double series_sum(const TermInputs& in, const SegmentFit& seg) {
    const double sigma = seg.sigma;
    const double x = 2.0 * seg.alpha1 / sigma;
    const int order = in.order;
    const auto t = series_weights(x, order);
    const Bracket br{std::abs(in.beta2), pi * pi * in.r_cut * (in.f_m - in.f_cut + 0.5 * in.r_m),
                     pi * pi * in.r_cut * (in.f_m - in.f_cut - 0.5 * in.r_m), in.r_m, in.r_cut};
    const double eps = 1e-12 * sigma;

    std::vector<double> d(t.size()), h(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        d[k] = 2.0 * seg.alpha0 + static_cast<double>(k) * sigma;
        if (k == 0 ? std::abs(d[k]) < eps : !(d[k] > eps)) {
            std::ostringstream os;
            os << "series denominator 2 alpha0 + " << k << " sigma vanishes (alpha0 = " << seg.alpha0
               << ", sigma = " << sigma << ")";
            throw NumericError(os.str());
        }
        h[k] = br.value(d[k]);
    }

    double sum = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] == 0.0) continue;
        for (std::size_t q = 0; q < t.size(); ++q) {
            if (t[q] == 0.0) continue;
            const double den = d[k] + d[q];
            if (std::abs(den) >= eps) {
                sum += t[k] * t[q] * h[k] / den;
            } else if (k < q) {
                // (k, q) and (q, k) together tend to the slope of the bracket.
                sum += t[k] * t[q] * br.slope(d[q]);
            } else if (k == q) {
                throw NumericError("series denominator 4 alpha0 + 2k sigma vanishes on the diagonal");
            }
        }
    }
    return sum;
}

double segment_nli(const TermInputs& in, const SegmentFit& seg) {
    if (in.p_cut == 0.0 || in.p_m == 0.0 || in.gamma == 0.0) return 0.0;
    const double s = series_sum(in, seg);
    const double pre = 16.0 / 27.0 * in.gamma * in.gamma * in.p_cut * in.p_m * in.p_m * in.rho * in.gain *
                       (in.spm ? 1.0 : 2.0) / (2.0 * pi * in.r_m * in.r_m);
    double v = pre * s;
    if (v < 0.0) {
        if (v > -1e-15) return 0.0;
        std::ostringstream os;
        os << "closed-form term came out negative (" << v << " W)";
        throw NumericError(os.str());
    }
    return v;
}

LinkFits fit_link(const LinkPropagation& prop, const FitterOptions& opts) {
    LinkFits fits;
    fits.reserve(prop.profiles.size());
    for (const auto& profile : prop.profiles) fits.push_back(fit_profile(profile, opts));
    return fits;
}

NliReport total_nli(const LinkSpec& link, const LinkPropagation& prop, const LinkFits& fits,
                    const MlFactors& ml) {
    const std::size_t ns = link.spans.size();
    const std::size_t nc = link.channels.size();
    ml.check(ns, nc);
    if (fits.size() != ns || prop.profiles.size() != ns) throw NumericError("total_nli: span count mismatch");

    NliReport report;
    report.cuts.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        report.cuts[c].frequency = link.channels[c].center_frequency;
        report.cuts[c].symbol_rate = link.channels[c].symbol_rate;
    }

    const int extra = link.engine.extra_terms;
    for (std::size_t s = 0; s < ns; ++s) {
        const auto& fiber = link.spans[s].fiber;
        // Shared bound per contribution: max over interferers of (M + 1).
        int shared[2] = {0, 0};
        for (std::size_t m = 0; m < nc; ++m) {
            const auto& f = fits[s][m];
            if (f.dark) continue;
            shared[0] = std::max(shared[0], truncation_order(f.st.alpha1, f.st.sigma) + 1);
            if (f.end) shared[1] = std::max(shared[1], truncation_order(f.end->alpha1, f.end->sigma) + 1);
        }
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& cut = link.channels[c];
            for (std::size_t m = 0; m < nc; ++m) {
                const auto& mch = link.channels[m];
                const auto& fit = fits[s][m];
                if (fit.dark) continue;
                for (int i = 1; i <= 2; ++i) {
                    if (i == 2 && !fit.end) continue;
                    const SegmentFit& seg = i == 1 ? fit.st : *fit.end;
                    TermInputs in;
                    in.f_m = mch.center_frequency;
                    in.f_cut = cut.center_frequency;
                    in.r_m = mch.symbol_rate;
                    in.r_cut = cut.symbol_rate;
                    in.gamma = gamma_nl(in.f_cut, in.f_m, fiber);
                    in.beta2 = beta2_eff(in.f_m, in.f_cut, fiber);
                    in.p_cut = i == 1 ? prop.launch[s][c] : prop.output[s][c];
                    in.p_m = i == 1 ? prop.launch[s][m] : prop.output[s][m];
                    in.rho = ml.at(s, m);
                    in.gain = i == 1 ? prop.gamma_st[s][c] : prop.gamma_end[s][c];
                    in.spm = c == m;
                    in.order = (link.engine.series_bound == SeriesBound::shared
                                    ? shared[i - 1]
                                    : truncation_order(seg.alpha1, seg.sigma)) +
                               extra;
                    const double p = segment_nli(in, seg);
                    report.terms.push_back({c, s, i, m, p, in.order});
                    report.cuts[c].power += p;
                }
            }
        }
    }
    for (auto& cut : report.cuts) cut.psd = cut.power / cut.symbol_rate;

    std::size_t pinned_series = 0, pinned_alpha0 = 0;
    for (const auto& span : fits) {
        for (const auto& f : span) {
            pinned_series += f.st.series_at_bound + (f.end && f.end->series_at_bound);
            pinned_alpha0 += f.end && f.end->alpha0_at_bound;
        }
    }
    if (pinned_series > 0) {
        report.warnings.push_back(std::to_string(pinned_series) +
                                  " segment fits hit the series-ratio limit |2 alpha1 / sigma|");
    }
    if (pinned_alpha0 > 0) {
        report.warnings.push_back(std::to_string(pinned_alpha0) +
                                  " end-segment fits have alpha0 pinned to its bound");
    }
    return report;
}

}  // namespace uwbnli
