#include "uwbnli/loss_fitter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "uwbnli/errors.hpp"

namespace uwbnli {

double model_power(const SegmentFit& fit, double z) {
    if (z == 0.0) return fit.p_start;
    const double decay = fit.sigma > 0.0 ? std::expm1(-fit.sigma * z) / fit.sigma : -z;
    return fit.p_start * std::exp(-2.0 * fit.alpha0 * z + 2.0 * fit.alpha1 * decay);
}

std::size_t argmin_index(std::span<const double> power) {
    return static_cast<std::size_t>(std::min_element(power.begin(), power.end()) - power.begin());
}

double find_split(std::span<const double> z, std::span<const double> power) {
    return z[argmin_index(power)];
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Inner {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double mse = inf;
};

// Fixed-sigma weighted linear problem in (alpha0, alpha1) with box bounds.
class LinearProblem {
public:
    LinearProblem(std::span<const double> t, std::span<const double> y, std::span<const double> w)
        : t_(t), y_(y), w_(w), b_(t.size()) {
        long double sw = 0.0L, saa = 0.0L, say = 0.0L;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const long double a = -2.0L * t[k];
            sw += w[k];
            saa += w[k] * a * a;
            say += w[k] * a * y[k];
        }
        sw_ = static_cast<double>(sw);
        saa_ = static_cast<double>(saa);
        say_ = static_cast<double>(say);
    }

    Inner solve(double sigma, double lo0, double hi0, double max_ratio) {
        long double sab = 0.0L, sbb = 0.0L, sby = 0.0L;
        for (std::size_t k = 0; k < t_.size(); ++k) {
            const double b = 2.0 * std::expm1(-sigma * t_[k]) / sigma;
            b_[k] = b;
            const long double a = -2.0L * t_[k];
            sab += w_[k] * a * b;
            sbb += w_[k] * static_cast<long double>(b) * b;
            sby += w_[k] * static_cast<long double>(b) * y_[k];
        }
        const double Sab = static_cast<double>(sab), Sbb = static_cast<double>(sbb), Sby = static_cast<double>(sby);
        const double lo1 = -0.5 * max_ratio * sigma, hi1 = 0.5 * max_ratio * sigma;

        std::array<std::pair<double, double>, 9> cand{};
        std::size_t nc = 0;
        const double det = saa_ * Sbb - Sab * Sab;
        if (det > 1e-13 * saa_ * Sbb) {
            cand[nc++] = {(say_ * Sbb - Sab * Sby) / det, (saa_ * Sby - Sab * say_) / det};
        }
        auto best1_given0 = [&](double a0) {
            return Sbb > 0.0 ? std::clamp((Sby - a0 * Sab) / Sbb, lo1, hi1) : 0.0;
        };
        auto best0_given1 = [&](double a1) { return std::clamp((say_ - a1 * Sab) / saa_, lo0, hi0); };
        for (double a0 : {lo0, hi0})
            if (std::isfinite(a0)) cand[nc++] = {a0, best1_given0(a0)};
        for (double a1 : {lo1, hi1})
            if (std::isfinite(a1)) cand[nc++] = {best0_given1(a1), a1};
        cand[nc++] = {best0_given1(0.0), 0.0};

        Inner best;
        for (std::size_t c = 0; c < nc; ++c) {
            const auto [a0, a1] = cand[c];
            if (!(a0 >= lo0 && a0 <= hi0 && a1 >= lo1 && a1 <= hi1) || !std::isfinite(a0 + a1)) continue;
            const double m = mse(a0, a1);
            if (m < best.mse) best = {a0, a1, m};
        }
        return best;
    }

    double sum_weights() const { return sw_; }

private:
    double mse(double a0, double a1) const {
        long double acc = 0.0L;
        for (std::size_t k = 0; k < t_.size(); ++k) {
            const long double r = y_[k] - (-2.0L * a0 * t_[k] + static_cast<long double>(a1) * b_[k]);
            acc += w_[k] * r * r;
        }
        return static_cast<double>(acc / sw_);
    }

    std::span<const double> t_, y_, w_;
    std::vector<double> b_;
    double sw_ = 0.0, saa_ = 0.0, say_ = 0.0;
};

}  // namespace

SegmentFit fit_segment(std::span<const double> t, std::span<const double> power, const FitterOptions& opts,
                       const SegmentConstraints& constraints) {
    const std::size_t n = t.size();
    if (n != power.size()) throw NumericError("fit_segment: sample size mismatch");
    if (n < 4) throw NumericError("fit_segment: need at least 4 samples");
    if (t[0] != 0.0) throw NumericError("fit_segment: first sample must be at t = 0");
    double pmax = 0.0;
    for (double p : power) {
        if (!(p > 0.0) || !std::isfinite(p)) throw NumericError("fit_segment: powers must be positive");
        pmax = std::max(pmax, p);
    }
    const double length = t[n - 1];
    if (!(length > 0.0)) throw NumericError("fit_segment: segment has zero length");

    std::vector<double> y(n), w(n);
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = std::log(power[k] / power[0]);
        w[k] = std::pow(power[k] / pmax, opts.weight_exponent);
    }
    LinearProblem lp(t, y, w);
    const bool end = constraints.end_segment;
    // The alpha0 bound already keeps end fits away from the runaway
    // (alpha0, alpha1) pairs the series-ratio limit exists for.
    const double ratio = end ? inf : opts.max_series_ratio;
    const double cap = constraints.alpha0_cap;
    // End segments: sigma is restricted to values whose free alpha0 already
    // lies in [-cap, 0]; anything else scores as infeasible.
    auto objective = [&](double sigma) {
        Inner in = lp.solve(sigma, -inf, inf, ratio);
        if (end && !(in.alpha0 >= -cap && in.alpha0 <= 0.0)) in.mse = inf;
        return in;
    };

    const double log_lo = std::log(opts.sigma_min_scale / length);
    const double log_hi = std::log(opts.sigma_max_scale / length);
    const int np = opts.scan_points;
    std::vector<double> grid;
    std::vector<Inner> free_fit;
    double free_min = inf, free_max = -inf;
    for (int i = 0; i < np; ++i) {
        const double g = log_lo + (log_hi - log_lo) * static_cast<double>(i) / (np - 1);
        const Inner f = lp.solve(std::exp(g), -inf, inf, ratio);
        if (end && i > 0) {
            // A feasible window narrower than the scan spacing: alpha0 jumps
            // across [-cap, 0] between neighbours, so bisect for a point inside.
            const double prev = free_fit.back().alpha0;
            const bool straddle = (prev > 0.0 && f.alpha0 < -cap) || (prev < -cap && f.alpha0 > 0.0);
            if (straddle) {
                double a = grid.back(), b = g;
                const bool rising = f.alpha0 > prev;
                for (int it = 0; it < 200; ++it) {
                    const double m = 0.5 * (a + b);
                    const Inner mid = lp.solve(std::exp(m), -inf, inf, ratio);
                    if (mid.alpha0 >= -cap && mid.alpha0 <= 0.0) {
                        grid.push_back(m);
                        free_fit.push_back(mid);
                        break;
                    }
                    if ((mid.alpha0 > 0.0) == rising) b = m; else a = m;
                }
            }
        }
        grid.push_back(g);
        free_fit.push_back(f);
        free_min = std::min(free_min, f.mse);
        free_max = std::max(free_max, f.mse);
    }
    std::vector<Inner> scan(grid.size());
    std::size_t ibest = 0;
    double jmin = inf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        scan[i] = free_fit[i];
        if (end && !(scan[i].alpha0 >= -cap && scan[i].alpha0 <= 0.0)) scan[i].mse = inf;
        if (scan[i].mse < jmin) {
            jmin = scan[i].mse;
            ibest = i;
        }
    }

    SegmentFit fit;
    fit.segment_length = length;
    fit.p_start = power[0];
    fit.samples = static_cast<int>(n);

    if (free_max - free_min <= 1e-9 * free_min + 1e-24) {
        // Every sigma fits equally well: the data carry no alpha1 information.
        const Inner flat = lp.solve(1.0 / length, end ? -cap : -inf, end ? 0.0 : inf, 0.0);
        fit.alpha0 = flat.alpha0;
        fit.alpha1 = 0.0;
        fit.sigma = 1.0 / length;
        fit.weighted_mse = flat.mse;
        fit.sigma_unconstrained = true;
        fit.alpha0_at_bound = end && (flat.alpha0 <= -cap || flat.alpha0 >= 0.0) && flat.alpha0 != 0.0;
    } else if (!std::isfinite(jmin)) {
        // No sigma satisfies the end-segment constraint: take the one with the
        // smallest violation and pin alpha0 to the nearer bound.
        double best_violation = inf;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Inner& in = free_fit[i];
            const double v = std::max(in.alpha0, 0.0) + std::max(-cap - in.alpha0, 0.0);
            if (v < best_violation) {
                best_violation = v;
                ibest = i;
            }
        }
        const double sigma = std::exp(grid[ibest]);
        const Inner in = lp.solve(sigma, -cap, 0.0, ratio);
        fit.alpha0 = in.alpha0;
        fit.alpha1 = in.alpha1;
        fit.sigma = sigma;
        fit.weighted_mse = in.mse;
        fit.alpha0_at_bound = true;
        fit.sigma_at_bound = ibest == 0 || ibest + 1 == grid.size();
    } else {
        double a = grid[ibest == 0 ? 0 : ibest - 1];
        double b = grid[std::min(ibest + 1, grid.size() - 1)];
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = objective(std::exp(c)).mse;
        double fd = objective(std::exp(d)).mse;
        while (b - a > opts.sigma_rel_tol) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = objective(std::exp(c)).mse;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = objective(std::exp(d)).mse;
            }
        }
        double sigma = std::exp(0.5 * (a + b));
        Inner best = objective(sigma);
        if (!(best.mse <= scan[ibest].mse)) {
            sigma = std::exp(grid[ibest]);
            best = scan[ibest];
        }
        fit.alpha0 = best.alpha0;
        fit.alpha1 = best.alpha1;
        fit.sigma = sigma;
        fit.weighted_mse = best.mse;
        fit.sigma_at_bound = ibest == 0 || ibest + 1 == grid.size();
        fit.series_at_bound = std::isfinite(ratio) && std::abs(std::abs(2.0 * fit.alpha1 / sigma) - ratio) <= 1e-12 * ratio;
    }
    return fit;
}

TwoSegmentFit fit_span(std::span<const double> z, std::span<const double> power, double alpha_lin,
                       const FitterOptions& opts) {
    const std::size_t n = z.size();
    if (n != power.size() || n < 2) throw NumericError("fit_span: bad profile");
    const double length = z[n - 1];
    TwoSegmentFit out;

    const double pmax = *std::max_element(power.begin(), power.end());
    if (!(pmax > 0.0)) {
        out.dark = true;
        out.split_z = length;
        out.st.alpha0 = alpha_lin;
        out.st.sigma = 1.0 / length;
        out.st.segment_length = length;
        out.st.sigma_unconstrained = true;
        return out;
    }

    const std::size_t last = n - 1;
    const auto ms = static_cast<std::size_t>(opts.min_samples);
    std::size_t idx = argmin_index(power);
    bool has_end = idx < last && last - idx + 1 >= ms && n >= 2 * ms - 1;
    if (has_end && idx + 1 < ms) idx = ms - 1;
    if (!has_end) idx = last;

    out.split_z = has_end ? z[idx] : length;
    out.st = fit_segment(z.subspan(0, idx + 1), power.subspan(0, idx + 1), opts);
    if (has_end) {
        const std::size_t m = last - idx + 1;
        std::vector<double> t(m), p(m);
        for (std::size_t k = 0; k < m; ++k) {
            t[k] = k == 0 ? 0.0 : length - z[last - k];
            p[k] = power[last - k];
        }
        SegmentConstraints c;
        c.end_segment = true;
        c.alpha0_cap = opts.alpha0_cap_fraction * alpha_lin;
        out.end = fit_segment(t, p, opts, c);
    }
    return out;
}

std::vector<TwoSegmentFit> fit_profile(const PowerProfile& profile, const FitterOptions& opts) {
    std::vector<TwoSegmentFit> fits;
    fits.reserve(profile.channel_wave.size());
    for (std::size_t c = 0; c < profile.channel_wave.size(); ++c) {
        const std::size_t w = profile.channel_wave[c];
        fits.push_back(fit_span(profile.z, profile.power[w], profile.waves[w].alpha, opts));
    }
    return fits;
}

std::vector<double> synthesize(const TwoSegmentFit& fit, std::span<const double> z) {
    std::vector<double> p(z.size());
    const double length = z.empty() ? 0.0 : z.back();
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (!fit.end || z[k] <= fit.split_z) {
            p[k] = model_power(fit.st, z[k]);
        } else {
            p[k] = model_power(*fit.end, length - z[k]);
        }
    }
    return p;
}

}  // namespace uwbnli
