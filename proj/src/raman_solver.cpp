#include "uwbnli/raman_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "uwbnli/errors.hpp"
#include "uwbnli/units.hpp"

namespace uwbnli {

double photon_flux_factor(double f_i, double f_j) {
    if (f_i > f_j) return f_i / f_j;
    if (f_i == f_j) return 0.0;
    return 1.0;
}

RamanSystem::RamanSystem(std::vector<Wave> waves, const RamanGainTable& gain) : waves_(std::move(waves)) {
    const std::size_t n = waves_.size();
    k_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double fi = waves_[i].frequency;
            const double fj = waves_[j].frequency;
            k_[i * n + j] = photon_flux_factor(fi, fj) * gain(fj - fi);
        }
    }
}

double RamanSystem::rate(std::size_t i, const std::vector<double>& power) const {
    const std::size_t n = waves_.size();
    const double* row = &k_[i * n];
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * power[j];
    return acc - 2.0 * waves_[i].alpha;
}

std::vector<double> RamanSystem::rhs(const std::vector<double>& power) const {
    std::vector<double> d(waves_.size());
    for (std::size_t i = 0; i < waves_.size(); ++i) {
        const double g = rate(i, power) * power[i];
        d[i] = waves_[i].direction == Direction::forward ? g : -g;
    }
    return d;
}

namespace {

std::string wave_label(const char* prefix, std::size_t index, double f) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%zu_%.4f", prefix, index, f / units::thz);
    return buf;
}

// Cubic value at the midpoint of [k, k+1] from four neighbouring samples.
double midpoint(const std::vector<double>& v, std::size_t k) {
    const std::size_t n = v.size();
    double m;
    if (k == 0) {
        m = (5.0 * v[0] + 15.0 * v[1] - 5.0 * v[2] + v[3]) / 16.0;
    } else if (k + 2 >= n) {
        m = (v[n - 4] - 5.0 * v[n - 3] + 15.0 * v[n - 2] + 5.0 * v[n - 1]) / 16.0;
    } else {
        m = (-v[k - 1] + 9.0 * v[k] + 9.0 * v[k + 1] - v[k + 2]) / 16.0;
    }
    return std::max(m, 0.0);
}

class Sweeper {
public:
    Sweeper(const RamanSystem& sys, std::size_t steps, double h, std::vector<std::vector<double>>& power)
        : sys_(sys), steps_(steps), h_(h), power_(power), full_(sys.size()) {}

    // Integrate the waves in `own` along their direction of travel, holding
    // every other wave at its stored samples. Writes into the power matrix.
    void run(const std::vector<std::size_t>& own, bool forward) {
        const std::size_t m = own.size();
        if (m == 0) return;
        std::vector<char> is_own(sys_.size(), 0);
        for (auto w : own) is_own[w] = 1;
        other_.clear();
        for (std::size_t w = 0; w < sys_.size(); ++w)
            if (!is_own[w]) other_.push_back(w);

        std::vector<double> x(m), xs(m), k1(m), k2(m), k3(m), k4(m);
        const std::size_t start = forward ? 0 : steps_;
        for (std::size_t a = 0; a < m; ++a) x[a] = power_[own[a]][start];

        for (std::size_t s = 0; s < steps_; ++s) {
            const std::size_t from = forward ? s : steps_ - s;
            const std::size_t to = forward ? s + 1 : steps_ - s - 1;
            const std::size_t lo = std::min(from, to);

            set_other_node(from);
            eval(own, x, k1);
            set_other_mid(lo);
            for (std::size_t a = 0; a < m; ++a) xs[a] = x[a] + 0.5 * h_ * k1[a];
            eval(own, xs, k2);
            for (std::size_t a = 0; a < m; ++a) xs[a] = x[a] + 0.5 * h_ * k2[a];
            eval(own, xs, k3);
            set_other_node(to);
            for (std::size_t a = 0; a < m; ++a) xs[a] = x[a] + h_ * k3[a];
            eval(own, xs, k4);

            for (std::size_t a = 0; a < m; ++a) {
                double v = x[a] + h_ / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
                if (!std::isfinite(v)) {
                    throw SolverError("non-finite power in " + sys_.waves()[own[a]].label +
                                          "; reduce the step size",
                                      std::numeric_limits<double>::infinity());
                }
                if (v < 0.0) {
                    v = 0.0;
                    clamped_ = true;
                }
                x[a] = v;
                power_[own[a]][to] = v;
            }
        }
    }

    bool clamped() const { return clamped_; }

private:
    void set_other_node(std::size_t k) {
        for (auto w : other_) full_[w] = power_[w][k];
    }

    void set_other_mid(std::size_t k) {
        for (auto w : other_) full_[w] = midpoint(power_[w], k);
    }

    // Derivative along the direction of travel: rate * P for either direction.
    void eval(const std::vector<std::size_t>& own, const std::vector<double>& x, std::vector<double>& out) {
        for (std::size_t a = 0; a < own.size(); ++a) full_[own[a]] = std::max(x[a], 0.0);
        for (std::size_t a = 0; a < own.size(); ++a) out[a] = sys_.rate(own[a], full_) * full_[own[a]];
    }

    const RamanSystem& sys_;
    std::size_t steps_;
    double h_;
    std::vector<std::vector<double>>& power_;
    std::vector<double> full_;
    std::vector<std::size_t> other_;
    bool clamped_ = false;
};

}  // namespace

PowerProfile solve_span(const SpanSpec& span, const std::vector<Channel>& channels,
                        const std::vector<double>& launch, const SolverOptions& opts) {
    if (launch.size() != channels.size()) throw ConfigError("solve_span: launch vector size mismatch");
    for (double p : launch)
        if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("solve_span: launch powers must be >= 0");
    if (!(span.length > 0.0)) throw ConfigError("solve_span: span length must be > 0");
    if (!(opts.step > 0.0) || !(opts.step < span.length / 10.0))
        throw ConfigError("solve_span: step must be positive and below a tenth of the span length");

    const GridOrder order = grid_order(channels, span.pumps);
    std::vector<Wave> waves;
    waves.reserve(order.order.size());
    for (const auto& ref : order.order) {
        Wave w;
        w.kind = ref.kind;
        w.index = ref.index;
        w.frequency = ref.frequency;
        w.alpha = span.fiber.alpha(ref.frequency);
        if (ref.kind == WaveRef::Kind::channel) {
            w.direction = Direction::forward;
            w.label = wave_label("ch", ref.index, ref.frequency);
        } else {
            w.direction = span.pumps[ref.index].direction;
            w.label = wave_label("pump", ref.index, ref.frequency);
        }
        waves.push_back(std::move(w));
    }
    const RamanSystem sys(waves, span.fiber.raman_gain);

    const auto steps = static_cast<std::size_t>(std::ceil(span.length / opts.step - 1e-9));
    const double h = span.length / static_cast<double>(steps);

    PowerProfile prof;
    prof.waves = waves;
    prof.channel_wave = order.channel_pos;
    prof.pump_wave = order.pump_pos;
    prof.z.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) prof.z[k] = static_cast<double>(k) * h;
    prof.z[steps] = span.length;
    prof.power.assign(waves.size(), std::vector<double>(steps + 1, 0.0));

    std::vector<std::size_t> fwd, bwd;
    for (std::size_t w = 0; w < waves.size(); ++w) {
        double boundary;
        if (waves[w].kind == WaveRef::Kind::channel) {
            boundary = launch[waves[w].index];
        } else {
            boundary = span.pumps[waves[w].index].injected_power;
        }
        if (waves[w].direction == Direction::forward) {
            fwd.push_back(w);
            prof.power[w][0] = boundary;
        } else {
            bwd.push_back(w);
            // Initial guess: loss-only decay from the injection point.
            for (std::size_t k = 0; k <= steps; ++k)
                prof.power[w][k] = boundary * std::exp(-2.0 * waves[w].alpha * (span.length - prof.z[k]));
        }
    }

    Sweeper sweeper(sys, steps, h, prof.power);
    if (bwd.empty()) {
        sweeper.run(fwd, true);
        prof.iterations = 1;
        prof.clamped = sweeper.clamped();
        return prof;
    }

    std::vector<std::vector<double>> previous(bwd.size());
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iterations; ++it) {
        for (std::size_t b = 0; b < bwd.size(); ++b) previous[b] = prof.power[bwd[b]];
        sweeper.run(fwd, true);
        sweeper.run(bwd, false);
        residual = 0.0;
        for (std::size_t b = 0; b < bwd.size(); ++b) {
            auto& now = prof.power[bwd[b]];
            const auto& old = previous[b];
            double scale = 0.0;
            for (std::size_t k = 0; k <= steps; ++k) scale = std::max({scale, now[k], old[k]});
            if (scale > 0.0) {
                for (std::size_t k = 0; k <= steps; ++k)
                    residual = std::max(residual, std::abs(now[k] - old[k]) / scale);
            }
        }
        prof.iterations = it;
        if (residual < opts.bvp_tolerance) {
            // Final forward pass against the accepted backward field.
            sweeper.run(fwd, true);
            prof.residual = residual;
            prof.clamped = sweeper.clamped();
            return prof;
        }
        for (std::size_t b = 0; b < bwd.size(); ++b) {
            auto& now = prof.power[bwd[b]];
            const auto& old = previous[b];
            for (std::size_t k = 0; k <= steps; ++k)
                now[k] = opts.damping * now[k] + (1.0 - opts.damping) * old[k];
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "backward-pump sweeps did not converge after %d iterations (residual %.3g)",
                  opts.max_iterations, residual);
    throw SolverError(buf, residual);
}

LinkPropagation propagate_link(const LinkSpec& link) {
    const std::size_t ns = link.spans.size();
    const std::size_t nc = link.channels.size();
    LinkPropagation out;
    out.launch.assign(ns, std::vector<double>(nc, 0.0));
    out.output = out.transfer = out.post_gain = out.gamma_st = out.gamma_end = out.launch;

    std::vector<double> launch(nc);
    for (std::size_t c = 0; c < nc; ++c) launch[c] = link.channels[c].launch_power;

    for (std::size_t s = 0; s < ns; ++s) {
        const auto& span = link.spans[s];
        out.launch[s] = launch;
        PowerProfile prof = solve_span(span, link.channels, launch, link.solver);
        if (prof.clamped) {
            out.warnings.push_back("span " + std::to_string(s + 1) +
                                   ": negative power clamped to 0; the step size may be too large");
        }
        std::vector<double> next(nc);
        for (std::size_t c = 0; c < nc; ++c) {
            const double in = launch[c];
            const double outp = prof.channel_at_end(c);
            out.output[s][c] = outp;
            // A dark channel has no defined transfer; it carries no NLI either.
            out.transfer[s][c] = in > 0.0 ? outp / in : 1.0;
            if (span.post_gain.kind == PostGain::Kind::transparent) {
                out.post_gain[s][c] = (in > 0.0 && outp > 0.0) ? in / outp : 1.0;
                next[c] = in;
            } else {
                const double g = span.post_gain.gain.at(link.channels[c].center_frequency);
                out.post_gain[s][c] = g;
                next[c] = outp * g;
            }
        }
        out.profiles.push_back(std::move(prof));
        launch = std::move(next);
    }

    // Accumulate from the last span backwards. Transparent spans contribute an
    // exact factor of one.
    std::vector<double> downstream(nc, 1.0);
    for (std::size_t s = ns; s-- > 0;) {
        const bool transparent = link.spans[s].post_gain.kind == PostGain::Kind::transparent;
        for (std::size_t c = 0; c < nc; ++c) {
            out.gamma_end[s][c] = out.post_gain[s][c] * downstream[c];
            out.gamma_st[s][c] = out.transfer[s][c] * out.gamma_end[s][c];
            if (transparent && out.launch[s][c] > 0.0) out.gamma_st[s][c] = downstream[c];
            downstream[c] = out.gamma_st[s][c];
        }
    }
    return out;
}

}  // namespace uwbnli
