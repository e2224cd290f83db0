#include "uwbnli/link_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uwbnli/errors.hpp"
#include "uwbnli/units.hpp"

namespace uwbnli {

const char* to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

const char* to_string(SeriesBound b) { return b == SeriesBound::per_channel ? "per_channel" : "shared"; }

const char* to_string(OracleMode m) { return m == OracleMode::exact ? "exact" : "split"; }

const char* to_string(ProfileSource s) { return s == ProfileSource::solver ? "solver" : "fitted"; }

RamanGainTable::RamanGainTable(std::vector<std::pair<double, double>> samples) {
    for (const auto& [df, cr] : samples) {
        if (df < 0.0) throw ConfigError("raman_gain: frequency shifts must be >= 0");
        if (cr < 0.0) throw ConfigError("raman_gain: gain coefficients must be >= 0");
    }
    std::sort(samples.begin(), samples.end());
    if (samples.empty() || samples.front().first > 0.0) samples.insert(samples.begin(), {0.0, 0.0});
    if (samples.front().second != 0.0) throw ConfigError("raman_gain: c_r(0) must be 0");
    table_ = Table1D(std::move(samples), "raman_gain");
}

RamanGainTable RamanGainTable::synthetic_demo() {
    using units::thz;
    using units::per_w_km;
    return RamanGainTable({{0.0, 0.0}, {13.0 * thz, 0.42 * per_w_km}, {25.0 * thz, 0.0}});
}

RamanGainTable RamanGainTable::zero() { return RamanGainTable({{0.0, 0.0}}); }

double RamanGainTable::operator()(double df) const {
    if (table_.empty() || table_.is_constant()) return 0.0;
    const double mag = table_.at_or(std::abs(df), 0.0);
    return df < 0.0 ? -mag : mag;
}

PostGain PostGain::flat_db(double db) {
    PostGain g;
    g.kind = Kind::explicit_table;
    g.gain = Table1D::constant(units::db_to_linear(db), "post_gain");
    return g;
}

GridOrder grid_order(const std::vector<Channel>& channels, const std::vector<Pump>& pumps) {
    GridOrder g;
    g.order.reserve(channels.size() + pumps.size());
    for (std::size_t i = 0; i < channels.size(); ++i)
        g.order.push_back({WaveRef::Kind::channel, i, channels[i].center_frequency});
    for (std::size_t i = 0; i < pumps.size(); ++i)
        g.order.push_back({WaveRef::Kind::pump, i, pumps[i].center_frequency});
    std::stable_sort(g.order.begin(), g.order.end(),
                     [](const WaveRef& a, const WaveRef& b) { return a.frequency < b.frequency; });
    for (std::size_t i = 1; i < g.order.size(); ++i) {
        if (g.order[i].frequency == g.order[i - 1].frequency) {
            std::ostringstream os;
            os << "frequency tie at " << g.order[i].frequency / units::thz << " THz";
            throw ConfigError(os.str());
        }
    }
    g.channel_pos.assign(channels.size(), 0);
    g.pump_pos.assign(pumps.size(), 0);
    for (std::size_t pos = 0; pos < g.order.size(); ++pos) {
        const auto& w = g.order[pos];
        (w.kind == WaveRef::Kind::channel ? g.channel_pos : g.pump_pos)[w.index] = pos;
    }
    return g;
}

namespace {

std::string thz_str(double f) {
    std::ostringstream os;
    os.precision(10);
    os << f / units::thz << " THz";
    return os.str();
}

void require_positive_over(const Table1D& table, double lo, double hi, const std::string& what,
                           bool allow_zero = false) {
    if (!table.covers(lo, hi)) {
        throw ConfigError(what + " table does not cover [" + thz_str(lo) + ", " + thz_str(hi) + "]");
    }
    auto check = [&](double f) {
        const double v = table.at(f);
        if (!(v > 0.0 || (allow_zero && v == 0.0)))
            throw ConfigError(what + (allow_zero ? " must be >= 0 at " : " must be > 0 at ") + thz_str(f));
    };
    check(lo);
    check(hi);
    if (!table.is_constant()) {
        for (double x : table.xs())
            if (x > lo && x < hi) check(x);
    }
}

void validate_options(const LinkSpec& link) {
    const auto& s = link.solver;
    if (!(s.step > 0.0)) throw ConfigError("solver.step_m must be > 0");
    if (!(s.bvp_tolerance > 0.0)) throw ConfigError("solver.bvp_tolerance must be > 0");
    if (s.max_iterations < 1) throw ConfigError("solver.max_iterations must be >= 1");
    if (!(s.damping > 0.0 && s.damping <= 1.0)) throw ConfigError("solver.damping must be in (0, 1]");
    for (const auto& span : link.spans) {
        if (!(s.step < span.length / 10.0))
            throw ConfigError("solver.step_m must be below a tenth of every span length");
    }
    const auto& f = link.fitter;
    if (!(f.weight_exponent >= 0.0)) throw ConfigError("fitter.weight_exponent must be >= 0");
    if (!(f.alpha0_cap_fraction > 0.0)) throw ConfigError("fitter.alpha0_cap_fraction must be > 0");
    if (!(f.max_series_ratio > 0.0)) throw ConfigError("fitter.max_series_ratio must be > 0");
    if (!(f.sigma_min_scale > 0.0 && f.sigma_max_scale > f.sigma_min_scale))
        throw ConfigError("fitter sigma bounds must satisfy 0 < min < max");
    if (f.scan_points < 3) throw ConfigError("fitter.scan_points must be >= 3");
    if (f.min_samples < 4) throw ConfigError("fitter.min_samples must be >= 4");
    if (!(f.sigma_rel_tol > 0.0)) throw ConfigError("fitter.sigma_rel_tol must be > 0");
    if (link.engine.extra_terms < 0) throw ConfigError("engine.extra_terms must be >= 0");
    const auto& o = link.oracle;
    if (o.island_grid < 4 || o.island_grid % 4 != 0)
        throw ConfigError("oracle.island_grid must be a multiple of 4");
    if (!(o.convergence_db > 0.0)) throw ConfigError("oracle.convergence_db must be > 0");
}

}  // namespace

LinkSpec normalize(LinkSpec link) {
    link.warnings.clear();
    if (link.spans.empty()) throw ConfigError("link needs at least one span");
    if (link.channels.empty()) throw ConfigError("link needs at least one channel");

    for (const auto& ch : link.channels) {
        if (!std::isfinite(ch.center_frequency) || !(ch.center_frequency > 0.0))
            throw ConfigError("channel center frequency must be > 0");
        if (!std::isfinite(ch.symbol_rate) || !(ch.symbol_rate > 0.0))
            throw ConfigError("channel symbol rate must be > 0 at " + thz_str(ch.center_frequency));
        if (!std::isfinite(ch.launch_power) || ch.launch_power < 0.0)
            throw ConfigError("channel launch power must be >= 0 at " + thz_str(ch.center_frequency));
        if (ch.band_start() <= 0.0) throw ConfigError("channel band extends below 0 Hz");
    }
    std::stable_sort(link.channels.begin(), link.channels.end(), [](const Channel& a, const Channel& b) {
        return a.center_frequency < b.center_frequency;
    });
    for (std::size_t i = 1; i < link.channels.size(); ++i) {
        const auto& a = link.channels[i - 1];
        const auto& b = link.channels[i];
        if (a.center_frequency == b.center_frequency)
            throw ConfigError("duplicate channel frequency " + thz_str(a.center_frequency));
        if (a.band_end() > b.band_start())
            throw ConfigError("overlapping channels at " + thz_str(a.center_frequency) + " and " +
                              thz_str(b.center_frequency));
    }

    const double band_lo = link.channels.front().band_start();
    const double band_hi = link.channels.back().band_end();

    for (std::size_t s = 0; s < link.spans.size(); ++s) {
        auto& span = link.spans[s];
        const std::string where = "span " + std::to_string(s + 1);
        if (!std::isfinite(span.length) || !(span.length > 0.0))
            throw ConfigError(where + ": length must be > 0");
        std::stable_sort(span.pumps.begin(), span.pumps.end(),
                         [](const Pump& a, const Pump& b) { return a.center_frequency < b.center_frequency; });
        double f_lo = link.channels.front().center_frequency;
        double f_hi = link.channels.back().center_frequency;
        for (const auto& p : span.pumps) {
            if (!(p.center_frequency > 0.0)) throw ConfigError(where + ": pump frequency must be > 0");
            if (!std::isfinite(p.injected_power) || p.injected_power < 0.0)
                throw ConfigError(where + ": pump power must be >= 0");
            f_lo = std::min(f_lo, p.center_frequency);
            f_hi = std::max(f_hi, p.center_frequency);
            if (p.center_frequency > band_lo && p.center_frequency < band_hi) {
                link.warnings.push_back(where + ": pump at " + thz_str(p.center_frequency) +
                                        " lies inside the signal band");
            }
        }
        grid_order(link.channels, span.pumps);

        const auto& fiber = span.fiber;
        require_positive_over(fiber.field_loss, f_lo, f_hi, where + ": fiber loss", true);
        require_positive_over(fiber.effective_area, f_lo, f_hi, where + ": effective area");
        if (!(fiber.n2 >= 0.0)) throw ConfigError(where + ": n2 must be >= 0");
        if (!(fiber.f_ref > 0.0)) throw ConfigError(where + ": f_ref must be > 0");
        if (fiber.raman_gain.table().empty()) span.fiber.raman_gain = RamanGainTable::zero();
        if (f_hi - f_lo > span.fiber.raman_gain.max_shift() && span.fiber.raman_gain.max_shift() > 0.0) {
            link.warnings.push_back(where + ": raman_gain table ends below the largest frequency "
                                            "spacing; gain is taken as 0 beyond it");
        }

        if (span.post_gain.kind == PostGain::Kind::explicit_table) {
            require_positive_over(span.post_gain.gain, link.channels.front().center_frequency,
                                  link.channels.back().center_frequency, where + ": post gain");
        }
    }
    validate_options(link);
    return link;
}

}  // namespace uwbnli
