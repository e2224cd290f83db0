#include "uwbnli/gn_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "uwbnli/errors.hpp"

namespace uwbnli {

using std::numbers::pi;
using cplx = std::complex<double>;

IslandSpec island(const Channel& cut, const Channel& interferer) {
    IslandSpec s;
    s.f1_lo = interferer.band_start();
    s.f1_hi = interferer.band_end();
    s.f2_lo = cut.band_start();
    s.f2_hi = cut.band_end();
    s.f = cut.center_frequency;
    s.spm = cut == interferer;
    return s;
}

namespace {

// Piecewise-exponential interpolation of a sampled positive ratio.
class ZIntegrator {
public:
    ZIntegrator(std::span<const double> z, std::span<const double> ratio) : z_(z), r_(ratio), a_(z.size()) {
        for (std::size_t k = 0; k + 1 < z.size(); ++k) {
            const double h = z[k + 1] - z[k];
            a_[k] = (ratio[k] > 0.0 && ratio[k + 1] > 0.0) ? std::log(ratio[k + 1] / ratio[k]) / h : 0.0;
        }
    }

    cplx operator()(double chi, std::size_t from, std::size_t to) const {
        if (to <= from) return 0.0;
        const double h = (z_[to] - z_[from]) / static_cast<double>(to - from);
        const cplx step = std::polar(1.0, chi * h);
        cplx e = std::polar(1.0, chi * z_[from]);
        cplx acc = 0.0;
        for (std::size_t k = from; k < to; ++k) {
            const double p0 = r_[k], p1 = r_[k + 1];
            if (p0 > 0.0 && p1 > 0.0) {
                const cplx rate(a_[k], chi);
                const cplx w = rate * h;
                if (std::abs(w) < 1e-5) {
                    acc += e * p0 * h * (1.0 + w * (0.5 + w / 6.0));
                } else {
                    acc += e * (p1 * step - p0) / rate;
                }
            } else {
                acc += 0.5 * h * (p0 * e + p1 * e * step);
            }
            e *= step;
        }
        return acc;
    }

private:
    std::span<const double> z_, r_;
    std::vector<double> a_;
};

void graded_half(double s0, double d, double kappa, int n, Nodes& out) {
    const double sk = std::sinh(kappa);
    const double ht = 1.0 / n;
    for (int i = 0; i <= n; ++i) {
        const double t = i * ht;
        const double simpson = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        out.x.push_back(s0 + d * std::sinh(kappa * t) / sk);
        out.w.push_back(ht / 3.0 * simpson * std::abs(d) * kappa * std::cosh(kappa * t) / sk);
    }
}

std::size_t split_index(std::span<const double> z, double split_z) {
    auto it = std::lower_bound(z.begin(), z.end(), split_z);
    if (it == z.end()) return z.size() - 1;
    std::size_t k = static_cast<std::size_t>(it - z.begin());
    if (k > 0 && std::abs(z[k - 1] - split_z) < std::abs(z[k] - split_z)) --k;
    return k;
}

}  // namespace

std::complex<double> z_integral(std::span<const double> z, std::span<const double> ratio, double chi,
                                std::size_t from, std::size_t to) {
    return ZIntegrator(z, ratio)(chi, from, to);
}

std::complex<double> inner_z_integral(std::span<const double> z, std::span<const double> power, double chi) {
    std::vector<double> ratio(power.size());
    for (std::size_t k = 0; k < power.size(); ++k) ratio[k] = power[k] / power[0];
    return z_integral(z, ratio, chi, 0, z.size() - 1);
}

Nodes island_nodes(double lo, double hi, double focus, int intervals) {
    Nodes n;
    if (focus > lo && focus < hi) {
        graded_half(focus, lo - focus, 8.0, intervals / 2, n);
        graded_half(focus, hi - focus, 8.0, intervals / 2, n);
    } else if (std::abs(focus - lo) <= std::abs(focus - hi)) {
        graded_half(lo, hi - lo, 3.0, intervals, n);
    } else {
        graded_half(hi, lo - hi, 3.0, intervals, n);
    }
    return n;
}

OracleReport nli_numeric_at(const LinkSpec& link, const LinkPropagation& prop, const LinkFits& fits,
                            const MlFactors& ml, int grid, OracleMode mode, ProfileSource source) {
    const std::size_t ns = link.spans.size();
    const std::size_t nc = link.channels.size();
    ml.check(ns, nc);
    if (grid < 4 || grid % 4 != 0) throw ConfigError("oracle grid must be a positive multiple of 4");

    OracleReport rep;
    rep.mode = mode;
    rep.source = source;
    rep.grid = grid;
    rep.cuts.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        rep.cuts[c].frequency = link.channels[c].center_frequency;
        rep.cuts[c].symbol_rate = link.channels[c].symbol_rate;
    }

    // Normalized interferer profiles and split indices, per span and channel.
    std::vector<std::vector<std::vector<double>>> ratio(ns, std::vector<std::vector<double>>(nc));
    std::vector<std::vector<std::size_t>> split(ns, std::vector<std::size_t>(nc, 0));
    for (std::size_t s = 0; s < ns; ++s) {
        const auto& prof = prop.profiles[s];
        for (std::size_t m = 0; m < nc; ++m) {
            const auto& fit = fits[s][m];
            split[s][m] = fit.end ? split_index(prof.z, fit.split_z) : prof.z.size() - 1;
            if (fit.dark) continue;
            std::vector<double> p =
                source == ProfileSource::solver ? prof.channel(m) : synthesize(fit, prof.z);
            const double p0 = p.front();
            for (double& v : p) v /= p0;
            ratio[s][m] = std::move(p);
        }
    }

    // One task per (cut, interferer); results land in fixed slots.
    const std::size_t pieces = mode == OracleMode::split ? 2 : 1;
    std::vector<double> slot(nc * nc * ns * pieces, 0.0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto work = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= nc * nc) return;
            const std::size_t c = task / nc, m = task % nc;
            try {
                const auto& cut = link.channels[c];
                const auto& mch = link.channels[m];
                const IslandSpec isl = island(cut, mch);
                const Nodes n1 = island_nodes(isl.f1_lo, isl.f1_hi, isl.f, grid);
                const Nodes n2 = island_nodes(isl.f2_lo, isl.f2_hi, isl.f, grid);
                for (std::size_t s = 0; s < ns; ++s) {
                    if (fits[s][m].dark) continue;
                    const double p_cut = prop.launch[s][c];
                    const double p_m = prop.launch[s][m];
                    if (p_cut == 0.0) continue;
                    const auto& prof = prop.profiles[s];
                    const auto& fiber = link.spans[s].fiber;
                    const ZIntegrator zi(prof.z, ratio[s][m]);
                    const std::size_t last = prof.z.size() - 1;
                    const std::size_t k_split = split[s][m];
                    double acc[2] = {0.0, 0.0};
                    for (std::size_t a = 0; a < n1.x.size(); ++a) {
                        for (std::size_t b = 0; b < n2.x.size(); ++b) {
                            const double x = chi(n1.x[a], n2.x[b], isl.f, fiber);
                            const double w = n1.w[a] * n2.w[b];
                            if (mode == OracleMode::exact) {
                                acc[0] += w * std::norm(zi(x, 0, last));
                            } else {
                                acc[0] += w * std::norm(zi(x, 0, k_split));
                                acc[1] += w * std::norm(zi(x, k_split, last));
                            }
                        }
                    }
                    const double gamma = gamma_nl(cut.center_frequency, mch.center_frequency, fiber);
                    const double g_cut = p_cut / cut.symbol_rate;
                    const double g_m = p_m / mch.symbol_rate;
                    const double pre = 16.0 / 27.0 * gamma * gamma * g_cut * g_m * g_m * (isl.spm ? 1.0 : 2.0) *
                                       ml.at(s, m) * prop.gamma_st[s][c] * cut.symbol_rate;
                    for (std::size_t i = 0; i < pieces; ++i)
                        slot[((c * nc + m) * ns + s) * pieces + i] = pre * acc[i];
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(nc * nc);
                return;
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const auto nthreads = static_cast<unsigned>(std::min<std::size_t>(hw, nc * nc));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t s = 0; s < ns; ++s) {
            for (std::size_t m = 0; m < nc; ++m) {
                if (fits[s][m].dark) continue;
                for (std::size_t i = 0; i < pieces; ++i) {
                    if (i == 1 && !fits[s][m].end) continue;
                    const double p = slot[((c * nc + m) * ns + s) * pieces + i];
                    rep.terms.push_back({c, s, static_cast<int>(i) + 1, m, p});
                    rep.cuts[c].power += p;
                }
            }
        }
        rep.cuts[c].psd = rep.cuts[c].power / rep.cuts[c].symbol_rate;
    }
    return rep;
}

OracleReport nli_numeric(const LinkSpec& link, const LinkPropagation& prop, const LinkFits& fits,
                         const MlFactors& ml) {
    const auto& o = link.oracle;
    OracleReport rep = nli_numeric_at(link, prop, fits, ml, o.island_grid, o.mode, o.source);
    if (!o.refine_check) return rep;
    const OracleReport fine = nli_numeric_at(link, prop, fits, ml, 2 * o.island_grid, o.mode, o.source);
    for (std::size_t c = 0; c < rep.cuts.size(); ++c) {
        const double a = rep.cuts[c].power, b = fine.cuts[c].power;
        if (a > 0.0 && b > 0.0) rep.cuts[c].refine_db = 10.0 * std::log10(b / a);
        if (std::abs(rep.cuts[c].refine_db) > o.convergence_db) {
            std::ostringstream os;
            os << "island quadrature not converged at " << rep.cuts[c].frequency / 1e12 << " THz: doubling the "
               << "grid changes the result by " << rep.cuts[c].refine_db << " dB";
            throw QuadratureError(os.str(), rep.cuts[c].refine_db);
        }
    }
    return rep;
}

Comparison compare(const NliReport& cfm, const OracleReport& oracle) {
    if (cfm.cuts.size() != oracle.cuts.size()) throw NumericError("compare: channel count mismatch");
    Comparison out;
    out.mode = oracle.mode;
    double sum = 0.0;
    for (std::size_t c = 0; c < cfm.cuts.size(); ++c) {
        CompareRow r;
        r.frequency = cfm.cuts[c].frequency;
        r.cfm_power = cfm.cuts[c].power;
        r.oracle_power = oracle.cuts[c].power;
        if (r.cfm_power == r.oracle_power) {
            r.delta_db = 0.0;
        } else {
            r.delta_db = 10.0 * std::log10(r.cfm_power / r.oracle_power);
        }
        out.max_abs_db = std::max(out.max_abs_db, std::abs(r.delta_db));
        sum += r.delta_db;
        out.rows.push_back(r);
    }
    if (!out.rows.empty()) out.mean_db = sum / static_cast<double>(out.rows.size());
    return out;
}

}  // namespace uwbnli
