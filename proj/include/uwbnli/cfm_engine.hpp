#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uwbnli/link_model.hpp"
#include "uwbnli/loss_fitter.hpp"
#include "uwbnli/raman_solver.hpp"

namespace uwbnli {

/// Nonlinear coefficient for the wave pair (f1, f2), 1/(W m).
double gamma_nl(double f1, double f2, const FiberSpec& fiber);

/// Effective GVD of the pair (f1, f2) with dispersion up to fourth order, s^2/m.
double beta2_eff(double f1, double f2, const FiberSpec& fiber);

/// Phase mismatch rate 4 pi^2 (f1 - f)(f2 - f) beta2_eff(f1, f2), 1/m.
double chi(double f1, double f2, double f, const FiberSpec& fiber);

/// floor(10 |2 alpha1 / sigma|).
int truncation_order(double alpha1, double sigma);

/// asinh(pi^2 beta2_eff R_cut (f_m - f_cut + (-1)^j R_m / 2) / (2 alpha0 + k sigma)),
/// with beta2_eff taken at (f_m, f_cut).
double psi(double f_m, double f_cut, double r_m, double r_cut, int j, int k, const SegmentFit& seg,
           const FiberSpec& fiber);

/// Per-(span, channel) correction factors, default 1.
struct MlFactors {
    std::vector<std::vector<double>> rho;  // [span][channel]

    static MlFactors ones(std::size_t spans, std::size_t channels);
    double at(std::size_t span, std::size_t channel) const { return rho[span][channel]; }
    /// Throws ConfigError unless the shape matches and every entry is > 0.
    void check(std::size_t spans, std::size_t channels) const;
};

/// Everything one (CUT, interferer, span, contribution) term needs.
struct TermInputs {
    double gamma = 0.0;      // 1/(W m)
    double beta2 = 0.0;      // beta2_eff(f_m, f_cut), s^2/m
    double f_m = 0.0, f_cut = 0.0;
    double r_m = 0.0, r_cut = 0.0;
    double p_cut = 0.0;      // W at the contribution's reference point
    double p_m = 0.0;
    double rho = 1.0;
    double gain = 1.0;       // accumulated CUT gain to the link end
    bool spm = false;
    int order = 0;           // series runs over 0..order in both indices
};

/// Closed-form NLI power of one term, W. Throws NumericError when a series
/// denominator vanishes on the diagonal or the term comes out negative.
double segment_nli(const TermInputs& in, const SegmentFit& seg);

/// The double series alone: sum over k, q of t_k t_q h_k / (4 alpha0 + (k + q) sigma),
/// t_n = x^n e^{-x} / n!, x = 2 alpha1 / sigma, h_k the asinh bracket over |beta2|.
double series_sum(const TermInputs& in, const SegmentFit& seg);

using LinkFits = std::vector<std::vector<TwoSegmentFit>>;  // [span][channel]

LinkFits fit_link(const LinkPropagation& prop, const FitterOptions& opts);

struct NliTerm {
    std::size_t cut = 0;
    std::size_t span = 0;
    int contribution = 1;  // 1: span start segment, 2: span end segment
    std::size_t interferer = 0;
    double power = 0.0;    // W
    int order = 0;
};

struct CutNli {
    double frequency = 0.0;
    double symbol_rate = 0.0;
    double power = 0.0;  // W
    double psd = 0.0;    // W/Hz
};

struct NliReport {
    std::vector<CutNli> cuts;
    std::vector<NliTerm> terms;
    std::vector<std::string> warnings;
};

NliReport total_nli(const LinkSpec& link, const LinkPropagation& prop, const LinkFits& fits,
                    const MlFactors& ml);

}  // namespace uwbnli
