#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uwbnli/cfm_engine.hpp"

namespace uwbnli {

/// Integration rectangle of one SPM/XPM island for f = f_cut: f1 runs over the
/// interferer band, f2 over the CUT band.
struct IslandSpec {
    double f1_lo = 0.0, f1_hi = 0.0;
    double f2_lo = 0.0, f2_hi = 0.0;
    double f = 0.0;
    bool spm = false;
};

IslandSpec island(const Channel& cut, const Channel& interferer);

/// Integral of ratio(z) exp(j chi z) over samples [from, to] of a uniform grid.
/// The ratio is taken as exponential between samples, which integrates the
/// oscillation exactly however coarse the grid is relative to 1 / chi.
std::complex<double> z_integral(std::span<const double> z, std::span<const double> ratio, double chi,
                                std::size_t from, std::size_t to);

/// Normalized inner integral for one interferer profile, whole span.
std::complex<double> inner_z_integral(std::span<const double> z, std::span<const double> power, double chi);

/// Quadrature nodes and weights on [lo, hi], graded toward `focus`.
struct Nodes {
    std::vector<double> x;
    std::vector<double> w;
};
Nodes island_nodes(double lo, double hi, double focus, int intervals);

struct OracleTerm {
    std::size_t cut = 0;
    std::size_t span = 0;
    int contribution = 1;  // exact mode uses 1 for the whole span
    std::size_t interferer = 0;
    double power = 0.0;    // W
};

struct OracleCut {
    double frequency = 0.0;
    double symbol_rate = 0.0;
    double power = 0.0;       // W
    double psd = 0.0;         // W/Hz
    double refine_db = 0.0;   // change at doubled grid, when checked
};

struct OracleReport {
    OracleMode mode = OracleMode::split;
    ProfileSource source = ProfileSource::solver;
    int grid = 0;
    std::vector<OracleCut> cuts;
    std::vector<OracleTerm> terms;
};

/// Brute-force island integration over the solved (or fitted) profiles.
/// Throws QuadratureError when the doubled-grid check exceeds the tolerance.
OracleReport nli_numeric(const LinkSpec& link, const LinkPropagation& prop, const LinkFits& fits,
                         const MlFactors& ml);

/// Same with the grid and mode given explicitly and no refinement check.
OracleReport nli_numeric_at(const LinkSpec& link, const LinkPropagation& prop, const LinkFits& fits,
                            const MlFactors& ml, int grid, OracleMode mode, ProfileSource source);

struct CompareRow {
    double frequency = 0.0;
    double cfm_power = 0.0;
    double oracle_power = 0.0;
    double delta_db = 0.0;  // 10 log10(cfm / oracle)
};

struct Comparison {
    std::vector<CompareRow> rows;
    OracleMode mode = OracleMode::split;
    double max_abs_db = 0.0;
    double mean_db = 0.0;
};

Comparison compare(const NliReport& cfm, const OracleReport& oracle);

}  // namespace uwbnli
