#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uwbnli/options.hpp"
#include "uwbnli/raman_solver.hpp"

namespace uwbnli {

/// Loss law alpha(z) = alpha0 + alpha1 exp(-sigma z) over one segment, in the
/// segment's own coordinate (z = 0 at the segment start, or at the span end
/// for a reversed end segment).
struct SegmentFit {
    double alpha0 = 0.0;          // 1/m, field
    double alpha1 = 0.0;          // 1/m, field
    double sigma = 0.0;           // 1/m
    double segment_length = 0.0;  // m
    double p_start = 0.0;         // W
    double weighted_mse = 0.0;    // in (ln P)^2
    int samples = 0;

    bool sigma_unconstrained = false;  // alpha1 ~ 0, any sigma fits equally
    bool sigma_at_bound = false;       // best sigma on the edge of the search range
    bool alpha0_at_bound = false;      // end-segment alpha0 pinned to 0 or -cap
    bool series_at_bound = false;      // |2 alpha1 / sigma| pinned to the series limit
};

struct TwoSegmentFit {
    double split_z = 0.0;  // m
    SegmentFit st;
    std::optional<SegmentFit> end;
    bool dark = false;     // zero-power channel, nothing fitted
};

/// p_start * exp(-2 alpha0 z + 2 alpha1 (exp(-sigma z) - 1) / sigma)
double model_power(const SegmentFit& fit, double z);

/// Index of the global minimum (first occurrence).
std::size_t argmin_index(std::span<const double> power);

/// z of the channel's power minimum; equals the last grid point when the
/// profile decreases monotonically.
double find_split(std::span<const double> z, std::span<const double> power);

struct SegmentConstraints {
    bool end_segment = false;  // enforce -alpha0_cap <= alpha0 <= 0
    double alpha0_cap = 0.0;   // 1/m
};

/// Weighted least squares on ln P. `t` starts at 0 and increases; P > 0.
/// Throws NumericError on fewer than 4 samples or non-positive powers.
SegmentFit fit_segment(std::span<const double> t, std::span<const double> power, const FitterOptions& opts,
                       const SegmentConstraints& constraints = {});

/// Split one channel's profile at its minimum and fit both segments; the end
/// segment is fitted on reversed samples so t = 0 is the span end.
TwoSegmentFit fit_span(std::span<const double> z, std::span<const double> power, double alpha_lin,
                       const FitterOptions& opts);

/// Fits for every channel of a solved span.
std::vector<TwoSegmentFit> fit_profile(const PowerProfile& profile, const FitterOptions& opts);

/// Rebuild a profile on the grid `z` from a two-segment fit.
std::vector<double> synthesize(const TwoSegmentFit& fit, std::span<const double> z);

}  // namespace uwbnli
