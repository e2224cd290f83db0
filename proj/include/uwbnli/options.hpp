#pragma once

namespace uwbnli {

/// Numerical settings of the power-evolution solver.
struct SolverOptions {
    double step = 50.0;             // m, RK4 step and profile sampling interval
    double bvp_tolerance = 1e-4;    // relative self-consistency of the two sweep directions
    int max_iterations = 50;
    double damping = 0.7;           // weight of the new backward field in each sweep, (0, 1]

    friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

/// Settings of the per-segment loss-model fit.
struct FitterOptions {
    double weight_exponent = 2.0;       // w(z) = (P / P_max)^exponent
    double alpha0_cap_fraction = 0.1;   // end segment: alpha0 in [-fraction * alpha_lin, 0]
    double max_series_ratio = 5.0;      // |2 alpha1 / sigma| allowed in a fit
    double sigma_min_scale = 1e-2;      // sigma search in [min, max] / segment_length
    double sigma_max_scale = 1e2;
    double sigma_rel_tol = 1e-7;        // golden-section stop, relative in sigma
    int scan_points = 161;
    int min_samples = 8;

    friend bool operator==(const FitterOptions&, const FitterOptions&) = default;
};

enum class SeriesBound {
    per_channel,  // 0..M with M = floor(10 |2 alpha1 / sigma|) of each interferer
    shared,       // 0..Q with Q = max over interferers of (M + 1), per contribution
};

struct EngineOptions {
    SeriesBound series_bound = SeriesBound::per_channel;
    int extra_terms = 0;  // added to every series bound; used for truncation checks

    friend bool operator==(const EngineOptions&, const EngineOptions&) = default;
};

enum class OracleMode {
    exact,  // |integral over the whole span|^2
    split,  // |integral over [0, split]|^2 + |integral over [split, L]|^2
};

enum class ProfileSource {
    solver,  // numeric power profiles
    fitted,  // profiles rebuilt from the two-segment loss-model fits
};

struct OracleOptions {
    int island_grid = 64;            // Simpson intervals per island axis (even)
    OracleMode mode = OracleMode::split;
    ProfileSource source = ProfileSource::solver;
    bool refine_check = true;        // rerun at doubled grid and compare
    double convergence_db = 0.01;

    friend bool operator==(const OracleOptions&, const OracleOptions&) = default;
};

const char* to_string(SeriesBound);
const char* to_string(OracleMode);
const char* to_string(ProfileSource);

}  // namespace uwbnli
