#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uwbnli/link_model.hpp"

namespace uwbnli {

/// Photon-number weighting of the Raman coupling between waves i and j.
double photon_flux_factor(double f_i, double f_j);

/// One wave (channel or pump) in a span, in ascending-frequency order.
struct Wave {
    WaveRef::Kind kind = WaveRef::Kind::channel;
    std::size_t index = 0;  // into LinkSpec::channels or SpanSpec::pumps
    double frequency = 0.0;
    Direction direction = Direction::forward;
    double alpha = 0.0;     // field loss at this frequency, 1/m
    std::string label;      // "ch<index>_<THz>" or "pump<index>_<THz>"
};

/// Right-hand side of the coupled power equations for a fixed set of waves.
class RamanSystem {
public:
    RamanSystem(std::vector<Wave> waves, const RamanGainTable& gain);

    const std::vector<Wave>& waves() const { return waves_; }
    std::size_t size() const { return waves_.size(); }

    /// Coupling coefficient of wave j onto wave i, 1/(W m).
    double coupling(std::size_t i, std::size_t j) const { return k_[i * waves_.size() + j]; }

    /// Net local power gain rate of wave i (Raman minus loss), 1/m.
    double rate(std::size_t i, const std::vector<double>& power) const;

    /// dP/dz for every wave, signed by propagation direction.
    std::vector<double> rhs(const std::vector<double>& power) const;

private:
    std::vector<Wave> waves_;
    std::vector<double> k_;
};

/// Sampled power of every wave along one span.
struct PowerProfile {
    std::vector<double> z;                    // uniform grid 0..L, m
    std::vector<Wave> waves;                  // ascending frequency
    std::vector<std::vector<double>> power;   // [wave][z index], W
    std::vector<std::size_t> channel_wave;    // channel index -> wave index
    std::vector<std::size_t> pump_wave;       // pump index -> wave index
    double residual = 0.0;                    // final self-consistency mismatch (relative)
    int iterations = 0;
    bool clamped = false;                     // a negative power was clamped to 0

    double length() const { return z.back(); }
    const std::vector<double>& channel(std::size_t c) const { return power[channel_wave[c]]; }
    double channel_at_start(std::size_t c) const { return channel(c).front(); }
    double channel_at_end(std::size_t c) const { return channel(c).back(); }
};

/// Integrate one span. Forward waves start from `launch` (per channel, W) and
/// forward pumps at z = 0; backward pumps are pinned at z = L. Throws
/// SolverError when the sweeps do not converge or a power becomes non-finite.
PowerProfile solve_span(const SpanSpec& span, const std::vector<Channel>& channels,
                        const std::vector<double>& launch, const SolverOptions& opts);

struct LinkPropagation {
    std::vector<PowerProfile> profiles;          // per span
    std::vector<std::vector<double>> launch;     // [span][channel], W at z = 0
    std::vector<std::vector<double>> output;     // [span][channel], W at z = L
    std::vector<std::vector<double>> transfer;   // [span][channel], output / launch
    std::vector<std::vector<double>> post_gain;  // [span][channel], linear
    std::vector<std::vector<double>> gamma_st;   // [span][channel], span start -> link end
    std::vector<std::vector<double>> gamma_end;  // [span][channel], span end -> link end
    std::vector<std::string> warnings;
};

/// Solve all spans in order, chaining each span's output through its post gain.
LinkPropagation propagate_link(const LinkSpec& link);

}  // namespace uwbnli
