#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uwbnli/options.hpp"
#include "uwbnli/table.hpp"

namespace uwbnli {

enum class Direction { forward, backward };

const char* to_string(Direction);

/// WDM channel approximated as a rectangular PSD of width equal to the symbol rate.
struct Channel {
    double center_frequency = 0.0;  // Hz
    double symbol_rate = 0.0;       // Hz
    double launch_power = 0.0;      // W
    double rolloff = 0.0;           // metadata only

    double band_start() const { return center_frequency - 0.5 * symbol_rate; }
    double band_end() const { return center_frequency + 0.5 * symbol_rate; }
    double psd() const { return launch_power / symbol_rate; }

    friend bool operator==(const Channel&, const Channel&) = default;
};

struct Pump {
    double center_frequency = 0.0;  // Hz
    double injected_power = 0.0;    // W, at z = 0 for forward and z = L for backward pumps
    Direction direction = Direction::backward;

    friend bool operator==(const Pump&, const Pump&) = default;
};

/// Raman gain coefficient sampled for df >= 0 and extended as an odd function.
/// Linear interpolation; zero outside the sampled range.
class RamanGainTable {
public:
    RamanGainTable() = default;
    /// samples: (df [Hz], c_r [1/(W m)]) with df >= 0 ascending; a (0, 0) sample is
    /// prepended when missing.
    explicit RamanGainTable(std::vector<std::pair<double, double>> samples);

    /// Triangular ramp peaking at 13 THz. Synthetic, for tests and demos only.
    static RamanGainTable synthetic_demo();
    static RamanGainTable zero();

    double operator()(double df) const;
    double max_shift() const { return table_.empty() ? 0.0 : table_.max_x(); }
    const Table1D& table() const { return table_; }

    friend bool operator==(const RamanGainTable&, const RamanGainTable&) = default;

private:
    Table1D table_;
};

struct FiberSpec {
    std::string name;
    Table1D field_loss;       // Hz -> 1/m (field convention)
    Table1D effective_area;   // Hz -> m^2
    double beta2 = 0.0;       // s^2/m
    double beta3 = 0.0;       // s^3/m
    double beta4 = 0.0;       // s^4/m
    double f_ref = 193.41e12; // Hz
    double n2 = 2.6e-20;      // m^2/W
    RamanGainTable raman_gain;

    double alpha(double f) const { return field_loss.at(f); }
    double aeff(double f) const { return effective_area.at(f); }

    friend bool operator==(const FiberSpec&, const FiberSpec&) = default;
};

/// Lumped gain applied after a span.
struct PostGain {
    enum class Kind { transparent, explicit_table };
    Kind kind = Kind::transparent;
    Table1D gain;  // Hz -> linear power gain, explicit_table only

    static PostGain transparent() { return {}; }
    static PostGain flat_db(double db);

    friend bool operator==(const PostGain&, const PostGain&) = default;
};

struct SpanSpec {
    double length = 0.0;  // m
    FiberSpec fiber;
    std::vector<Pump> pumps;
    PostGain post_gain;

    friend bool operator==(const SpanSpec&, const SpanSpec&) = default;
};

struct LinkSpec {
    std::vector<SpanSpec> spans;
    std::vector<Channel> channels;  // ascending center frequency after normalize()
    SolverOptions solver;
    FitterOptions fitter;
    EngineOptions engine;
    OracleOptions oracle;
    std::vector<std::string> warnings;

    friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

/// Sort channels by frequency and check every invariant. Throws ConfigError.
/// Idempotent; warnings are regenerated rather than accumulated.
LinkSpec normalize(LinkSpec link);

/// One entry of the merged channel+pump frequency ordering.
struct WaveRef {
    enum class Kind { channel, pump };
    Kind kind;
    std::size_t index;  // into channels or pumps
    double frequency;
};

struct GridOrder {
    std::vector<WaveRef> order;            // strictly ascending frequency
    std::vector<std::size_t> channel_pos;  // channel index -> position in order
    std::vector<std::size_t> pump_pos;     // pump index -> position in order
};

/// Merge channels and pumps into one ascending list. Throws ConfigError on ties.
GridOrder grid_order(const std::vector<Channel>& channels, const std::vector<Pump>& pumps);

}  // namespace uwbnli
