#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "uwbnli/link_model.hpp"
#include "uwbnli/units.hpp"

namespace testing {

inline std::filesystem::path source_path(const std::string& rel) {
    return std::filesystem::path(UWBNLI_SOURCE_DIR) / rel;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

inline double db_diff(double a, double b) { return 10.0 * std::log10(a / b); }

inline uwbnli::FiberSpec smf(double db_per_km = 0.2, uwbnli::RamanGainTable gain = uwbnli::RamanGainTable::zero()) {
    using namespace uwbnli;
    FiberSpec f;
    f.name = "smf";
    f.field_loss = Table1D::constant(units::db_per_km_to_field_alpha(db_per_km), "loss");
    f.effective_area = Table1D::constant(80.0 * units::um2, "aeff");
    f.beta2 = -21.7 * units::ps2_per_km;
    f.beta3 = 0.14 * units::ps3_per_km;
    f.f_ref = 193.1e12;
    f.raman_gain = std::move(gain);
    return f;
}

/// n equally spaced channels, one span, no pumps, transparent post gain.
inline uwbnli::LinkSpec simple_link(int n, double start_thz, double spacing_ghz, double power_w, double length_km,
                                    uwbnli::FiberSpec fiber = smf()) {
    using namespace uwbnli;
    LinkSpec link;
    for (int k = 0; k < n; ++k) {
        Channel c;
        c.center_frequency = start_thz * units::thz + k * spacing_ghz * units::ghz;
        c.symbol_rate = 100 * units::ghz;
        c.launch_power = power_w;
        c.rolloff = 0.1;
        link.channels.push_back(c);
    }
    SpanSpec span;
    span.length = length_km * units::km;
    span.fiber = std::move(fiber);
    link.spans.push_back(span);
    return normalize(std::move(link));
}

// Textbook closed-form GN for rectangular channels on a single exponential-loss
// span, written out on its own: no shared code with the engine.
inline double classic_gn(const uwbnli::LinkSpec& link, std::size_t c) {
    using namespace uwbnli;
    using std::numbers::pi;
    const auto& fiber = link.spans[0].fiber;
    const double a_pow = 2.0 * fiber.alpha(link.channels[c].center_frequency);
    const auto& cut = link.channels[c];
    double total = 0.0;
    for (std::size_t m = 0; m < link.channels.size(); ++m) {
        const auto& ch = link.channels[m];
        const double aeff = fiber.aeff(cut.center_frequency);
        const double gamma = 2.0 * pi * cut.center_frequency * fiber.n2 / (units::speed_of_light * aeff);
        const double mid = 0.5 * (ch.center_frequency + cut.center_frequency) - fiber.f_ref;
        const double b2 = std::abs(fiber.beta2 + 2.0 * pi * fiber.beta3 * mid);
        const double df = ch.center_frequency - cut.center_frequency;
        const double arg = pi * pi * b2 * cut.symbol_rate / a_pow;
        const double bracket = std::asinh(arg * (df + 0.5 * ch.symbol_rate)) - std::asinh(arg * (df - 0.5 * ch.symbol_rate));
        const double xpm = m == c ? 1.0 : 2.0;
        total += 16.0 / 27.0 * gamma * gamma * cut.launch_power * ch.launch_power * ch.launch_power * xpm /
                 (ch.symbol_rate * ch.symbol_rate) * bracket / (4.0 * pi * a_pow * b2);
    }
    return total;
}

}  // namespace testing
