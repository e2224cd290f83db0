#pragma once

#include <cmath>
#include <limits>
#include <numbers>

// SI is used everywhere inside the library. Engineering units (THz, km, dBm,
// dB/km, ps^n/km, um^2) appear only in config parsing and report writers.
namespace uwbnli::units {

inline constexpr double speed_of_light = 299792458.0;  // m/s

inline constexpr double thz = 1e12;
inline constexpr double ghz = 1e9;
inline constexpr double km = 1e3;
inline constexpr double mw = 1e-3;
inline constexpr double um2 = 1e-12;
inline constexpr double ps2_per_km = 1e-24 / km;
inline constexpr double ps3_per_km = 1e-36 / km;
inline constexpr double ps4_per_km = 1e-48 / km;
inline constexpr double per_w_km = 1.0 / km;  // 1/(W km) -> 1/(W m)

// 10*log10(e): dB per neper of power.
inline constexpr double db_per_neper = 10.0 * std::numbers::log10e;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * mw; }

inline double watt_to_dbm(double watt) {
    if (watt <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(watt / mw);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Power loss in dB/km to the field attenuation coefficient in 1/m.
inline double db_per_km_to_field_alpha(double db_per_km) {
    return db_per_km / (2.0 * db_per_neper) / km;
}

inline double field_alpha_to_db_per_km(double alpha) { return alpha * 2.0 * db_per_neper * km; }

}  // namespace uwbnli::units
