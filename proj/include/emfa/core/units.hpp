#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace emfa {

/// Free-space wave impedance used for plane-wave field/density conversion.
inline constexpr double kFreeSpaceImpedanceOhm = 376.73;
inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Frequency with 1 Hz resolution. Band-edge comparisons are exact integer
/// comparisons.
class Frequency {
public:
    constexpr Frequency() = default;

    static constexpr Frequency hz(std::int64_t v) { return Frequency{v}; }
    static constexpr Frequency khz(std::int64_t v) { return Frequency{v * 1'000}; }
    static constexpr Frequency mhz(std::int64_t v) { return Frequency{v * 1'000'000}; }
    static Frequency from_mhz(double mhz) {
        return Frequency{static_cast<std::int64_t>(std::llround(mhz * 1e6))};
    }

    [[nodiscard]] constexpr std::int64_t in_hz() const { return hz_; }
    [[nodiscard]] constexpr double in_mhz() const { return static_cast<double>(hz_) / 1e6; }
    [[nodiscard]] constexpr bool valid() const { return hz_ > 0; }

    [[nodiscard]] double wavelength_m() const { return kSpeedOfLight / static_cast<double>(hz_); }

    constexpr auto operator<=>(const Frequency&) const = default;

    friend constexpr Frequency operator+(Frequency a, Frequency b) { return Frequency{a.hz_ + b.hz_}; }
    friend constexpr Frequency operator-(Frequency a, Frequency b) { return Frequency{a.hz_ - b.hz_}; }

private:
    constexpr explicit Frequency(std::int64_t hz) : hz_(hz) {}
    std::int64_t hz_ = 0;
};

/// Electric field strength, V/m.
class FieldStrength {
public:
    constexpr FieldStrength() = default;
    constexpr explicit FieldStrength(double volts_per_meter) : vpm_(volts_per_meter) {}

    [[nodiscard]] constexpr double volts_per_meter() const { return vpm_; }

    constexpr auto operator<=>(const FieldStrength&) const = default;

private:
    double vpm_ = 0.0;
};

/// Linear plane-wave power density, W/m^2.
class PowerDensity {
public:
    constexpr PowerDensity() = default;
    constexpr explicit PowerDensity(double watts_per_m2) : wpm2_(watts_per_m2) {}

    [[nodiscard]] constexpr double watts_per_m2() const { return wpm2_; }

    constexpr auto operator<=>(const PowerDensity&) const = default;
    friend constexpr PowerDensity operator+(PowerDensity a, PowerDensity b) {
        return PowerDensity{a.wpm2_ + b.wpm2_};
    }

private:
    double wpm2_ = 0.0;
};

/// Logarithmic power density, dBm/m^2.
class PowerDensityLog {
public:
    constexpr PowerDensityLog() = default;
    constexpr explicit PowerDensityLog(double dbm_per_m2) : dbm_(dbm_per_m2) {}

    [[nodiscard]] constexpr double dbm_per_m2() const { return dbm_; }

    constexpr auto operator<=>(const PowerDensityLog&) const = default;

private:
    double dbm_ = 0.0;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Typed conversions. The unit-tagged numeric route lives in analysis/units.hpp.

[[nodiscard]] inline PowerDensity to_linear(PowerDensityLog p) {
    return PowerDensity{std::pow(10.0, (p.dbm_per_m2() - 30.0) / 10.0)};
}

[[nodiscard]] inline PowerDensityLog to_log(PowerDensity p) {
    if (!(p.watts_per_m2() > 0.0))
        throw DomainError("power density must be positive to express in dBm/m^2");
    return PowerDensityLog{10.0 * std::log10(p.watts_per_m2()) + 30.0};
}

[[nodiscard]] inline PowerDensity to_density(FieldStrength e) {
    if (e.volts_per_meter() < 0.0) throw DomainError("negative field strength");
    return PowerDensity{e.volts_per_meter() * e.volts_per_meter() / kFreeSpaceImpedanceOhm};
}

[[nodiscard]] inline FieldStrength to_field(PowerDensity s) {
    if (s.watts_per_m2() < 0.0) throw DomainError("negative power density");
    return FieldStrength{std::sqrt(s.watts_per_m2() * kFreeSpaceImpedanceOhm)};
}

[[nodiscard]] inline FieldStrength to_field(PowerDensityLog p) { return to_field(to_linear(p)); }

}  // namespace emfa
