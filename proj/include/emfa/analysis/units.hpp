#pragma once

#include <optional>
#include <string_view>

#include "emfa/core/series.hpp"
#include "emfa/core/units.hpp"

namespace emfa::analysis {

enum class Unit { VoltsPerMeter, WattsPerM2, DbmPerM2 };

std::string_view to_string(Unit u);
Unit unit_of(MeasureUnit u);

/// Exact conversion between field strength, linear and log power density:
/// S = E^2 / 376.73 Ohm and S = 10^((x - 30) / 10) W/m^2 for x in dBm/m^2.
/// Throws DomainError for negative (or non-finite) field/density input and
/// for zero density expressed in dBm/m^2.
double convert(double value, Unit from, Unit to);

inline double to_watts(double value, Unit from) { return convert(value, from, Unit::WattsPerM2); }

}  // namespace emfa::analysis
