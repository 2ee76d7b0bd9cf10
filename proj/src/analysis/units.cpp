#include "emfa/analysis/units.hpp"

#include <cmath>

namespace emfa::analysis {

std::string_view to_string(Unit u) {
    switch (u) {
        case Unit::VoltsPerMeter: return "V/m";
        case Unit::WattsPerM2: return "W/m^2";
        case Unit::DbmPerM2: return "dBm/m^2";
    }
    return "?";
}

Unit unit_of(MeasureUnit u) { return u == MeasureUnit::DbmPerM2 ? Unit::DbmPerM2 : Unit::VoltsPerMeter; }

namespace {

double watts_from(double v, Unit from) {
    if (!std::isfinite(v)) throw DomainError("non-finite value");
    switch (from) {
        case Unit::WattsPerM2:
            if (v < 0.0) throw DomainError("negative power density");
            return v;
        case Unit::VoltsPerMeter:
            if (v < 0.0) throw DomainError("negative field strength");
            return v * v / kFreeSpaceImpedanceOhm;
        case Unit::DbmPerM2:
            return std::pow(10.0, (v - 30.0) / 10.0);
    }
    return v;
}

double watts_to(double w, Unit to) {
    switch (to) {
        case Unit::WattsPerM2: return w;
        case Unit::VoltsPerMeter: return std::sqrt(w * kFreeSpaceImpedanceOhm);
        case Unit::DbmPerM2:
            if (!(w > 0.0)) throw DomainError("zero power density has no dBm/m^2 value");
            return 10.0 * std::log10(w) + 30.0;
    }
    return w;
}

}  // namespace

double convert(double value, Unit from, Unit to) {
    if (from == to) {
        watts_from(value, from);  // domain check only
        return value;
    }
    return watts_to(watts_from(value, from), to);
}

}  // namespace emfa::analysis
