#pragma once

#include "emfa/core/units.hpp"

namespace emfa::analysis {

/// Minimum UE-to-probe distance for far-field conditions:
/// max(lambda, L, 2 L^2 / lambda), the last term being the Fraunhofer limit.
double far_field_distance_m(Frequency f, double antenna_length_m);

double fraunhofer_limit_m(Frequency f, double antenna_length_m);

}  // namespace emfa::analysis
