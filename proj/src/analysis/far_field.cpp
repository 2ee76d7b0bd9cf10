#include "emfa/analysis/far_field.hpp"

#include <algorithm>
#include <stdexcept>

namespace emfa::analysis {

double fraunhofer_limit_m(Frequency f, double antenna_length_m) {
    return 2.0 * antenna_length_m * antenna_length_m / f.wavelength_m();
}

double far_field_distance_m(Frequency f, double antenna_length_m) {
    if (!f.valid()) throw std::invalid_argument("frequency must be positive");
    if (antenna_length_m < 0.0) throw std::invalid_argument("antenna length must be non-negative");
    return std::max({f.wavelength_m(), antenna_length_m, fraunhofer_limit_m(f, antenna_length_m)});
}

}  // namespace emfa::analysis
