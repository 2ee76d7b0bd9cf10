#pragma once

#include <span>
#include <stdexcept>

namespace emfa::analysis {

class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kZ95 = 1.959964;

/// Standard normal quantile. Exact table value for p = 0.975; otherwise
/// Acklam's rational approximation (relative error below 1.15e-9).
double normal_quantile(double p);

struct Interval {
    double mean = 0.0;
    double halfwidth = 0.0;
};

/// Gaussian interval mean +- z * s / sqrt(n), s the sample standard
/// deviation. Requires at least two samples.
Interval confidence_interval(std::span<const double> samples, double level = 0.95);

}  // namespace emfa::analysis
