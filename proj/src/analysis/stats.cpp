#include "emfa/analysis/stats.hpp"

#include <array>
#include <cmath>

namespace emfa::analysis {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile probability must be in (0, 1)");
    if (p == 0.975) return kZ95;

    // P. J. Acklam, "An algorithm for computing the inverse normal cumulative
    // distribution function".
    constexpr std::array a{-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                           1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr std::array b{-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                           6.680131188771972e+01,  -1.328068155288572e+01};
    constexpr std::array c{-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                           -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    constexpr std::array d{7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                           3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) return -normal_quantile(1.0 - p);
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

Interval confidence_interval(std::span<const double> samples, double level) {
    if (samples.size() < 2) throw InsufficientData("confidence interval needs at least two samples");
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("confidence level must be in (0, 1)");
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double z = level == 0.95 ? kZ95 : normal_quantile(0.5 + level / 2.0);
    return {mean, z * sd / std::sqrt(n)};
}

}  // namespace emfa::analysis
