#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace emfa::analysis {

/// Double-exponential exposure-per-Mbps model
/// C(t) = f1 * exp(e1 * t) + f2 * exp(e2 * t), t in Mbps.
struct FitParams {
    double f1 = 0.0;  // V/m per Mbps
    double e1 = 0.0;  // 1/Mbps
    double f2 = 0.0;
    double e2 = 0.0;

    bool operator==(const FitParams&) const = default;
};

/// Estimator parameters of the reference W3 campaign. Valid for that
/// campaign's smartphone only.
inline constexpr FitParams kReferenceCampaignFit{1.146, -0.2595, 0.1304, -0.0325};

double estimate_cost(double t_ul_mbps, const FitParams& params);

/// estimate_cost(t) * t: the total smartphone field estimated from throughput.
double estimate_exposure(double t_ul_mbps, const FitParams& params);

struct FitPoint {
    double throughput_mbps = 0.0;
    double cost = 0.0;  // V/m per Mbps
};

struct FitResult {
    FitParams params;
    double residual_norm = 0.0;  // sqrt of the sum of squared residuals
    int iterations = 0;
    bool converged = false;
};

class FitFailed : public std::runtime_error {
public:
    FitFailed(const std::string& what, FitResult best) : std::runtime_error(what), best_(best) {}
    [[nodiscard]] const FitResult& best() const { return best_; }

private:
    FitResult best_;
};

/// Least-squares fit of the double-exponential model by Levenberg-Marquardt
/// from several deterministic starting points. The result is ordered so that
/// |e1| >= |e2|. Requires at least four points with distinct abscissae
/// (std::invalid_argument otherwise); throws FitFailed carrying the best
/// iterate when no start converges within the iteration budget.
FitResult fit_double_exponential(std::span<const FitPoint> points);

}  // namespace emfa::analysis
