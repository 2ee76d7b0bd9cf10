#include "emfa/analysis/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace emfa::analysis {

double estimate_cost(double t_ul_mbps, const FitParams& p) {
    if (t_ul_mbps < 0.0) throw std::invalid_argument("throughput must be non-negative");
    return p.f1 * std::exp(p.e1 * t_ul_mbps) + p.f2 * std::exp(p.e2 * t_ul_mbps);
}

double estimate_exposure(double t_ul_mbps, const FitParams& params) {
    return estimate_cost(t_ul_mbps, params) * t_ul_mbps;
}

namespace {

constexpr int kMaxIterations = 500;

using Vec4 = Eigen::Vector4d;

struct Data {
    Eigen::VectorXd t;
    Eigen::VectorXd y;
};

Eigen::VectorXd residuals(const Data& d, const Vec4& p) {
    return (p[0] * (p[1] * d.t.array()).exp() + p[2] * (p[3] * d.t.array()).exp()).matrix() - d.y;
}

Eigen::MatrixX4d jacobian(const Data& d, const Vec4& p) {
    Eigen::MatrixX4d j(d.t.size(), 4);
    const Eigen::ArrayXd x1 = (p[1] * d.t.array()).exp();
    const Eigen::ArrayXd x2 = (p[3] * d.t.array()).exp();
    j.col(0) = x1.matrix();
    j.col(1) = (p[0] * d.t.array() * x1).matrix();
    j.col(2) = x2.matrix();
    j.col(3) = (p[2] * d.t.array() * x2).matrix();
    return j;
}

// Amplitudes minimizing the residual for fixed exponents.
std::optional<Vec4> with_linear_amplitudes(const Data& d, double e1, double e2) {
    Eigen::MatrixX2d a(d.t.size(), 2);
    a.col(0) = (e1 * d.t.array()).exp().matrix();
    a.col(1) = (e2 * d.t.array()).exp().matrix();
    const Eigen::Vector2d f = a.colPivHouseholderQr().solve(d.y);
    if (!f.allFinite()) return std::nullopt;
    return Vec4{f[0], e1, f[1], e2};
}

// Slow component from a log-linear fit of the tail, fast component from a
// log-linear fit of what the slow one leaves unexplained at the head.
std::optional<Vec4> tail_seed(const Data& d) {
    const Eigen::Index n = d.t.size();
    const Eigen::Index half = n / 2;
    auto loglinear = [](const std::vector<double>& t, const std::vector<double>& y) -> std::optional<std::pair<double, double>> {
        if (t.size() < 2) return std::nullopt;
        Eigen::MatrixX2d a(static_cast<Eigen::Index>(t.size()), 2);
        Eigen::VectorXd b(static_cast<Eigen::Index>(t.size()));
        for (std::size_t i = 0; i < t.size(); ++i) {
            a(static_cast<Eigen::Index>(i), 0) = 1.0;
            a(static_cast<Eigen::Index>(i), 1) = t[i];
            b(static_cast<Eigen::Index>(i)) = std::log(y[i]);
        }
        const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
        if (!c.allFinite()) return std::nullopt;
        return std::pair{std::exp(c[0]), c[1]};
    };

    std::vector<double> tt, ty;
    for (Eigen::Index i = half; i < n; ++i) {
        if (d.y[i] <= 0.0) return std::nullopt;
        tt.push_back(d.t[i]);
        ty.push_back(d.y[i]);
    }
    const auto slow = loglinear(tt, ty);
    if (!slow) return std::nullopt;
    std::vector<double> ht, hy;
    for (Eigen::Index i = 0; i < half; ++i) {
        const double r = d.y[i] - slow->first * std::exp(slow->second * d.t[i]);
        if (r > 0.0) {
            ht.push_back(d.t[i]);
            hy.push_back(r);
        }
    }
    const auto fast = loglinear(ht, hy);
    if (!fast) return Vec4{0.0, slow->second * 5.0, slow->first, slow->second};
    return Vec4{fast->first, fast->second, slow->first, slow->second};
}

struct Run {
    Vec4 p;
    double sse = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

Run levenberg_marquardt(const Data& d, Vec4 p) {
    Run run;
    Eigen::VectorXd r = residuals(d, p);
    double sse = r.squaredNorm();
    if (!std::isfinite(sse)) return run;
    double lambda = 1e-3;
    for (int it = 1; it <= kMaxIterations; ++it) {
        run.iterations = it;
        const Eigen::MatrixX4d j = jacobian(d, p);
        const Eigen::Matrix4d jtj = j.transpose() * j;
        const Vec4 g = j.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + sse)) {
            run.converged = true;
            break;
        }
        bool improved = false;
        while (lambda < 1e16) {
            Eigen::Matrix4d a = jtj;
            for (int k = 0; k < 4; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            const Vec4 step = a.ldlt().solve(-g);
            const Vec4 trial = p + step;
            const Eigen::VectorXd rt = residuals(d, trial);
            const double sse_t = rt.squaredNorm();
            if (step.allFinite() && std::isfinite(sse_t) && sse_t < sse) {
                const bool tiny = step.norm() <= 1e-13 * (1.0 + p.norm()) || (sse - sse_t) <= 1e-16 * sse;
                p = trial;
                r = rt;
                sse = sse_t;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                if (tiny) run.converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) {
            // No descent direction left: a stationary point at machine precision.
            run.converged = true;
            break;
        }
        if (run.converged || sse == 0.0) {
            run.converged = true;
            break;
        }
    }
    run.p = p;
    run.sse = sse;
    return run;
}

FitParams ordered(const Vec4& p) {
    FitParams f{p[0], p[1], p[2], p[3]};
    if (std::abs(f.e1) < std::abs(f.e2)) {
        std::swap(f.f1, f.f2);
        std::swap(f.e1, f.e2);
    }
    return f;
}

}  // namespace

FitResult fit_double_exponential(std::span<const FitPoint> points) {
    if (points.size() < 4) throw std::invalid_argument("double-exponential fit needs at least four points");
    std::vector<FitPoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const FitPoint& a, const FitPoint& b) { return a.throughput_mbps < b.throughput_mbps; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (!std::isfinite(sorted[i].throughput_mbps) || !std::isfinite(sorted[i].cost))
            throw std::invalid_argument("fit points must be finite");
        if (i > 0 && sorted[i].throughput_mbps == sorted[i - 1].throughput_mbps)
            throw std::invalid_argument("fit abscissae must be distinct");
    }

    Data d{Eigen::VectorXd(static_cast<Eigen::Index>(sorted.size())),
           Eigen::VectorXd(static_cast<Eigen::Index>(sorted.size()))};
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        d.t[static_cast<Eigen::Index>(i)] = sorted[i].throughput_mbps;
        d.y[static_cast<Eigen::Index>(i)] = sorted[i].cost;
    }

    std::vector<Vec4> starts;
    if (auto s = tail_seed(d)) starts.push_back(*s);
    const double span = std::max(d.t.maxCoeff() - d.t.minCoeff(), 1e-9);
    for (double fast : {3.0, 10.0, 30.0}) {
        for (double ratio : {3.0, 10.0}) {
            const double e1 = -fast / span;
            if (auto s = with_linear_amplitudes(d, e1, e1 / ratio)) starts.push_back(*s);
        }
    }

    std::optional<Run> best;
    std::optional<Run> best_converged;
    for (const Vec4& s : starts) {
        const Run run = levenberg_marquardt(d, s);
        if (!std::isfinite(run.sse)) continue;
        if (!best || run.sse < best->sse) best = run;
        if (run.converged && (!best_converged || run.sse < best_converged->sse)) best_converged = run;
    }
    if (!best) throw FitFailed("fit diverged from every starting point", FitResult{});
    if (!best_converged) {
        throw FitFailed("fit did not converge within the iteration budget",
                        FitResult{ordered(best->p), std::sqrt(best->sse), best->iterations, false});
    }
    return FitResult{ordered(best_converged->p), std::sqrt(best_converged->sse), best_converged->iterations, true};
}

}  // namespace emfa::analysis
