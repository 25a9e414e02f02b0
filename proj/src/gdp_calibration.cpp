#include "itn/gdp_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "itn/errors.hpp"

namespace itn {

double expected_link_count(const FitnessVector& g, double a, PairConvention convention) {
    if (!(a >= 0.0)) throw DomainError("expected_link_count: a must be nonnegative");
    const auto n = g.g.size();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double t = a * g.g[i] * g.g[j];
            total += t / (1.0 + t);
        }
    return convention == PairConvention::Ordered ? 2.0 * total : total;
}

DensityFit fit_density_a(const FitnessVector& g, double target_L, PairConvention convention) {
    const auto n = static_cast<double>(g.g.size());
    for (Eigen::Index i = 0; i < g.g.size(); ++i)
        if (!(g.g[i] > 0.0)) throw DomainError("fit_density_a: g must be positive");
    if (!(target_L >= 0.0) || !std::isfinite(target_L)) throw DomainError("fit_density_a: target_L must be nonnegative");

    DensityFit fit;
    fit.target_L = target_L;
    fit.convention = convention;
    if (target_L == 0.0) {
        fit.boundary = true;
        return fit;
    }
    const double pairs = convention == PairConvention::Ordered ? n * (n - 1.0) : n * (n - 1.0) / 2.0;
    if (target_L >= pairs)
        throw InfeasibleError("fit_density_a: target_L=" + std::to_string(target_L) +
                                  " is not below the number of pairs " + std::to_string(pairs),
                              {});

    auto excess = [&](double a) { return expected_link_count(g, a, convention) - target_L; };
    double lo = 0.0;
    double hi = 1.0;
    while (excess(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw InfeasibleError("fit_density_a: failed to bracket the root", {});
    }
    // Bisect until the bracket collapses; this lands well inside 1e-9 * target_L.
    double a = hi;
    double r = excess(hi);
    for (int it = 0; it < 4000 && r != 0.0; ++it) {
        // Geometric midpoint once the bracket is positive: the map is smooth in log a.
        const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
        if (mid <= lo || mid >= hi) break;
        r = excess(mid);
        a = mid;
        if (r < 0.0) lo = mid;
        else hi = mid;
    }
    fit.a = a;
    fit.achieved_L = expected_link_count(g, a, convention);
    fit.residual = fit.achieved_L - target_L;
    return fit;
}

SlopeFit fit_sqrt_a(const Vector& x, const FitnessVector& g) {
    if (x.size() != g.g.size()) throw DomainError("fit_sqrt_a: x and g lengths differ");
    if (g.g.size() == 0 || (g.g.array() == 0.0).all()) throw DomainError("fit_sqrt_a: g is all zero");
    SlopeFit fit;
    double sxg = 0.0, sgg = 0.0, sxx = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !std::isfinite(x[i]) || !(g.g[i] > 0.0)) {
            ++fit.excluded;
            continue;
        }
        sxg += x[i] * g.g[i];
        sgg += g.g[i] * g.g[i];
        sxx += x[i] * x[i];
        ++fit.used;
    }
    if (fit.used == 0) throw DomainError("fit_sqrt_a: no node with positive x");
    fit.sqrt_a = sxg / sgg;
    const double ssr = std::max(0.0, sxx - fit.sqrt_a * sxg);
    fit.r_squared = sxx > 0.0 ? 1.0 - ssr / sxx : 1.0;
    fit.std_error = fit.used > 1 ? std::sqrt(ssr / static_cast<double>(fit.used - 1) / sgg) : 0.0;
    return fit;
}

LogitFit fit_bc(const Vector& y, const FitnessVector& g, double y_floor) {
    if (y.size() != g.g.size()) throw DomainError("fit_bc: y and g lengths differ");
    std::vector<double> lx, ly;
    LogitFit fit;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (!(y[i] > y_floor) || !(y[i] < 1.0) || !(g.g[i] > 0.0)) {
            ++fit.excluded;
            continue;
        }
        lx.push_back(std::log(g.g[i]));
        ly.push_back(std::log(y[i] / (1.0 - y[i])));
    }
    fit.used = lx.size();
    if (fit.used < 2) throw DomainError("fit_bc: fewer than 2 nodes with 0 < y < 1");
    const auto m = static_cast<double>(fit.used);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < fit.used; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < fit.used; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("fit_bc: all retained nodes share one g value");
    fit.c = sxy / sxx;
    const double log_b = my - fit.c * mx;
    fit.b = std::exp(log_b);
    double ssr = 0.0;
    for (std::size_t i = 0; i < fit.used; ++i) {
        const double r = ly[i] - (log_b + fit.c * lx[i]);
        ssr += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    if (fit.used > 2) {
        const double s2 = ssr / (m - 2.0);
        fit.c_std_error = std::sqrt(s2 / sxx);
        fit.log_b_std_error = std::sqrt(s2 * (1.0 / m + mx * mx / sxx));
    }
    return fit;
}

FitnessFit fit_fitness(const Vector& x, const Vector& y, const FitnessVector& g) {
    FitnessFit f;
    f.x_fit = fit_sqrt_a(x, g);
    f.y_fit = fit_bc(y, g);
    f.sqrt_a = f.x_fit.sqrt_a;
    f.b = f.y_fit.b;
    f.c = f.y_fit.c;
    f.r_squared_x = f.x_fit.r_squared;
    f.r_squared_y = f.y_fit.r_squared;
    return f;
}

LogNormalFit fit_lognormal(const std::vector<double>& g_tilde) {
    if (g_tilde.size() < 2) throw DomainError("fit_lognormal: need at least 2 values");
    for (double v : g_tilde)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("fit_lognormal: values must be positive");
    LogNormalFit fit;
    fit.n = g_tilde.size();
    const auto n = static_cast<double>(fit.n);
    double mean = 0.0;
    for (double v : g_tilde) mean += std::log(v);
    mean /= n;
    double var = 0.0;
    for (double v : g_tilde) var += (std::log(v) - mean) * (std::log(v) - mean);
    fit.mu = mean;
    fit.sigma = std::sqrt(var / n);
    fit.degenerate = !(fit.sigma > 1e-12 * std::max(1.0, std::abs(mean)));
    if (fit.degenerate) fit.sigma = 0.0;

    std::vector<double> sorted = g_tilde;
    std::sort(sorted.begin(), sorted.end());
    fit.ccdf.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        fit.ccdf.emplace_back(sorted[i], static_cast<double>(sorted.size() - i) / n);
    }
    return fit;
}

LogNormalFit fit_lognormal(const Vector& g_tilde) {
    return fit_lognormal(std::vector<double>(g_tilde.data(), g_tilde.data() + g_tilde.size()));
}

double lognormal_ccdf(const LogNormalFit& fit, double value) {
    if (!(value > 0.0)) return 1.0;
    if (fit.degenerate) return value <= std::exp(fit.mu) ? 1.0 : 0.0;
    return 0.5 * std::erfc((std::log(value) - fit.mu) / (fit.sigma * std::sqrt(2.0)));
}

NodeExpectations predict_expectations(const FitnessVector& g, const GdpModelParams& params) {
    validate(params);
    NodeExpectations e;
    e.degree = gdp_probability_matrix(g, params).rowwise().sum();
    e.strength = gdp_weight_matrix(g, params).rowwise().sum();
    return e;
}

double induced_weight_ratio(const FitnessVector& g, const GdpModelParams& params, double observed_W) {
    if (!(observed_W > 0.0)) throw DomainError("induced_weight_ratio: observed W must be positive");
    return 0.5 * gdp_weight_matrix(g, params).sum() / observed_W;
}

}  // namespace itn
