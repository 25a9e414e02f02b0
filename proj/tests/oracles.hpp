#pragma once

// Independent reference computations for the tests. Nothing here calls the
// solver or calibration code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "itn/trade_data.hpp"

namespace oracle {

/// Plain bisection on a sign change.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
    double flo = f(lo);
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Compass search maximiser: starts from the best point of a coarse grid
/// over [lo, hi]^d and halves the step until it falls below `min_step`.
inline std::vector<double> maximise(const std::function<double(const std::vector<double>&)>& f, std::size_t dim,
                                    double lo, double hi, int grid = 9, double min_step = 1e-10) {
    std::vector<double> best(dim, lo);
    double best_val = -INFINITY;
    // Coarse grid on the diagonal plus per-coordinate sweeps keeps this cheap
    // for d <= 8 while still seeding a good basin.
    std::vector<double> point(dim);
    const double h = (hi - lo) / (grid - 1);
    std::vector<int> idx(dim, 0);
    const bool full_grid = dim <= 4;
    if (full_grid) {
        while (true) {
            for (std::size_t d = 0; d < dim; ++d) point[d] = lo + h * idx[d];
            const double v = f(point);
            if (v > best_val) {
                best_val = v;
                best = point;
            }
            std::size_t d = 0;
            while (d < dim && ++idx[d] == grid) idx[d++] = 0;
            if (d == dim) break;
        }
    } else {
        for (int g = 0; g < grid; ++g) {
            std::fill(point.begin(), point.end(), lo + h * g);
            const double v = f(point);
            if (v > best_val) {
                best_val = v;
                best = point;
            }
        }
    }
    double step = h;
    while (step > min_step) {
        bool improved = false;
        for (std::size_t d = 0; d < dim; ++d)
            for (double dir : {1.0, -1.0}) {
                auto trial = best;
                trial[d] += dir * step;
                const double v = f(trial);
                if (v > best_val) {
                    best_val = v;
                    best = trial;
                    improved = true;
                }
            }
        if (!improved) step *= 0.5;
    }
    return best;
}

/// Random symmetric integer network: each pair linked with probability
/// `density`, weight uniform in [wmin, wmax].
inline itn::WeightedNetwork random_network(std::mt19937_64& rng, std::size_t n, double density, int wmin, int wmax) {
    itn::WeightMatrix w = itn::WeightMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::bernoulli_distribution link(density);
    std::uniform_int_distribution<int> weight(wmin, wmax);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (link(rng)) {
                const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
                w(ii, jj) = w(jj, ii) = weight(rng);
            }
    return itn::WeightedNetwork(std::move(w));
}

/// Homogeneous 4-node network where every node has degree 1 and strength `weight`.
inline itn::WeightedNetwork perfect_matching(std::int64_t weight) {
    itn::WeightMatrix w = itn::WeightMatrix::Zero(4, 4);
    w(0, 1) = w(1, 0) = weight;
    w(2, 3) = w(3, 2) = weight;
    return itn::WeightedNetwork(std::move(w));
}

}  // namespace oracle
