// Test-only oracles, independent of the library's computation paths.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "pertlab/dense.hpp"
#include "pertlab/rng.hpp"

namespace oracles {

using pertlab::Complex;
using pertlab::Mat;

// Stieltjes transform of the radius-1 semicircle density (2/pi) sqrt(1-t^2):
// G(z) = 2 (z - sqrt(z-1) sqrt(z+1)), branch cut on [-1,1].
inline Complex semicircle_stieltjes(Complex z) {
    return 2.0 * (z - std::sqrt(z - 1.0) * std::sqrt(z + 1.0));
}

// CDF of the radius-1 semicircle.
inline double semicircle_cdf(double t) {
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return 0.5 + (t * std::sqrt(1.0 - t * t) + std::asin(t)) / M_PI;
}

// Stieltjes transform of the triangular density (1-|t|) on [-1,1], principal
// logs (valid off the support).
inline Complex triangular_stieltjes(Complex z) {
    return (1.0 + z) * std::log(z + 1.0) + (z - 1.0) * std::log(z - 1.0) -
           2.0 * z * std::log(z);
}

// quantile by bisection on a CDF callable
inline double quantile_bisect(const std::function<double(double)>& cdf, double x, double lo,
                              double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < x ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// operator norm of a symmetric matrix by power iteration
inline double opnorm_power(const Mat& M, int iters = 300, std::uint64_t seed = 99) {
    pertlab::Rng rng(seed);
    const int n = M.n;
    std::vector<double> v(n), w(n);
    for (auto& x : v) x = rng.gaussian();
    double norm = 0.0;
    for (int it = 0; it < iters; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += M(i, j) * v[j];
            w[i] = s;
        }
        norm = 0.0;
        for (double x : w) norm = std::fmax(norm, std::fabs(x));
        double l2 = 0.0;
        for (double x : w) l2 += x * x;
        l2 = std::sqrt(l2);
        if (l2 == 0.0) return 0.0;
        for (int i = 0; i < n; ++i) v[i] = w[i] / l2;
    }
    // one more multiply gives the Rayleigh quotient
    double num = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += M(i, j) * v[j];
        num += v[i] * s;
    }
    return std::fabs(num);
}

// dense random symmetric matrix with N(0,1)/sqrt(n) entries
inline Mat random_sym(int n, std::uint64_t seed, double scale = 1.0) {
    pertlab::Rng rng(seed);
    Mat M(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = scale * rng.gaussian();
            M(i, j) = v;
            M(j, i) = v;
        }
    return M;
}

}  // namespace oracles
