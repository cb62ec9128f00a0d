#pragma once

#include <complex>
#include <vector>

namespace pertlab {

/// Knobs for the deterministic quadratures.  `panels` and `nodes` set the base
/// composite Gauss-Legendre rule, `pv_eta` the principal-value exclusion
/// half-width, `tol` the target absolute error.
struct QuadratureConfig {
    int panels = 64;
    int nodes = 16;
    double pv_eta = 1e-3;
    double tol = 1e-9;
};

/// Gauss-Legendre rule on (-1,1); cached per order.
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

const GaussLegendre& gauss_legendre(int order);

/// Panel boundaries for a composite rule on [lo,hi]: a uniform base grid,
/// interior breakpoints inserted exactly, and geometric refinement (ratio 1/2,
/// `levels` deep) toward each point in `grade` to absorb endpoint or kink
/// singularities.
std::vector<double> panel_points(double lo, double hi, int base_panels,
                                 const std::vector<double>& breaks = {},
                                 const std::vector<double>& grade = {}, int levels = 36);

template <typename F>
auto integrate_panels(F&& f, const std::vector<double>& pts, int order)
    -> decltype(f(0.0) * 1.0) {
    const GaussLegendre& gl = gauss_legendre(order);
    using R = decltype(f(0.0) * 1.0);
    R total{};
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double mid = 0.5 * (pts[k] + pts[k + 1]);
        const double hw = 0.5 * (pts[k + 1] - pts[k]);
        R acc{};
        for (std::size_t j = 0; j < gl.x.size(); ++j) acc += gl.w[j] * f(mid + hw * gl.x[j]);
        total += hw * acc;
    }
    return total;
}

}  // namespace pertlab
