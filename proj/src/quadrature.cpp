#include "pertlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "pertlab/errors.hpp"

namespace pertlab {

namespace {

GaussLegendre compute_gl(int order) {
    // Newton iteration on P_n, nodes symmetric about 0.
    GaussLegendre rule;
    rule.x.resize(order);
    rule.w.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            dp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.x[i] = -x;
        rule.x[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.w[i] = w;
        rule.w[order - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
    if (order < 1 || order > 256) throw ParameterError("gauss_legendre: order out of range");
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gl(order)).first;
    return it->second;
}

std::vector<double> panel_points(double lo, double hi, int base_panels,
                                 const std::vector<double>& breaks,
                                 const std::vector<double>& grade, int levels) {
    if (!(hi > lo)) throw ParameterError("panel_points: empty interval");
    std::vector<double> pts;
    pts.reserve(base_panels + 1 + breaks.size() + grade.size() * 2 * levels);
    for (int k = 0; k <= base_panels; ++k)
        pts.push_back(lo + (hi - lo) * static_cast<double>(k) / base_panels);
    for (double b : breaks)
        if (b > lo && b < hi) pts.push_back(b);
    for (double g : grade) {
        double d = hi - lo;
        for (int k = 1; k <= levels; ++k) {
            d *= 0.5;
            if (g - d > lo && g - d < hi) pts.push_back(g - d);
            if (g + d > lo && g + d < hi) pts.push_back(g + d);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace pertlab
