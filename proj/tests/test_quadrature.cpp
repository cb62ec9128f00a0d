#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pertlab/errors.hpp"
#include "pertlab/quadrature.hpp"

using namespace pertlab;

TEST_CASE("gauss_legendre integrates polynomials of degree 2n-1 exactly") {
    const auto& gl = gauss_legendre(8);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * std::pow(gl.x[i], 14);
    CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-14));  // int_-1^1 x^14
    double w = 0.0;
    for (double v : gl.w) w += v;
    CHECK(w == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("integrate_panels on smooth integrands") {
    auto pts = panel_points(0.0, M_PI, 16);
    const double v = integrate_panels([](double x) { return std::sin(x); }, pts, 12);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-13));

    auto pts2 = panel_points(0.0, 1.0, 8);
    const double v2 = integrate_panels([](double x) { return x * x * x * x * x; }, pts2, 8);
    CHECK(v2 == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("panel_points inserts breaks and clips grading to the interval") {
    auto pts = panel_points(0.0, 1.0, 4, {0.3}, {0.0, 1.0}, 10);
    CHECK(pts.front() == 0.0);
    CHECK(pts.back() == 1.0);
    bool has_break = false;
    for (double p : pts) has_break |= (p == 0.3);
    CHECK(has_break);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) CHECK(pts[i] < pts[i + 1]);
    // graded points pile up near the endpoints
    CHECK(pts[1] - pts[0] < 1e-2);

    // integrable kink handled by a break: int_0^1 |x - 0.3| dx
    const double v = integrate_panels([](double x) { return std::fabs(x - 0.3); },
                                      panel_points(0.0, 1.0, 4, {0.3}), 8);
    CHECK(v == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-14));
}

TEST_CASE("bad arguments are rejected") {
    CHECK_THROWS_AS(gauss_legendre(0), ParameterError);
    CHECK_THROWS_AS(panel_points(1.0, 0.0, 4), ParameterError);
}
