#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pertlab/errors.hpp"
#include "pertlab/limit_model.hpp"
#include "pertlab/quadrature.hpp"

using namespace pertlab;

namespace {

ExampleId band(double l = 0.2, double m = 1.0) {
    ExampleId id;
    id.kind = ExampleId::Kind::UniformBand;
    id.ell = l;
    id.m = m;
    return id;
}
ExampleId tri(double m = 1.0) {
    ExampleId id;
    id.kind = ExampleId::Kind::TriangularWigner;
    id.m = m;
    return id;
}
ExampleId para(double m = 1.0) {
    ExampleId id;
    id.kind = ExampleId::Kind::ParabolicWigner;
    id.m = m;
    return id;
}

}  // namespace

TEST_CASE("ExampleId parse / str round trip") {
    const ExampleId a = ExampleId::parse("band:l=0.35,m=2");
    CHECK(a.kind == ExampleId::Kind::UniformBand);
    CHECK(a.ell == doctest::Approx(0.35));
    CHECK(a.m == doctest::Approx(2.0));
    CHECK(ExampleId::parse(a.str()).ell == doctest::Approx(0.35));

    CHECK(ExampleId::parse("triangular:m=0").kind == ExampleId::Kind::TriangularWigner);
    CHECK(ExampleId::parse("parabolic").kind == ExampleId::Kind::ParabolicWigner);

    CHECK_THROWS_AS(ExampleId::parse("square"), ParameterError);
    CHECK_THROWS_AS(ExampleId::parse("band:l=0"), ParameterError);
    CHECK_THROWS_AS(ExampleId::parse("band:l=1.5"), ParameterError);
    CHECK_THROWS_AS(ExampleId::parse("band:m=-1"), ParameterError);
    CHECK_THROWS_AS(ExampleId::parse("band:q=1"), ParameterError);
}

TEST_CASE("catalog models match their defining data") {
    const LimitModel b = make_model(band(0.2, 1.0));
    CHECK(b.rho(0.5) == doctest::Approx(1.0));
    CHECK(b.sigma2(0.1, 0.25) == doctest::Approx(1.0));
    CHECK(b.sigma2(0.1, 0.35) == doctest::Approx(0.0));
    CHECK(b.sigma_d2(0.7) == doctest::Approx(1.0));

    const LimitModel t = make_model(tri(1.0));
    CHECK(t.rho(0.0) == doctest::Approx(1.0));
    CHECK(t.rho(1.0) == doctest::Approx(0.0));
    CHECK(t.rho(-1.0) == doctest::Approx(0.0));

    const LimitModel p = make_model(para(0.0));
    CHECK(p.sigma_d2(0.3) == doctest::Approx(0.0));
    CHECK(p.rho(0.0) == doctest::Approx(0.75));
}

TEST_CASE("model invariants on a grid") {
    for (const ExampleId& id : {band(0.2), band(0.8), tri(), para()}) {
        const LimitModel m = make_model(id);
        // sigma2 symmetry and tau compatibility (hypothesis (d))
        for (int i = 1; i < 10; ++i)
            for (int j = i + 1; j < 10; ++j) {
                const double x = i / 10.0, y = j / 10.0;
                CHECK(m.sigma2(x, y) == doctest::Approx(m.sigma2(y, x)).epsilon(1e-15));
                CHECK(std::fabs(m.tau(m.f(x), m.f(y)) - m.sigma2(x, y)) <= 1e-12);
            }
        // rho integrates to 1
        auto pts = panel_points(m.support.lo, m.support.hi, 64, m.rho_kinks,
                                {m.support.lo, m.support.hi});
        const double mass = integrate_panels(m.rho, pts, 16);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
        // f bounded on [0,1], rho supported inside `support`
        for (int k = 0; k <= 20; ++k) {
            const double fx = m.f(k / 20.0);
            CHECK(fx >= m.support.lo - 1e-12);
            CHECK(fx <= m.support.hi + 1e-12);
        }
        CHECK(m.rho(m.support.lo - 0.01) == 0.0);
        CHECK(m.rho(m.support.hi + 0.01) == 0.0);
    }
}

TEST_CASE("closed_form_F spot values") {
    // band midpoint is symmetric
    CHECK(closed_form_F(band(0.2), 0.5) == doctest::Approx(0.0));
    // |F| = log 2 at (l=0.2, s=0.1); the sign is fixed by the Stieltjes
    // identity B(z) = -int F/(z-s)^2, which makes F positive near the lower
    // support edge (the cross-checks live in the theory and acceptance tests)
    CHECK(closed_form_F(band(0.2), 0.1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(closed_form_F(tri(), 0.0) == doctest::Approx(0.0));
    CHECK(closed_form_F(para(), 2.0) == doctest::Approx(0.0));
    // triangular value at s = 1/2, the formula evaluated by hand
    const double expect =
        0.5 * (0.5 * std::log(0.5) - 1.5 * std::log(1.5) + std::log(0.5));
    CHECK(expect == doctest::Approx(-0.823959).epsilon(1e-5));
    CHECK(closed_form_F(tri(), 0.5) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("closed_form_F is odd (about the support midpoint)") {
    for (int k = 1; k < 40; ++k) {
        const double s = k / 40.0;
        CHECK(std::fabs(closed_form_F(tri(), -s) + closed_form_F(tri(), s)) <= 1e-12);
        CHECK(std::fabs(closed_form_F(para(), -s) + closed_form_F(para(), s)) <= 1e-12);
        for (double l : {0.2, 0.8})
            CHECK(std::fabs(closed_form_F(band(l), 1.0 - s) + closed_form_F(band(l), s)) <=
                  1e-12);
    }
    // 0 log 0 convention: finite at the removable points
    CHECK(std::isfinite(closed_form_F(tri(), 0.0)));
    CHECK(std::isfinite(closed_form_F(tri(), 1.0)));
    CHECK(std::isfinite(closed_form_F(para(), 1.0)));
}

TEST_CASE("eval_quantile_f") {
    const LimitModel t = make_model(tri());
    CHECK(eval_quantile_f(t, 0.5) == doctest::Approx(0.0).epsilon(1e-10));
    const LimitModel b = make_model(band(0.2));
    CHECK(eval_quantile_f(b, 0.25) == doctest::Approx(0.25).epsilon(1e-10));

    // parabolic at 0.9: bisection oracle on the cubic CDF
    const LimitModel p = make_model(para());
    const double expect = oracles::quantile_bisect(
        [](double s) { return 0.75 * (s - s * s * s / 3.0) + 0.5; }, 0.9, -1.0, 1.0);
    CHECK(eval_quantile_f(p, 0.9) == doctest::Approx(expect).epsilon(1e-9));

    CHECK_THROWS_AS(eval_quantile_f(t, -0.1), ParameterError);
    CHECK_THROWS_AS(eval_quantile_f(t, 1.1), ParameterError);
}

TEST_CASE("quantile composed with the CDF is the identity; f matches the quantile") {
    for (const ExampleId& id : {band(0.5), tri(), para()}) {
        const LimitModel m = make_model(id);
        for (int k = 1; k < 20; ++k) {
            const double x = k / 20.0;
            const double s = eval_quantile_f(m, x);
            CHECK(m.cdf(s) == doctest::Approx(x).epsilon(1e-8));
            CHECK(m.f(x) == doctest::Approx(s).epsilon(1e-8));
        }
    }
}

TEST_CASE("non-normalized density is a model error") {
    LimitModel broken = make_model(tri());
    auto rho = broken.rho;
    broken.rho = [rho](double t) { return 2.0 * rho(t); };
    broken.cdf = nullptr;  // force the numeric CDF path
    CHECK_THROWS_AS(eval_quantile_f(broken, 0.5), ModelError);
}
