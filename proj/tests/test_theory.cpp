#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pertlab/eigensolve.hpp"
#include "pertlab/errors.hpp"
#include "pertlab/limit_model.hpp"
#include "pertlab/theory.hpp"

using namespace pertlab;

namespace {

const QuadratureConfig Q{};

LimitModel constant_profile_model() {
    // f == 0 surrogate with unit variance everywhere: B(z) = 1/z^3 exactly
    LimitModel m;
    m.f = [](double) { return 0.0; };
    m.sigma2 = [](double, double) { return 1.0; };
    m.sigma_d2 = [](double) { return 1.0; };
    m.rho = [](double) { return 0.0; };
    m.tau = [](double, double) { return 1.0; };
    m.support = {-0.5, 0.5};
    return m;
}

}  // namespace

TEST_CASE("hilbert_pv closed forms") {
    PvIntegrand unif;
    unif.value = [](double t) { return (t > 0 && t < 1) ? 1.0 : 0.0; };
    unif.lo = 0.0;
    unif.hi = 1.0;
    CHECK(std::fabs(hilbert_pv(unif, 0.5, Q)) < 1e-12);                       // symmetry
    CHECK(hilbert_pv(unif, 0.25, Q) == doctest::Approx(-std::log(3.0)).epsilon(1e-10));
    // outside the support: plain integral log|s/(s-1)|
    CHECK(hilbert_pv(unif, 2.0, Q) == doctest::Approx(std::log(2.0)).epsilon(1e-10));

    // semicircle: H[u](s) = 2s on the support under this convention
    PvIntegrand sc;
    sc.value = [](double t) { return std::fabs(t) < 1 ? 2.0 / M_PI * std::sqrt(1 - t * t) : 0.0; };
    sc.lo = -1.0;
    sc.hi = 1.0;
    CHECK(hilbert_pv(sc, 0.3, Q) == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(hilbert_pv(sc, -0.7, Q) == doctest::Approx(-1.4).epsilon(1e-6));
}

TEST_CASE("F_numeric reproduces the closed forms") {
    const ExampleId band = ExampleId::parse("band:l=0.2,m=1");
    const LimitModel bm = make_model(band);
    CHECK(F_numeric(bm, 0.1, Q) ==
          doctest::Approx(closed_form_F(band, 0.1)).epsilon(1e-6));
    CHECK(std::fabs(F_numeric(bm, 0.1, Q)) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(F_numeric(bm, 0.5, Q) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(F_numeric(bm, 1.7, Q) == 0.0);  // outside the support

    const ExampleId tri = ExampleId::parse("triangular:m=1");
    const LimitModel tm = make_model(tri);
    CHECK(F_numeric(tm, 0.5, Q) == doctest::Approx(-0.823959).epsilon(1e-4));
    CHECK(F_numeric(tm, 0.5, Q) == doctest::Approx(closed_form_F(tri, 0.5)).epsilon(1e-8));

    const ExampleId para = ExampleId::parse("parabolic:m=1");
    const LimitModel pm = make_model(para);
    for (double s : {-0.6, -0.15, 0.33, 0.81})
        CHECK(F_numeric(pm, s, Q) == doctest::Approx(closed_form_F(para, s)).epsilon(1e-8));
}

TEST_CASE("F_numeric vs closed_form_F on interior grids (1e-3 contract)") {
    for (const char* name : {"band:l=0.2,m=1", "band:l=0.8,m=1", "triangular:m=1",
                             "parabolic:m=1"}) {
        const ExampleId id = ExampleId::parse(name);
        const LimitModel m = make_model(id);
        const double lo = m.support.lo, hi = m.support.hi;
        double worst = 0.0;
        for (int k = 0; k <= 60; ++k) {
            const double s = lo + 0.05 + (hi - lo - 0.1) * k / 60.0;
            bool near_kink = false;
            if (id.kind == ExampleId::Kind::UniformBand)
                for (double kk : {id.ell, 1.0 - id.ell})
                    near_kink |= std::fabs(s - kk) < 0.05;
            if (near_kink) continue;
            worst = std::fmax(worst, std::fabs(F_numeric(m, s, Q) - closed_form_F(id, s)));
        }
        CHECK(worst <= 1e-3);
    }
}

TEST_CASE("B_quadrature trivial and constant cases") {
    LimitModel zero = constant_profile_model();
    zero.sigma2 = [](double, double) { return 0.0; };
    CHECK(std::abs(B_quadrature(zero, Complex(0, 2), Q)) < 1e-14);

    const LimitModel c = constant_profile_model();
    for (const Complex z : {Complex(0, 2), Complex(1.5, 0.5), Complex(-2, 1)}) {
        const Complex expect = 1.0 / (z * z * z);
        CHECK(std::abs(B_quadrature(c, z, Q) - expect) < 1e-9);
    }
    CHECK_THROWS_AS(B_quadrature(c, Complex(0.0, 0.0), Q), DomainError);
}

TEST_CASE("Proposition identity: B_quadrature equals B_via_F") {
    for (const char* name : {"band:l=0.2,m=1", "triangular:m=1", "parabolic:m=0"}) {
        const ExampleId id = ExampleId::parse(name);
        const LimitModel m = make_model(id);
        const SampledCurve F = sample_F(m, Q);
        for (const Complex z : {Complex(1.0, 1.0), Complex(0.2, 0.5)}) {
            const Complex a = B_quadrature(m, z, Q);
            const Complex b = B_via_F(F, z);
            CHECK(std::abs(a - b) <= 1e-6);
        }
    }
}

TEST_CASE("B_via_F callable overload agrees with the sampled curve") {
    const ExampleId id = ExampleId::parse("triangular:m=1");
    const LimitModel m = make_model(id);
    const SampledCurve F = sample_F(m, Q);
    const Complex z(0.7, 1.2);
    const Complex via_callable = B_via_F([&](double s) { return closed_form_F(id, s); },
                                         m.support, m.rho_kinks, z, Q);
    CHECK(std::abs(B_via_F(F, z) - via_callable) < 1e-8);
}

TEST_CASE("B decays like |z|^-3") {
    const LimitModel m = make_model(ExampleId::parse("triangular:m=1"));
    std::vector<double> zs{20.0, 40.0, 80.0};
    std::vector<double> bs;
    for (double r : zs) bs.push_back(std::abs(B_quadrature(m, Complex(r, 1.0), Q)));
    const double slope = std::log(bs[2] / bs[0]) / std::log(zs[2] / zs[0]);
    CHECK(slope == doctest::Approx(-3.0).epsilon(0.05));
}

TEST_CASE("z_covariance analytic cases") {
    LimitModel zero = constant_profile_model();
    zero.sigma_d2 = [](double) { return 0.0; };
    const TestFunction x2 = TestFunction::polynomial({0, 0, 1}, -2, 2);
    CHECK(std::abs(z_covariance(zero, x2, x2, Q)) == 0.0);

    // f(t) = t, sigma_d = 1, phi = psi = x^2: int_0^1 4 t^2 dt = 4/3
    LimitModel ident = constant_profile_model();
    ident.f = [](double t) { return t; };
    CHECK(z_covariance(ident, x2, x2, Q).real() == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

    // phi = psi = phi_z, z = 2i, uniform f, sigma_d = m: antiderivative oracle
    const double m = 1.7;
    LimitModel um = ident;
    um.sigma_d2 = [m](double) { return m * m; };
    const Complex z(0, 2);
    const TestFunction phi = TestFunction::cauchy(z);
    const Complex expect =
        m * m * (std::pow(z - 1.0, -3) - std::pow(z, -3)) / 3.0;
    CHECK(std::abs(z_covariance(um, phi, phi, Q) - expect) < 1e-12);
}

TEST_CASE("field covariance: conjugate symmetry and PSD Gram matrices") {
    const LimitModel m = make_model(ExampleId::parse("triangular:m=1"));
    const FieldCovariance cov{m, Q};
    std::vector<TestFunction> fam{
        TestFunction::cauchy(Complex(0.0, 1.0)), TestFunction::cauchy(Complex(1.0, 0.5)),
        TestFunction::cauchy(Complex(-0.7, 2.0)), TestFunction::bump(0.0, 0.8),
        TestFunction::bump(0.4, 1.1)};
    CMat G(5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) G(i, j) = cov.sesquilinear(fam[i], fam[j]);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(std::abs(G(i, j) - std::conj(G(j, i))) < 1e-12);
    const Spectrum ev = eig_hermitian(G);
    CHECK(ev.values.front() >= -1e-10);
}

TEST_CASE("free fixed point: t = 0 and zero profile") {
    const LimitModel m = make_model(ExampleId::parse("triangular:m=1"));
    const Complex z(0, 2);
    const FreeFixedPoint f0 = free_fixed_point(m, 0.0, z, Q);
    CHECK(std::abs(f0.C(0.3) - 1.0 / (z - m.f(0.3))) < 1e-13);
    CHECK(std::abs(f0.S - oracles::triangular_stieltjes(z)) < 1e-8);

    LimitModel nosig = m;
    nosig.sigma2 = [](double, double) { return 0.0; };
    const FreeFixedPoint fz = free_fixed_point(nosig, 0.3, z, Q);
    CHECK(std::abs(fz.S - f0.S) < 1e-12);
}

TEST_CASE("free fixed point: derivative at 0 is B(z), error linear in t") {
    const LimitModel m = make_model(ExampleId::parse("triangular:m=1"));
    const Complex z(0, 2);
    const Complex B = B_quadrature(m, z, Q);
    const Complex S0 = free_fixed_point(m, 0.0, z, Q).S;
    const double bound = 1.0 / std::abs(z.imag());
    double err[2];
    int k = 0;
    for (double t : {1e-2, 1e-3}) {
        const FreeFixedPoint fp = free_fixed_point(m, t, z, Q);
        for (const Complex& c : fp.values) CHECK(std::abs(c) <= bound + 1e-12);
        err[k++] = std::abs((fp.S - S0) / t - B);
    }
    // error shrinks proportionally to t
    CHECK(err[1] / err[0] == doctest::Approx(0.1).epsilon(0.5));
    CHECK(err[1] < 1e-3);
}

TEST_CASE("free fixed point reports non-contraction") {
    const LimitModel m = make_model(ExampleId::parse("triangular:m=1"));
    // far outside the guaranteed region t |sigma^2| / Im(z)^2 < 1 the
    // iteration exhausts its budget
    CHECK_THROWS_AS(free_fixed_point(m, 400.0, Complex(0, 0.02), Q), ConvergenceError);
    CHECK_THROWS_AS(free_fixed_point(m, 0.1, Complex(1, 0), Q), DomainError);
    CHECK_THROWS_AS(free_fixed_point(m, -0.1, Complex(0, 1), Q), ParameterError);
}

TEST_CASE("Helffer-Sjostrand reconstruction") {
    const TestFunction phi = TestFunction::bump(0.0, 1.0);
    const CutoffSpec chi{-1.2, 1.2, 0.5, 0.5, 1.0};
    for (double lam : {-0.5, -0.2, 0.0, 0.3, 0.6}) {
        const double exact = phi(lam).real();
        CHECK(std::fabs(hs_reconstruct(phi, 5, lam, chi, Q) - exact) <= 1e-4);
    }
    // identically zero near lambda but inside the plateau
    const TestFunction narrow = TestFunction::bump(0.0, 0.4);
    CHECK(std::fabs(hs_reconstruct(narrow, 5, 0.9, chi, Q)) <= 1e-4);

    // degree comparison: p = 5 beats p = 1 by >= 100x
    double e5 = 0.0, e1 = 0.0;
    for (double lam : {-0.3, 0.2, 0.5}) {
        const double exact = phi(lam).real();
        e5 = std::fmax(e5, std::fabs(hs_reconstruct(phi, 5, lam, chi, Q) - exact));
        e1 = std::fmax(e1, std::fabs(hs_reconstruct(phi, 1, lam, chi, Q) - exact));
    }
    CHECK(e5 <= 1e-2 * e1);

    CHECK_THROWS_AS(hs_reconstruct(phi, 5, 2.0, chi, Q), PreconditionError);
    CHECK_THROWS_AS(hs_reconstruct(phi, 7, 0.0, chi, Q), ParameterError);
}

TEST_CASE("Helffer-Sjostrand error drops fast when the y-window shrinks (p=5)") {
    // the panel straddling the real axis limits the resolution; its error is
    // driven by the y^5 vanishing of dbar phi~_5, so halving the window
    // shrinks the error by a large factor (measured 50-90x here; the drop at
    // p=1 is far weaker)
    QuadratureConfig c;
    c.panels = 48;
    c.nodes = 8;
    const TestFunction phi = TestFunction::bump(0.0, 1.0);
    const double exact = phi(0.3).real();
    const double eY = std::fabs(hs_reconstruct(phi, 5, 0.3, {-1.2, 1.2, 0.5, 0.5, 1.0}, c) - exact);
    const double eY2 =
        std::fabs(hs_reconstruct(phi, 5, 0.3, {-1.2, 1.2, 0.5, 0.25, 0.5}, c) - exact);
    CHECK(eY2 * 30.0 <= eY);
    const double e1Y =
        std::fabs(hs_reconstruct(phi, 1, 0.3, {-1.2, 1.2, 0.5, 0.5, 1.0}, c) - exact);
    const double e1Y2 =
        std::fabs(hs_reconstruct(phi, 1, 0.3, {-1.2, 1.2, 0.5, 0.25, 0.5}, c) - exact);
    CHECK(e1Y2 * 30.0 > e1Y);
}

TEST_CASE("sobolev_norm") {
    // zero function
    TestFunction zero;
    zero.kind = TestFunction::Kind::GenericC6;
    zero.compact = true;
    zero.lo = -1.0;
    zero.hi = 1.0;
    for (int k = 0; k < 7; ++k) zero.d[k] = [](double) { return Complex{}; };
    CHECK(sobolev_norm(zero, 1.0, Q) == doctest::Approx(0.0));

    // Plancherel at s = 0: ||phihat||_2^2 = 2 pi ||phi||_2^2
    const TestFunction phi = TestFunction::bump(0.0, 1.0);
    auto pts = panel_points(-1.0, 1.0, 64, {}, {-1.0, 1.0});
    const double l2sq =
        integrate_panels([&](double x) { return std::norm(phi(x)); }, pts, 16);
    double tail = 0.0;
    const double h0 = sobolev_norm(phi, 0.0, Q, &tail);
    CHECK(h0 * h0 == doctest::Approx(2.0 * M_PI * l2sq).epsilon(1e-6));
    CHECK(tail < 1e-9);

    // dilation scaling at s = 0: ||phi(./2)|| = sqrt(2) ||phi||
    const TestFunction wide = TestFunction::bump(0.0, 2.0);
    CHECK(sobolev_norm(wide, 0.0, Q) ==
          doctest::Approx(std::sqrt(2.0) * h0).epsilon(0.01));

    // s beyond the C^6 tail control is a tolerance error
    CHECK_THROWS_AS(sobolev_norm(phi, 5.6, Q), ToleranceError);
    CHECK_THROWS_AS(sobolev_norm(TestFunction::cauchy(Complex(0, 1)), 1.0, Q),
                    PreconditionError);
}

TEST_CASE("test function derivative consistency (finite differences)") {
    const double h = 1e-5;
    for (const TestFunction& f :
         {TestFunction::bump(0.2, 0.9), TestFunction::cauchy(Complex(0.3, 1.1))}) {
        for (int k = 0; k + 1 <= 6; ++k) {
            for (double x : {-0.4, 0.11, 0.55}) {
                const Complex fd = (f.deriv(k, x + h) - f.deriv(k, x - h)) / (2.0 * h);
                const Complex an = f.deriv(k + 1, x);
                CHECK(std::abs(fd - an) <= 1e-4 * (1.0 + std::abs(an)));
            }
        }
    }
}
