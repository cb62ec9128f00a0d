#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "pertlab/limit_model.hpp"
#include "pertlab/quadrature.hpp"
#include "pertlab/test_function.hpp"

namespace pertlab {

/// Integrand of a principal-value integral: compactly supported callable with
/// its support hull and interior non-smooth points.
struct PvIntegrand {
    std::function<double(double)> value;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> breaks;
};

/// H[u](s) = p.v. int u(t)/(s-t) dt.  Inside the support the singularity is
/// removed by symmetric exclusion of (s-eta, s+eta) plus the exact log term,
/// and the leftover O(eta) ball error is cancelled by Richardson over
/// (eta, eta/2).  eta narrows automatically near the support edges.
double hilbert_pv(const PvIntegrand& u, double s, const QuadratureConfig& q);

/// F(s) = -rho(s) H[tau(s,.) rho(.)](s);  0 outside supp(rho).
double F_numeric(const LimitModel& model, double s, const QuadratureConfig& q);

/// A function sampled on a quadrature rule, ready for reuse across many z.
struct SampledCurve {
    std::vector<double> nodes, weights, values;
    double lo = 0.0, hi = 0.0;
};

/// F_numeric sampled over supp(rho) on edge-graded, kink-split panels.
SampledCurve sample_F(const LimitModel& model, const QuadratureConfig& q);

/// B(z) = int int tau(s,t) rho(s) rho(t) / ((z-s)^2 (z-t)) ds dt, the
/// pushforward form of the [0,1]^2 double integral over the variance profile.
/// Iterated panel Gauss-Legendre, refined until two refinements agree.
Complex B_quadrature(const LimitModel& model, Complex z, const QuadratureConfig& q);

/// B(z) = -int F(s)/(z-s)^2 ds, from a pre-sampled F curve or a callable.
Complex B_via_F(const SampledCurve& F, Complex z);
Complex B_via_F(const std::function<double(double)>& F, Interval support,
                const std::vector<double>& kinks, Complex z, const QuadratureConfig& q);

/// E Z_phi Z_psi = int_0^1 sigma_d(t)^2 phi'(f(t)) psi'(f(t)) dt (bilinear, no
/// conjugation; pass psi.conjugated() for E Z_phi conj(Z_psi)).
Complex z_covariance(const LimitModel& model, const TestFunction& phi, const TestFunction& psi,
                     const QuadratureConfig& q);

/// Bilinear/sesquilinear covariance evaluator of the Gaussian field Z.
struct FieldCovariance {
    LimitModel model;
    QuadratureConfig q;

    Complex bilinear(const TestFunction& phi, const TestFunction& psi) const;
    Complex sesquilinear(const TestFunction& phi, const TestFunction& psi) const;
    /// Var(Re Z_phi), Var(Im Z_phi) from (E Z conj(Z), E Z Z).
    std::pair<double, double> component_variances(const TestFunction& phi) const;
};

/// Solution of C_t(x,z) = 1/(z - f(x) - t int sigma^2(x,y) C_t(y,z) dy) on a
/// quadrature grid, with S(t,z) = int_0^1 C_t(x,z) dx.
struct FreeFixedPoint {
    Complex S{};
    int iterations = 0;
    std::vector<double> nodes, weights;
    std::vector<Complex> values;

    /// Consistent off-grid evaluation (one more application of the map).
    std::function<Complex(double)> C;
};

FreeFixedPoint free_fixed_point(const LimitModel& model, double t, Complex z,
                                const QuadratureConfig& q);

/// Smooth cutoff chi(x+iy) = cx(x) cy(y): identically 1 on [x0,x1] x [-y0,y0],
/// fading to 0 outside [x0-margin, x1+margin] x [-y1,y1].
struct CutoffSpec {
    double x0, x1;
    double margin;
    double y0, y1;
};

/// Helffer-Sjostrand reconstruction
///   phi(lambda) = (1/pi) int_C dbar(phi~_p chi)(z) / (lambda - z) d^2 z
/// with phi~_p the almost analytic extension of degree p.  Quadrature panels
/// follow the structure of chi and phi only (no grading toward lambda): the
/// residual error is then governed by the y^p vanishing of dbar phi~_p near
/// the real axis, which is what the degree comparison tests observe.
double hs_reconstruct(const TestFunction& phi, int p, double lambda, const CutoffSpec& chi,
                      const QuadratureConfig& q);

/// || k -> (1+2|k|)^s phihat(k) ||_{L^2} with phihat(k) = int e^{ikx} phi(x) dx,
/// on a truncated k-grid; the spectral tail bound uses ||phi^{(6)}||_1 decay
/// and is added in quadrature.  Throws ToleranceError if the tail cannot be
/// brought below tolerance.
double sobolev_norm(const TestFunction& phi, double s, const QuadratureConfig& q,
                    double* tail_bound = nullptr);

}  // namespace pertlab
