#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "pertlab/dense.hpp"
#include "pertlab/eigensolve.hpp"
#include "pertlab/test_function.hpp"

namespace pertlab {

/// The signed measure mu_n^eps - mu_n, held as the two sorted spectra.
struct SignedSpectralDiff {
    Spectrum base;  // spectrum of D_n
    Spectrum pert;  // spectrum of D_n^eps
    double eps = 1.0;

    int n() const { return base.n(); }
};

SignedSpectralDiff make_diff(Spectrum base, Spectrum pert, double eps);

/// (1/n) sum_i 1/(z - lambda_i).
Complex stieltjes(const Spectrum& spec, Complex z);

/// Delta G_n(z) = (mu^eps - mu)(phi_z).
Complex delta_G(const SignedSpectralDiff& diff, Complex z);

/// eps^{-2} ( #{lambda^eps <= s} - #{lambda <= s} ) / n.
double signed_cdf_diff(const SignedSpectralDiff& diff, double s);

/// (mu^eps - mu)(phi) = (1/n)( sum phi(lambda^eps) - sum phi(lambda) ).
Complex pair_test_function(const SignedSpectralDiff& diff, const TestFunction& phi);

/// Resolvent expansion terms at z: with resolvents R = (z-D)^{-1} against the
/// unperturbed diagonal,
///   A = (eps/n)   Tr[R X R],
///   B = (eps^2/n) Tr[R X R X R],
///   C = (eps^3/n) Tr[R X R X R X R],
///   D4 = (eps^4/n) Tr[R X R X R X R X R]            (optional),
///   R_rem = (eps^4/n) Tr[(R X)^4 (z - D^eps)^{-1}]  (own closed formula).
/// The telescoping A + B + C + R_rem = Delta G_n(z) is exact and is left to
/// the tests, not enforced here.
struct ResolventTerms {
    Complex z;
    Complex A, B, C, R;
    std::optional<Complex> D4;

    Complex sum() const { return A + B + C + R; }
};

ResolventTerms resolvent_terms(const std::vector<double>& diag, const Mat& X, double eps,
                               Complex z, bool with_D4 = false);
ResolventTerms resolvent_terms(const std::vector<double>& diag, const CMat& X, double eps,
                               Complex z, bool with_D4 = false);

}  // namespace pertlab
