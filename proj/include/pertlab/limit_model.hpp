#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pertlab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double s) const { return s >= lo && s <= hi; }
};

/// Regularity constants of the kernel: |tau(s,t)rho(t) - tau(s,s)rho(s)| <= C |t-s|^alpha
/// for |t-s| <= eta0.  Diagnostic only.
struct HolderConstants {
    double eta0 = 0.05;
    double alpha = 1.0;
    double C = 1.0;
};

/// Limiting data of an ensemble family: eigenvalue profile f on [0,1], variance
/// profiles sigma^2 (off-diagonal) and sigma_d^2 (diagonal), the spectral
/// density rho = pushforward of Uniform[0,1] by f, and the kernel tau with
/// sigma^2(x,y) = tau(f(x),f(y)).
struct LimitModel {
    std::function<double(double)> f;                    // [0,1] -> R
    std::function<double(double, double)> sigma2;       // [0,1]^2 -> R>=0, symmetric
    std::function<double(double)> sigma_d2;             // [0,1] -> R>=0
    std::function<double(double)> rho;                  // R -> R>=0
    std::function<double(double, double)> tau;          // R^2 -> R>=0, symmetric
    Interval support;                                   // hull of supp(rho)
    HolderConstants holder;

    // catalog conveniences used by the quadratures
    std::function<double(double)> cdf;                  // CDF of rho (exact for catalog models)
    std::vector<double> rho_kinks;                      // interior non-smooth points of rho
    std::function<std::vector<double>(double)> tau_kinks;  // t-kinks of tau(s,.) for given s
};

struct ExampleId {
    enum class Kind { UniformBand, TriangularWigner, ParabolicWigner };

    Kind kind = Kind::UniformBand;
    double ell = 0.2;  // band half-width, in (0,1]
    double m = 1.0;    // diagonal scale, >= 0

    /// Parses "band:l=0.2,m=1", "triangular:m=1", "parabolic:m=0".
    static ExampleId parse(const std::string& text);
    std::string str() const;
};

/// Builds the closed-form catalog model for `id`.
LimitModel make_model(const ExampleId& id);

/// Closed form of the deterministic correction F for the catalog models.
/// Returns 0 outside the support.
double closed_form_F(const ExampleId& id, double s);

/// Quantile function of rho: inf{ t : CDF(t) >= x }, by bisection on the CDF.
double eval_quantile_f(const LimitModel& model, double x);

}  // namespace pertlab
