#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pertlab/ensemble.hpp"
#include "pertlab/limit_model.hpp"
#include "pertlab/quadrature.hpp"
#include "pertlab/stats.hpp"
#include "pertlab/test_function.hpp"

namespace pertlab {

enum class Regime { Perturbative, Critical, Semi, SemiFine };

Regime regime_parse(const std::string& name);
std::string regime_str(Regime r);

/// Nameable test function for configs: a Cauchy kernel phi_z or a C^6 bump.
struct PhiSpec {
    enum class Kind { Cauchy, Bump };
    Kind kind = Kind::Cauchy;
    Complex z{0.0, 1.0};
    double center = 0.0, halfwidth = 1.0;

    TestFunction build() const;
    std::string str() const;
};

struct RegimeSpec {
    Regime regime = Regime::Perturbative;
    ExampleId model;
    std::vector<int> n_list{1000};
    double c = 1.0;
    double alpha = 1.5;
    int trials = 100;
    EntryLaw law = EntryLaw::RealGaussian;
    std::uint64_t seed = 1;
    std::vector<PhiSpec> phis{PhiSpec{}};
    double stderr_cap = 0.0;  // 0 = no cap; otherwise cells exceeding it are flagged

    /// Parses and validates the JSON config; throws ConfigError on a regime
    /// tag inconsistent with alpha (perturbative <=> alpha > 1, critical <=>
    /// alpha = 1, semi <=> alpha in (0,1), semi-fine also alpha > 1/3).
    static RegimeSpec from_json(const std::string& text);
    void validate() const;
};

/// Aggregates for one (n, phi) cell of a regime run.
struct ReportCell {
    int n = 0;
    double eps = 0.0;
    std::string phi;
    SampleMoments re, im;  // of the regime-normalized statistic
    double ks_re = 0.0, ks_im = 0.0;
    double theory_mean_re = 0.0, theory_mean_im = 0.0;
    double theory_var_re = 0.0, theory_var_im = 0.0, theory_var_total = 0.0;
    double runtime_ms = 0.0;
    bool stderr_exceeds_cap = false;
    std::string error;  // per-cell numeric failures are recorded, not fatal
};

struct ExperimentReport {
    RegimeSpec spec;
    std::vector<ReportCell> cells;
    double runtime_ms = 0.0;

    std::string to_json() const;
};

/// Monte Carlo over (n, trial): sample, diagonalize, form the regime's
/// normalized statistic, aggregate against the theory references.
ExperimentReport run_regime(const RegimeSpec& spec,
                            const QuadratureConfig& q = QuadratureConfig{});

// ---------------------------------------------------------------------------

enum class Figure { Fig1, Fig2, Fig3, Fig4 };

Figure figure_parse(const std::string& name);

struct Dataset {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_csv(const Dataset& ds, const std::string& path);

/// One-matrix reproduction of the paper's plots.
///  fig1: band (half-width ell), CDF of eps^-2(mu^eps - mu) vs F
///  fig2: triangular, same CDF comparison
///  fig3: triangular (diagonal-free), Im Stieltjes of eps^-2(mu^eps - mu)
///        vs Im B at z = E + i on the widened 81-point grid
///  fig4: parabolic, CDF comparison
Dataset figure_dataset(Figure fig, int n, double alpha, std::uint64_t seed, double ell = 0.2,
                       const QuadratureConfig& q = QuadratureConfig{});

/// Histogram companion for fig2/fig4: eigenvalue density of one D_n^eps
/// against rho + eps^2 F' on `bins` equal bins over the support.
Dataset figure_histogram(Figure fig, int n, double alpha, std::uint64_t seed, int bins = 100);

// ---------------------------------------------------------------------------

struct LocalLawCell {
    int n = 0;
    double im_z = 0.0;
    double deviation = 0.0;  // E |eps^-2 dG(z_n) - B(z_n)| over trials
    double stderr_ = 0.0;
};

struct LocalLawReport {
    double alpha = 0.0, beta = 0.0;
    bool constraint_ok = false;  // beta < min((1-alpha)/2, 2 alpha/5) given eta_n = 0
    std::vector<LocalLawCell> cells;
    double loglog_slope = 0.0;  // of deviation vs n
    bool decays = false;

    std::string to_json() const;
};

/// Probes eps^-2 dG(z_n) - B(z_n) along Im z_n = n^{-beta}.
LocalLawReport local_law_probe(const ExampleId& model, const std::vector<int>& n_list,
                               double alpha, double beta, int trials, std::uint64_t seed,
                               double e0, const QuadratureConfig& q = QuadratureConfig{});

// ---------------------------------------------------------------------------

struct SubregimeCell {
    int n = 0;
    double eps = 0.0;
    double mean_abs_A = 0.0, mean_abs_D4 = 0.0;
    double ratio() const { return mean_abs_D4 / mean_abs_A; }
};

struct SubregimeReport {
    double alpha = 0.0;
    std::vector<SubregimeCell> cells;
    double slope_D4_vs_eps = 0.0;   // expect 4
    double slope_A_vs_epsn = 0.0;   // expect 1 against eps/n

    std::string to_json() const;
};

/// |D4| and |A| scalings at z = i across the n-list (no eigensolve involved).
SubregimeReport subregime_probe(const ExampleId& model, const std::vector<int>& n_list,
                                double alpha, int trials, std::uint64_t seed);

// ---------------------------------------------------------------------------

struct NormalityComponent {
    double ks = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    bool degenerate = false;  // zero variance; ks reported as 1/2
};

struct NormalityReport {
    std::size_t n = 0;
    NormalityComponent re, im;

    std::string to_json() const;
};

/// KS distance to the standard normal of the standardized real and imaginary
/// parts, plus shape statistics.  Requires at least 200 samples.
NormalityReport clt_normality_check(const std::vector<Complex>& samples);

}  // namespace pertlab
