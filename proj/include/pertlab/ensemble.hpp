#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pertlab/dense.hpp"
#include "pertlab/limit_model.hpp"

namespace pertlab {

enum class EntryLaw { RealGaussian, ComplexGaussian, SymmetricBernoulli };

EntryLaw entry_law_parse(const std::string& name);
std::string entry_law_str(EntryLaw law);

/// Finite-n realization parameters; eps_n = c * n^{-alpha}.
struct SampleConfig {
    int n = 1;
    double c = 1.0;
    double alpha = 0.0;
    EntryLaw law = EntryLaw::RealGaussian;
    std::uint64_t seed = 0;

    double eps() const;
};

/// One realization of (D_n, X_n).  X is stored with the 1/sqrt(n) scaling
/// applied, so D_n^eps = diag(diag) + eps * X.  Exactly one of X / Xc is
/// populated depending on the entry law.
struct PerturbationSample {
    std::vector<double> diag;  // lambda_n(1..n)
    Mat X;                     // real laws
    CMat Xc;                   // complex-gaussian law
    bool complex_entries = false;
    SampleConfig config;
    double eps = 0.0;
    // variance profile actually used; (i,j) one-based.  Defaults to the model
    // values sigma^2(i/n, j/n), which makes eta_n vanish.
    std::function<double(int, int)> sigma_n2;
};

/// lambda_n(i) = f(i/n), i = 1..n.
std::vector<double> build_diagonal(const LimitModel& model, int n);

/// Draws X with independent entries above the diagonal scaled by the variance
/// profile; exactly Hermitian; bitwise reproducible from the seed.
PerturbationSample sample_perturbation(const LimitModel& model, const SampleConfig& cfg);

/// eta_n = max{n eps, 1} * sup_{i != j} ( |sigma_n^2(i,j) - sigma^2(i/n,j/n)|
///                                        + |lambda_n(i) - f(i/n)| ).
double discrepancy_eta(const LimitModel& model, const PerturbationSample& sample);

/// Dense D_n^eps = diag + eps X (real path).  The rvalue overload reuses the
/// sample's storage, which matters at n = 10^4.
Mat perturbed_matrix(const PerturbationSample& s);
Mat perturbed_matrix(PerturbationSample&& s);
CMat perturbed_matrix_complex(const PerturbationSample& s);

}  // namespace pertlab
