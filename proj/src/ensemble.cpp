#include "pertlab/ensemble.hpp"

#include <cmath>

#include "pertlab/errors.hpp"
#include "pertlab/rng.hpp"

namespace pertlab {

EntryLaw entry_law_parse(const std::string& name) {
    if (name == "real-gaussian") return EntryLaw::RealGaussian;
    if (name == "complex-gaussian") return EntryLaw::ComplexGaussian;
    if (name == "symmetric-bernoulli") return EntryLaw::SymmetricBernoulli;
    throw ParameterError("unknown entry law '" + name + "'");
}

std::string entry_law_str(EntryLaw law) {
    switch (law) {
        case EntryLaw::RealGaussian: return "real-gaussian";
        case EntryLaw::ComplexGaussian: return "complex-gaussian";
        case EntryLaw::SymmetricBernoulli: return "symmetric-bernoulli";
    }
    return "?";
}

double SampleConfig::eps() const {
    if (n < 1) throw ParameterError("SampleConfig: n must be >= 1");
    if (!(c > 0.0)) throw ParameterError("SampleConfig: c must be > 0");
    if (alpha < 0.0) throw ParameterError("SampleConfig: alpha must be >= 0");
    return c * std::pow(static_cast<double>(n), -alpha);
}

std::vector<double> build_diagonal(const LimitModel& model, int n) {
    if (n < 1) throw ParameterError("build_diagonal: n must be >= 1");
    std::vector<double> d(n);
    for (int i = 1; i <= n; ++i) d[i - 1] = model.f(static_cast<double>(i) / n);
    return d;
}

PerturbationSample sample_perturbation(const LimitModel& model, const SampleConfig& cfg) {
    const int n = cfg.n;
    PerturbationSample s;
    s.config = cfg;
    s.eps = cfg.eps();
    s.diag = build_diagonal(model, n);
    s.complex_entries = (cfg.law == EntryLaw::ComplexGaussian);

    const double root_n = std::sqrt(static_cast<double>(n));
    Rng rng(cfg.seed);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    // Canonical draw order: for each row i, the diagonal entry then j > i.
    // Zero-variance entries still consume draws, so the underlying field is
    // shared across band widths at a fixed seed.
    if (!s.complex_entries) {
        s.X = Mat(n);
        for (int i = 1; i <= n; ++i) {
            const double xi = static_cast<double>(i) / n;
            const double sd = std::sqrt(model.sigma_d2(xi));
            const double gd =
                cfg.law == EntryLaw::SymmetricBernoulli ? rng.rademacher() : rng.gaussian();
            s.X(i - 1, i - 1) = sd * gd / root_n;
            for (int j = i + 1; j <= n; ++j) {
                const double sig = std::sqrt(model.sigma2(xi, static_cast<double>(j) / n));
                const double g =
                    cfg.law == EntryLaw::SymmetricBernoulli ? rng.rademacher() : rng.gaussian();
                const double v = sig * g / root_n;
                s.X(i - 1, j - 1) = v;
                s.X(j - 1, i - 1) = v;
            }
        }
    } else {
        s.Xc = CMat(n);
        for (int i = 1; i <= n; ++i) {
            const double xi = static_cast<double>(i) / n;
            const double sd = std::sqrt(model.sigma_d2(xi));
            s.Xc(i - 1, i - 1) = Complex(sd * rng.gaussian() / root_n, 0.0);
            for (int j = i + 1; j <= n; ++j) {
                const double sig = std::sqrt(model.sigma2(xi, static_cast<double>(j) / n));
                const double g1 = rng.gaussian();
                const double g2 = rng.gaussian();
                const Complex v = sig * inv_sqrt2 * Complex(g1, g2) / root_n;
                s.Xc(i - 1, j - 1) = v;
                s.Xc(j - 1, i - 1) = std::conj(v);
            }
        }
    }

    auto sigma2 = model.sigma2;
    s.sigma_n2 = [sigma2, n](int i, int j) {
        return sigma2(static_cast<double>(i) / n, static_cast<double>(j) / n);
    };
    return s;
}

double discrepancy_eta(const LimitModel& model, const PerturbationSample& sample) {
    const int n = static_cast<int>(sample.diag.size());
    const double factor = std::fmax(n * sample.eps, 1.0);
    double sup = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double dlam = std::abs(sample.diag[i - 1] - model.f(static_cast<double>(i) / n));
        for (int j = 1; j <= n; ++j) {
            if (j == i) continue;
            const double dsig = std::abs(sample.sigma_n2(i, j) -
                                         model.sigma2(static_cast<double>(i) / n,
                                                      static_cast<double>(j) / n));
            sup = std::fmax(sup, dsig + dlam);
        }
    }
    return factor * sup;
}

Mat perturbed_matrix(const PerturbationSample& s) {
    PerturbationSample copy = s;
    return perturbed_matrix(std::move(copy));
}

Mat perturbed_matrix(PerturbationSample&& s) {
    if (s.complex_entries) throw DomainError("perturbed_matrix: sample has complex entries");
    Mat M = std::move(s.X);
    const int n = M.n;
    for (std::size_t k = 0; k < M.a.size(); ++k) M.a[k] *= s.eps;
    for (int i = 0; i < n; ++i) M(i, i) += s.diag[i];
    return M;
}

CMat perturbed_matrix_complex(const PerturbationSample& s) {
    if (!s.complex_entries) throw DomainError("perturbed_matrix_complex: sample is real");
    CMat M = s.Xc;
    const int n = M.n;
    for (std::size_t k = 0; k < M.a.size(); ++k) M.a[k] *= s.eps;
    for (int i = 0; i < n; ++i) M(i, i) += s.diag[i];
    return M;
}

}  // namespace pertlab
