#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace pertlab {

/// Compensated accumulator; summation order does not affect results at the
/// 1e-12 level.
template <typename T>
struct KahanSum {
    T sum{}, comp{};

    void add(T v) {
        const T y = v - comp;
        const T t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    T value() const { return sum; }
};

struct SampleMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double var = 0.0;       // unbiased
    double skewness = 0.0;
    double kurtosis = 0.0;  // raw kurtosis (3 for a normal)

    double stderr_mean() const { return n > 0 ? std::sqrt(var / n) : 0.0; }
    /// approximate standard error of the sample variance under normality
    double stderr_var() const { return n > 1 ? var * std::sqrt(2.0 / (n - 1)) : 0.0; }
};

inline SampleMoments sample_moments(const std::vector<double>& x) {
    SampleMoments m;
    m.n = x.size();
    if (x.empty()) return m;
    KahanSum<double> s;
    for (double v : x) s.add(v);
    m.mean = s.value() / x.size();
    KahanSum<double> s2, s3, s4;
    for (double v : x) {
        const double d = v - m.mean;
        s2.add(d * d);
        s3.add(d * d * d);
        s4.add(d * d * d * d);
    }
    const double n = static_cast<double>(x.size());
    const double m2 = s2.value() / n;
    m.var = x.size() > 1 ? s2.value() / (n - 1.0) : 0.0;
    if (m2 > 0.0) {
        m.skewness = (s3.value() / n) / std::pow(m2, 1.5);
        m.kurtosis = (s4.value() / n) / (m2 * m2);
    }
    return m;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Kolmogorov-Smirnov distance of standardized samples to N(0,1).
/// Degenerate (zero variance) input reports distance 1/2.
inline double ks_distance_normal(std::vector<double> x) {
    if (x.empty()) return 0.5;
    const SampleMoments m = sample_moments(x);
    const double sd = std::sqrt(m.var);
    if (!(sd > 0.0)) return 0.5;
    for (double& v : x) v = (v - m.mean) / sd;
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = normal_cdf(x[i]);
        d = std::fmax(d, std::fabs((i + 1) / n - c));
        d = std::fmax(d, std::fabs(c - i / n));
    }
    return d;
}

}  // namespace pertlab
