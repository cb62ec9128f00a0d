#include "pertlab/theory.hpp"

#include <algorithm>
#include <cmath>

#include "pertlab/errors.hpp"

namespace pertlab {

namespace {

double clampd(double v, double lo, double hi) { return std::fmin(hi, std::fmax(lo, v)); }

// distance from z to the real interval [lo,hi]
double dist_to_interval(Complex z, double lo, double hi) {
    const double dx = z.real() < lo ? lo - z.real() : (z.real() > hi ? z.real() - hi : 0.0);
    return std::hypot(dx, z.imag());
}

std::vector<double> clip_points(const std::vector<double>& pts, double lo, double hi) {
    std::vector<double> r;
    for (double p : pts)
        if (p > lo && p < hi) r.push_back(p);
    return r;
}

}  // namespace

double hilbert_pv(const PvIntegrand& u, double s, const QuadratureConfig& q) {
    const double lo = u.lo, hi = u.hi;
    if (!(hi > lo)) throw ParameterError("hilbert_pv: empty support");

    if (s <= lo || s >= hi) {
        // no singularity inside the support
        auto pts = panel_points(lo, hi, q.panels, clip_points(u.breaks, lo, hi), {lo, hi});
        return integrate_panels([&](double t) { return u.value(t) / (s - t); }, pts, q.nodes);
    }

    const double us = u.value(s);
    const double logterm = std::log((hi - s) / (s - lo));

    auto J = [&](double eta, int base) {
        double total = 0.0;
        const auto piece = [&](double a, double b) {
            if (!(b > a)) return;
            auto pts = panel_points(a, b, base, clip_points(u.breaks, a, b), {a, b});
            total += integrate_panels([&](double t) { return (u.value(t) - us) / (t - s); },
                                      pts, q.nodes);
        };
        piece(lo, s - eta);
        piece(s + eta, hi);
        return total;
    };

    double eta = std::fmin(q.pv_eta, 0.25 * std::fmin(s - lo, hi - s));
    int base = std::max(8, q.panels / 2);
    for (int round = 0;; ++round) {
        // the excluded ball contributes 2 u'(s) eta + O(eta^3); two Richardson
        // levels cancel the linear and cubic terms and bound what remains
        const double J1 = J(eta, base);
        const double J2 = J(eta / 2.0, base);
        const double J3 = J(eta / 4.0, base);
        const double R1 = 2.0 * J2 - J1;
        const double R2 = 2.0 * J3 - J2;
        const double Jr = R2 + (R2 - R1) / 7.0;
        const double H = -(Jr + us * logterm);
        const double est = std::fabs(R2 - R1) / 7.0;
        if (est <= q.tol * std::fmax(1.0, std::fabs(H)) || round == 3) {
            if (round == 3 && est > 10.0 * q.tol * std::fmax(1.0, std::fabs(H)))
                throw ToleranceError("hilbert_pv: failed to meet tolerance");
            return H;
        }
        eta *= 0.25;
        base *= 2;
    }
}

double F_numeric(const LimitModel& model, double s, const QuadratureConfig& q) {
    const double lo = model.support.lo, hi = model.support.hi;
    if (s <= lo || s >= hi) return 0.0;
    const double rs = model.rho(s);
    if (rs == 0.0) return 0.0;
    PvIntegrand u;
    u.lo = lo;
    u.hi = hi;
    u.value = [&model, s](double t) { return model.tau(s, t) * model.rho(t); };
    u.breaks = model.rho_kinks;
    if (model.tau_kinks)
        for (double b : model.tau_kinks(s)) u.breaks.push_back(b);
    return -rs * hilbert_pv(u, s, q);
}

namespace {

// kinks of F itself: rho kinks plus the loci where a tau window edge crosses
// the support boundary (for the band model, s = l and s = 1 - l).
std::vector<double> correction_kinks(const LimitModel& model) {
    std::vector<double> k = model.rho_kinks;
    if (model.tau_kinks) {
        const double lo = model.support.lo, hi = model.support.hi;
        // detect window half-width from the kinks of tau(s,.) at mid-support
        const double mid = 0.5 * (lo + hi);
        for (double t : model.tau_kinks(mid)) {
            const double w = std::fabs(t - mid);
            if (w > 0.0 && w < hi - lo) {
                k.push_back(lo + w);
                k.push_back(hi - w);
            }
        }
    }
    return k;
}

}  // namespace

SampledCurve sample_F(const LimitModel& model, const QuadratureConfig& q) {
    const double lo = model.support.lo, hi = model.support.hi;
    auto pts = panel_points(lo, hi, q.panels, correction_kinks(model), {lo, hi});
    const GaussLegendre& gl = gauss_legendre(q.nodes);
    SampledCurve c;
    c.lo = lo;
    c.hi = hi;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double mid = 0.5 * (pts[k] + pts[k + 1]);
        const double hw = 0.5 * (pts[k + 1] - pts[k]);
        for (std::size_t j = 0; j < gl.x.size(); ++j) {
            const double s = mid + hw * gl.x[j];
            c.nodes.push_back(s);
            c.weights.push_back(hw * gl.w[j]);
            c.values.push_back(F_numeric(model, s, q));
        }
    }
    return c;
}

Complex B_quadrature(const LimitModel& model, Complex z, const QuadratureConfig& q) {
    const double lo = model.support.lo, hi = model.support.hi;
    if (dist_to_interval(z, lo, hi) < 1e-12)
        throw DomainError("B_quadrature: z inside or touching the support");

    // iterated integral over [0,1]^2 in the profile variables; breakpoints of
    // sigma^2 and the resolvent peak pulled back through the CDF
    std::vector<double> grade{0.0, 1.0};
    if (model.cdf && z.real() > lo && z.real() < hi) grade.push_back(model.cdf(z.real()));

    std::vector<double> outer_breaks;
    if (model.cdf)
        for (double k : correction_kinks(model)) outer_breaks.push_back(model.cdf(k));

    auto compute = [&](int base) {
        auto outer_pts = panel_points(0.0, 1.0, base, clip_points(outer_breaks, 0.0, 1.0), grade);
        return integrate_panels(
            [&](double x) -> Complex {
                const double fx = model.f(x);
                std::vector<double> ibreaks;
                if (model.cdf && model.tau_kinks)
                    for (double t : model.tau_kinks(fx)) ibreaks.push_back(model.cdf(t));
                auto inner_pts =
                    panel_points(0.0, 1.0, base, clip_points(ibreaks, 0.0, 1.0), grade);
                const Complex inner = integrate_panels(
                    [&](double y) -> Complex { return model.sigma2(x, y) / (z - model.f(y)); },
                    inner_pts, q.nodes);
                const Complex d = z - fx;
                return inner / (d * d);
            },
            outer_pts, q.nodes);
    };

    int base = std::max(16, q.panels / 2);
    Complex prev = compute(base);
    for (int round = 0; round < 3; ++round) {
        base *= 2;
        const Complex next = compute(base);
        if (std::abs(next - prev) <= q.tol * std::fmax(1.0, std::abs(next))) return next;
        prev = next;
    }
    throw ToleranceError("B_quadrature: refinements failed to settle");
}

Complex B_via_F(const SampledCurve& F, Complex z) {
    if (dist_to_interval(z, F.lo, F.hi) < 1e-12)
        throw DomainError("B_via_F: z inside or touching supp F");
    Complex acc{};
    for (std::size_t k = 0; k < F.nodes.size(); ++k) {
        const Complex d = z - F.nodes[k];
        acc += F.weights[k] * F.values[k] / (d * d);
    }
    return -acc;
}

Complex B_via_F(const std::function<double(double)>& F, Interval support,
                const std::vector<double>& kinks, Complex z, const QuadratureConfig& q) {
    if (dist_to_interval(z, support.lo, support.hi) < 1e-12)
        throw DomainError("B_via_F: z inside or touching supp F");
    auto pts = panel_points(support.lo, support.hi, q.panels,
                            clip_points(kinks, support.lo, support.hi),
                            {support.lo, support.hi});
    return -integrate_panels(
        [&](double s) -> Complex {
            const Complex d = z - s;
            return F(s) / (d * d);
        },
        pts, q.nodes);
}

Complex z_covariance(const LimitModel& model, const TestFunction& phi, const TestFunction& psi,
                     const QuadratureConfig& q) {
    // breaks where f crosses the support edges of a compact test function
    std::vector<double> breaks;
    if (model.cdf) {
        for (const TestFunction* t : {&phi, &psi}) {
            if (t->kind == TestFunction::Kind::GenericC6 && t->compact) {
                breaks.push_back(model.cdf(t->lo));
                breaks.push_back(model.cdf(t->hi));
            }
        }
    }
    auto pts = panel_points(0.0, 1.0, q.panels, clip_points(breaks, 0.0, 1.0), {0.0, 1.0});
    return integrate_panels(
        [&](double t) -> Complex {
            const double ft = model.f(t);
            return model.sigma_d2(t) * phi.deriv(1, ft) * psi.deriv(1, ft);
        },
        pts, q.nodes);
}

Complex FieldCovariance::bilinear(const TestFunction& phi, const TestFunction& psi) const {
    return z_covariance(model, phi, psi, q);
}

Complex FieldCovariance::sesquilinear(const TestFunction& phi, const TestFunction& psi) const {
    return z_covariance(model, phi, psi.conjugated(), q);
}

std::pair<double, double> FieldCovariance::component_variances(const TestFunction& phi) const {
    const double v = sesquilinear(phi, phi).real();  // E Z conj(Z), real by symmetry
    const Complex w = bilinear(phi, phi);            // E Z Z
    return {0.5 * (v + w.real()), 0.5 * (v - w.real())};
}

FreeFixedPoint free_fixed_point(const LimitModel& model, double t, Complex z,
                                const QuadratureConfig& q) {
    if (z.imag() == 0.0) throw DomainError("free_fixed_point: z must be nonreal");
    if (t < 0.0) throw ParameterError("free_fixed_point: t must be >= 0");

    auto pts = panel_points(0.0, 1.0, q.panels, {}, {0.0, 1.0});
    const GaussLegendre& gl = gauss_legendre(std::min(q.nodes, 8));
    FreeFixedPoint fp;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double mid = 0.5 * (pts[k] + pts[k + 1]);
        const double hw = 0.5 * (pts[k + 1] - pts[k]);
        for (std::size_t j = 0; j < gl.x.size(); ++j) {
            fp.nodes.push_back(mid + hw * gl.x[j]);
            fp.weights.push_back(hw * gl.w[j]);
        }
    }
    const int m = static_cast<int>(fp.nodes.size());
    std::vector<double> fx(m);
    for (int i = 0; i < m; ++i) fx[i] = model.f(fp.nodes[i]);

    // kernel K(i,j) = sigma^2(x_i, x_j) w_j
    std::vector<double> K(static_cast<std::size_t>(m) * m);
    double sig_max = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double s2 = model.sigma2(fp.nodes[i], fp.nodes[j]);
            sig_max = std::fmax(sig_max, s2);
            K[static_cast<std::size_t>(i) * m + j] = s2 * fp.weights[j];
        }
    const double bound = 1.0 / std::fabs(z.imag());
    // |t| sigma_max / Im(z)^2 < 1 guarantees contraction; outside we still
    // iterate and report failure honestly.
    fp.values.assign(m, Complex{});
    for (int i = 0; i < m; ++i) fp.values[i] = 1.0 / (z - fx[i]);

    std::vector<Complex> next(m);
    double prev_change = 1e300;
    int grew = 0;
    const double tol = std::fmax(1e-14, q.tol * 1e-3);
    for (int it = 1; it <= 5000; ++it) {
        for (int i = 0; i < m; ++i) {
            Complex integral{};
            const double* Ki = K.data() + static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) integral += Ki[j] * fp.values[j];
            next[i] = 1.0 / (z - fx[i] - t * integral);
        }
        double change = 0.0, amax = 0.0;
        for (int i = 0; i < m; ++i) {
            change = std::fmax(change, std::abs(next[i] - fp.values[i]));
            amax = std::fmax(amax, std::abs(next[i]));
        }
        fp.values.swap(next);
        fp.iterations = it;
        if (amax > bound + 1e-9)
            throw ConvergenceError("free_fixed_point: iterate exceeds 1/|Im z| bound");
        if (change < tol) break;
        grew = change > prev_change ? grew + 1 : 0;
        if (grew >= 10 || it == 5000)
            throw ConvergenceError("free_fixed_point: no contraction (t*max sigma^2/Im^2 = " +
                                   std::to_string(t * sig_max / (z.imag() * z.imag())) +
                                   ", change = " + std::to_string(change) + ")");
        prev_change = change;
    }

    Complex S{};
    for (int i = 0; i < m; ++i) S += fp.weights[i] * fp.values[i];
    fp.S = S;

    auto nodes = fp.nodes;
    auto weights = fp.weights;
    auto values = fp.values;
    auto f = model.f;
    auto sigma2 = model.sigma2;
    fp.C = [nodes, weights, values, f, sigma2, t, z](double x) {
        Complex integral{};
        for (std::size_t j = 0; j < nodes.size(); ++j)
            integral += weights[j] * sigma2(x, nodes[j]) * values[j];
        return 1.0 / (z - f(x) - t * integral);
    };
    return fp;
}

// ---------------------------------------------------------------------------
// Helffer-Sjostrand
// ---------------------------------------------------------------------------

namespace {

// C^2 smoothstep on [0,1]
double sstep(double t) {
    t = clampd(t, 0.0, 1.0);
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}
double sstep_d(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t * (t - 1.0) * (t - 1.0);
}

double dfactorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

}  // namespace

double hs_reconstruct(const TestFunction& phi, int p, double lambda, const CutoffSpec& chi,
                      const QuadratureConfig& q) {
    if (p < 1 || p > 5) throw ParameterError("hs_reconstruct: p must be in [1,5]");
    if (!(lambda >= chi.x0 && lambda <= chi.x1))
        throw PreconditionError("hs_reconstruct: chi must be 1 at lambda");
    if (phi.kind == TestFunction::Kind::GenericC6 && phi.compact &&
        !(phi.lo >= chi.x0 && phi.hi <= chi.x1))
        throw PreconditionError("hs_reconstruct: chi must be 1 on supp phi");
    if (!(chi.y1 > chi.y0 && chi.y0 > 0.0 && chi.margin > 0.0))
        throw ParameterError("hs_reconstruct: bad cutoff geometry");

    const double xa = chi.x0 - chi.margin, xb = chi.x1 + chi.margin;
    const auto cx = [&](double x) {
        return sstep((x - xa) / chi.margin) * sstep((xb - x) / chi.margin);
    };
    const auto cx_d = [&](double x) {
        return sstep_d((x - xa) / chi.margin) / chi.margin * sstep((xb - x) / chi.margin) -
               sstep((x - xa) / chi.margin) * sstep_d((xb - x) / chi.margin) / chi.margin;
    };
    const double yw = chi.y1 - chi.y0;
    const auto cy = [&](double y) { return sstep((chi.y1 - std::fabs(y)) / yw); };
    const auto cy_d = [&](double y) {
        return -(y >= 0.0 ? 1.0 : -1.0) * sstep_d((chi.y1 - std::fabs(y)) / yw) / yw;
    };

    const double pfac = dfactorial(p);
    const Complex half(0.5, 0.0);

    // panels follow the cutoff structure and supp phi; deliberately no grading
    // toward lambda, see header comment
    std::vector<double> xbreaks{chi.x0, chi.x1};
    if (phi.compact) {
        xbreaks.push_back(phi.lo);
        xbreaks.push_back(phi.hi);
    }
    auto xpts = panel_points(xa, xb, q.panels / 2, clip_points(xbreaks, xa, xb), {}, 1);
    // the y rule splits at the chi shoulders but deliberately not at y = 0:
    // the panel straddling the real axis is where the (iy)^p vanishing of
    // dbar phi~_p sets the resolution limit
    auto ypts = panel_points(-chi.y1, chi.y1, std::max(3, q.panels / 4) | 1,
                             {-chi.y0, chi.y0}, {}, 1);

    const Complex integral = integrate_panels(
        [&](double x) -> Complex {
            // phi-data at x
            std::array<Complex, 8> dk{};
            for (int k = 0; k <= p + 1; ++k) dk[k] = phi.deriv(k, x);
            const double cxv = cx(x), cxdv = cx_d(x);
            return integrate_panels(
                [&](double y) -> Complex {
                    const Complex iy(0.0, y);
                    Complex phit{};
                    Complex iyk(1.0, 0.0);  // (iy)^k
                    Complex iyp(1.0, 0.0);  // (iy)^p
                    for (int k = 0; k <= p; ++k) {
                        phit += iyk * dk[k] / dfactorial(k);
                        if (k == p) iyp = iyk;
                        iyk *= iy;
                    }
                    // dbar phi~_p = (iy)^p phi^{(p+1)}(x) / (2 p!)
                    const Complex dbar_phit = half * iyp * dk[p + 1] / pfac;
                    const double cyv = cy(y);
                    const Complex dbar_chi = half * (cxdv * cyv + Complex(0.0, 1.0) * cxv * cy_d(y));
                    const Complex num = cxv * cyv * dbar_phit + phit * dbar_chi;
                    return num / (lambda - Complex(x, y));
                },
                ypts, std::max(6, q.nodes / 2));
        },
        xpts, std::max(8, q.nodes / 2));

    return (integral / M_PI).real();
}

double sobolev_norm(const TestFunction& phi, double s, const QuadratureConfig& q,
                    double* tail_bound) {
    if (phi.kind != TestFunction::Kind::GenericC6 || !phi.compact)
        throw PreconditionError("sobolev_norm: need a compactly supported test function");
    if (!(s >= 0.0)) throw ParameterError("sobolev_norm: s must be >= 0");
    const double lo = phi.lo, hi = phi.hi, W = hi - lo;

    // ||phi^{(6)}||_1 drives the spectral tail |phihat(k)| <= M6 / |k|^6
    auto base_pts = panel_points(lo, hi, q.panels, {}, {lo, hi});
    const double M6 = integrate_panels(
        [&](double x) { return std::abs(phi.deriv(6, x)); }, base_pts, q.nodes);

    auto phihat = [&](double k) -> Complex {
        const int osc = static_cast<int>(std::ceil(std::fabs(k) * W / 4.0));
        auto pts = panel_points(lo, hi, std::max(q.panels / 2, osc), {}, {});
        return integrate_panels(
            [&](double x) { return std::exp(Complex(0.0, k * x)) * phi(x); }, pts, q.nodes);
    };

    // tail^2 <= 2 integral_K^inf (1+2k)^{2s} M6^2 k^{-12} dk, and
    // (1+2k)^{2s} <= (3k)^{2s} for k >= 1
    const double expo = 2.0 * s - 11.0;
    if (expo >= 0.0)
        throw ToleranceError("sobolev_norm: s too large for the C^6 spectral tail bound");
    double K = 64.0;
    double tail = 0.0;
    for (int round = 0;; ++round) {
        tail = std::sqrt(2.0 * std::pow(3.0, 2.0 * s) * M6 * M6 * std::pow(K, expo) / (-expo));
        if (tail <= std::fmax(q.tol, 1e-12) || round == 8) break;
        K *= 2.0;
    }
    if (tail_bound) *tail_bound = tail;
    if (tail > std::fmax(q.tol, 1e-12))
        throw ToleranceError("sobolev_norm: tail bound exceeds tolerance at K=" +
                             std::to_string(K));

    const int kpanels = std::max(2 * q.panels, static_cast<int>(std::ceil(K * W / 2.0)));
    auto kpts = panel_points(-K, K, kpanels, {0.0}, {-K, 0.0, K});
    const double norm2 = integrate_panels(
        [&](double k) {
            const double wgt = std::pow(1.0 + 2.0 * std::fabs(k), 2.0 * s);
            return wgt * std::norm(phihat(k));
        },
        kpts, q.nodes);
    return std::sqrt(norm2 + tail * tail);
}

}  // namespace pertlab
