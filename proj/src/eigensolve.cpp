#include "pertlab/eigensolve.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "pertlab/errors.hpp"

namespace pertlab {

namespace {

std::string fingerprint(int n, double trace, double fro2) {
    std::ostringstream os;
    os << "n=" << n << " tr=" << trace << " fro2=" << fro2;
    return os.str();
}

// Householder reduction of a symmetric matrix to tridiagonal form, eigenvalues
// only (no accumulation of transforms).  Works on the lower triangle, row
// sweeps only, so the n^3 traffic streams along cache lines.
void tridiagonalize(Mat& A, std::vector<double>& d, std::vector<double>& e) {
    const int n = A.n;
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    if (n == 1) {
        d[0] = A(0, 0);
        return;
    }
    std::vector<double> p(n);
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double* ai = A.data() + static_cast<std::size_t>(i) * n;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (int k = 0; k <= l; ++k) scale += std::fabs(ai[k]);
            if (scale == 0.0) {
                e[i] = ai[l];
            } else {
                for (int k = 0; k <= l; ++k) {
                    ai[k] /= scale;
                    h += ai[k] * ai[k];
                }
                double f = ai[l];
                const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                ai[l] = f - g;

                // p = A v, one pass over the lower triangle
                std::fill(p.begin(), p.begin() + l + 1, 0.0);
                for (int j = 0; j <= l; ++j) {
                    const double* aj = A.data() + static_cast<std::size_t>(j) * n;
                    const double vj = ai[j];
                    double s = 0.0;
                    for (int k = 0; k < j; ++k) {
                        s += aj[k] * ai[k];
                        p[k] += aj[k] * vj;
                    }
                    p[j] += s + aj[j] * vj;
                }

                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    p[j] /= h;
                    f += p[j] * ai[j];
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) p[j] -= hh * ai[j];  // p is now q

                // A <- A - v q^T - q v^T, lower triangle
                for (int j = 0; j <= l; ++j) {
                    const double vj = ai[j];
                    const double qj = p[j];
                    double* aj = A.data() + static_cast<std::size_t>(j) * n;
                    for (int k = 0; k <= j; ++k) aj[k] -= vj * p[k] + qj * ai[k];
                }
            }
        } else {
            e[i] = ai[l];
        }
    }
    for (int j = 0; j < n; ++j) d[j] = A(j, j);
    e[0] = 0.0;
}

// Implicit-shift QL on a symmetric tridiagonal (d, e); e[i] couples d[i] and
// d[i+1].  Deflation at |e_i| <= eps (|d_i| + |d_{i+1}|), 50 sweeps per
// eigenvalue.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, int n) {
    if (n == 1) return;
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    const double eps = DBL_EPSILON;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw NumericError("eig_sym: QL failed to converge in 50 sweeps");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, pp = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= pp;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - pp;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    pp = s * r;
                    d[i + 1] = g + pp;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= pp;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

void check_invariants(const Spectrum& sp, double trace, double fro2, int n) {
    long double s1 = 0.0L, s2 = 0.0L;
    for (double v : sp.values) {
        s1 += v;
        s2 += static_cast<long double>(v) * v;
    }
    const double tol1 = 1e-10 * (1.0 + std::fabs(trace));
    const double tol2 = 1e-10 * (1.0 + std::fabs(fro2));
    if (std::fabs(static_cast<double>(s1) - trace) > tol1 ||
        std::fabs(static_cast<double>(s2) - fro2) > tol2)
        throw NumericError("eig_sym: spectrum invariants violated [" +
                           fingerprint(n, trace, fro2) + "]");
}

}  // namespace

Spectrum spectrum_from_diagonal(std::vector<double> d) {
    std::sort(d.begin(), d.end());
    return Spectrum{std::move(d)};
}

Spectrum eig_sym(Mat M) {
    const int n = M.n;
    if (n < 1) throw SizeError("eig_sym: empty matrix");

    long double tr = 0.0L, f2 = 0.0L;
    for (int i = 0; i < n; ++i) {
        tr += M(i, i);
        const double* ri = M.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) f2 += static_cast<long double>(ri[j]) * ri[j];
    }
    // symmetrize; inputs are expected symmetric to ~1e-12 already
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const double v = 0.5 * (M(i, j) + M(j, i));
            M(i, j) = v;
            M(j, i) = v;
        }

    std::vector<double> d, e;
    tridiagonalize(M, d, e);
    M.a.clear();
    M.a.shrink_to_fit();
    try {
        ql_implicit(d, e, n);
    } catch (const NumericError& err) {
        throw NumericError(std::string(err.what()) + " [" +
                           fingerprint(n, static_cast<double>(tr), static_cast<double>(f2)) +
                           "]");
    }
    std::sort(d.begin(), d.end());
    Spectrum sp{std::move(d)};
    check_invariants(sp, static_cast<double>(tr), static_cast<double>(f2), n);
    return sp;
}

Spectrum eig_hermitian(const CMat& M) {
    const int n = M.n;
    if (n < 1) throw SizeError("eig_hermitian: empty matrix");
    // M = A + iB, Hermitian: A symmetric, B antisymmetric; the 2n x 2n real
    // matrix [[A, -B], [B, A]] is symmetric with the spectrum of M doubled.
    Mat W(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Complex v = M(i, j);
            W(i, j) = v.real();
            W(n + i, n + j) = v.real();
            W(i, n + j) = -v.imag();
            W(n + i, j) = v.imag();
        }
    Spectrum dbl = eig_sym(std::move(W));

    double scale = 1.0;
    for (double v : dbl.values) scale = std::fmax(scale, std::fabs(v));
    Spectrum sp;
    sp.values.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double a = dbl.values[2 * k], b = dbl.values[2 * k + 1];
        if (std::fabs(b - a) > 1e-8 * scale)
            throw NumericError("eig_hermitian: doubled eigenvalues fail to pair");
        sp.values.push_back(0.5 * (a + b));
    }
    return sp;
}

// ---------------------------------------------------------------------------
// Small-matrix oracle: exact characteristic polynomial + Sturm bisection.
// ---------------------------------------------------------------------------

namespace {

using Poly = std::vector<long double>;  // coefficients, low order first

int degree(const Poly& p) {
    for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k)
        if (p[k] != 0.0L) return k;
    return -1;
}

Poly mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0L);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

void axpy(Poly& a, long double c, const Poly& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0L);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += c * b[i];
}

long double eval(const Poly& p, long double x) {
    long double r = 0.0L;
    for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k) r = r * x + p[k];
    return r;
}

Poly derivative(const Poly& p) {
    if (p.size() <= 1) return {0.0L};
    Poly r(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) r[k - 1] = static_cast<long double>(k) * p[k];
    return r;
}

// remainder of a / b, b nonzero
Poly rem(Poly a, const Poly& b) {
    const int db = degree(b);
    const long double lead = b[db];
    for (int da = degree(a); da >= db; da = degree(a)) {
        const long double c = a[da] / lead;
        for (int k = 0; k <= db; ++k) a[da - db + k] -= c * b[k];
        a[da] = 0.0L;  // force exact cancellation of the leading term
    }
    a.resize(db > 0 ? db : 1, 0.0L);
    return a;
}

void trim(Poly& p, long double ref) {
    const long double tol = ref * 1e-17L;
    for (auto& c : p)
        if (std::fabs(static_cast<double>(c)) < static_cast<double>(tol)) c = 0.0L;
}

// det(M - lambda I) via Laplace expansion over polynomial entries, memoized on
// the active column set.
Poly char_poly(const Mat& M) {
    const int n = M.n;
    std::vector<Poly> memo(1u << n);
    std::vector<bool> have(1u << n, false);
    // recursive lambda over (row = n - popcount(mask), mask of free columns)
    std::function<const Poly&(unsigned)> det = [&](unsigned mask) -> const Poly& {
        if (have[mask]) return memo[mask];
        const int r = n - __builtin_popcount(mask);
        Poly acc{0.0L};
        int sign = 1;
        for (int c = 0; c < n; ++c) {
            if (!(mask & (1u << c))) continue;
            Poly entry{static_cast<long double>(M(r, c))};
            if (r == c) entry = Poly{static_cast<long double>(M(r, c)), -1.0L};
            if (__builtin_popcount(mask) == 1) {
                acc = entry;
            } else {
                Poly sub = mul(entry, det(mask & ~(1u << c)));
                axpy(acc, static_cast<long double>(sign), sub);
            }
            sign = -sign;
        }
        memo[mask] = std::move(acc);
        have[mask] = true;
        return memo[mask];
    };
    return det((1u << n) - 1);
}

struct Sturm {
    std::vector<Poly> chain;

    explicit Sturm(const Poly& p) {
        long double ref = 0.0L;
        for (auto c : p) ref = std::max(ref, std::fabs(c));
        chain.push_back(p);
        chain.push_back(derivative(p));
        while (degree(chain.back()) > 0) {
            Poly r = rem(chain[chain.size() - 2], chain.back());
            trim(r, ref);
            for (auto& c : r) c = -c;
            if (degree(r) < 0) break;
            chain.push_back(std::move(r));
        }
    }

    // number of sign changes at x; N(a) - N(b) = #distinct roots in (a, b]
    int changes(long double x) const {
        int cnt = 0, prev = 0;
        for (const Poly& p : chain) {
            const long double v = eval(p, x);
            const int s = v > 0.0L ? 1 : (v < 0.0L ? -1 : 0);
            if (s != 0) {
                if (prev != 0 && s != prev) ++cnt;
                prev = s;
            }
        }
        return cnt;
    }

    // last nonzero chain element ~ gcd(p, p'); nontrivial iff p has repeated roots
    const Poly& gcd() const { return chain.back(); }
};

void isolate_roots(const Poly& p, long double lo, long double hi, long double tol,
                   std::vector<double>& out) {
    if (degree(p) < 1) return;
    Sturm st(p);
    struct Seg {
        long double a, b;
        int ca, cb;
    };
    std::vector<Seg> stack{{lo, hi, st.changes(lo), st.changes(hi)}};
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        const int k = s.ca - s.cb;
        if (k <= 0) continue;
        if (s.b - s.a < tol) {
            for (int i = 0; i < k; ++i) out.push_back(static_cast<double>(0.5L * (s.a + s.b)));
            continue;
        }
        const long double mid = 0.5L * (s.a + s.b);
        const int cm = st.changes(mid);
        stack.push_back({s.a, mid, s.ca, cm});
        stack.push_back({mid, s.b, cm, s.cb});
    }
    // repeated roots live in gcd(p, p'); recurse to recover multiplicities
    const Poly& g = st.gcd();
    if (degree(g) >= 1) isolate_roots(g, lo, hi, tol, out);
}

}  // namespace

Spectrum eig_oracle_small(const Mat& M) {
    const int n = M.n;
    if (n < 1 || n > 8) throw SizeError("eig_oracle_small: n must be in [1,8]");
    // Gershgorin bounds
    double lo = DBL_MAX, hi = -DBL_MAX;
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) r += std::fabs(M(i, j));
        lo = std::fmin(lo, M(i, i) - r);
        hi = std::fmax(hi, M(i, i) + r);
    }
    const double pad = 1e-8 * (1.0 + std::fmax(std::fabs(lo), std::fabs(hi)));
    Poly p = char_poly(M);
    std::vector<double> roots;
    const long double tol = 1e-14L * (1.0L + std::max(std::fabs(lo), std::fabs(hi)));
    isolate_roots(p, lo - pad, hi + pad, tol, roots);
    if (static_cast<int>(roots.size()) != n)
        throw NumericError("eig_oracle_small: found " + std::to_string(roots.size()) +
                           " roots, expected " + std::to_string(n));
    std::sort(roots.begin(), roots.end());
    return Spectrum{std::move(roots)};
}

}  // namespace pertlab
