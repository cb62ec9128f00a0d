#include "pertlab/spectral_stats.hpp"

#include <algorithm>
#include <cmath>

#include "pertlab/errors.hpp"

namespace pertlab {

namespace {

struct KahanC {
    Complex sum{}, comp{};
    void add(Complex v) {
        const Complex y = v - comp;
        const Complex t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

void require_nonreal(Complex z, const char* who) {
    if (z.imag() == 0.0) throw DomainError(std::string(who) + ": z must be nonreal");
}

}  // namespace

SignedSpectralDiff make_diff(Spectrum base, Spectrum pert, double eps) {
    if (base.n() != pert.n()) throw SizeError("make_diff: spectra differ in length");
    return SignedSpectralDiff{std::move(base), std::move(pert), eps};
}

Complex stieltjes(const Spectrum& spec, Complex z) {
    require_nonreal(z, "stieltjes");
    KahanC acc;
    for (double lam : spec.values) acc.add(1.0 / (z - lam));
    return acc.sum / static_cast<double>(spec.n());
}

Complex delta_G(const SignedSpectralDiff& diff, Complex z) {
    return stieltjes(diff.pert, z) - stieltjes(diff.base, z);
}

double signed_cdf_diff(const SignedSpectralDiff& diff, double s) {
    const auto count = [s](const Spectrum& sp) {
        return std::upper_bound(sp.values.begin(), sp.values.end(), s) - sp.values.begin();
    };
    const double dc = static_cast<double>(count(diff.pert) - count(diff.base));
    if (dc == 0.0) return 0.0;  // well-defined even in the eps = 0 smoke case
    return dc / (diff.eps * diff.eps * diff.n());
}

Complex pair_test_function(const SignedSpectralDiff& diff, const TestFunction& phi) {
    KahanC acc;
    for (double lam : diff.pert.values) acc.add(phi(lam));
    for (double lam : diff.base.values) acc.add(-phi(lam));
    return acc.sum / static_cast<double>(diff.n());
}

ResolventTerms resolvent_terms(const std::vector<double>& diag, const Mat& X, double eps,
                               Complex z, bool with_D4) {
    require_nonreal(z, "resolvent_terms");
    const int n = X.n;
    std::vector<Complex> u(n);
    for (int i = 0; i < n; ++i) u[i] = 1.0 / (z - diag[i]);

    ResolventTerms t;
    t.z = z;

    KahanC accA;
    for (int i = 0; i < n; ++i) accA.add(X(i, i) * u[i] * u[i]);
    t.A = eps / n * accA.sum;

    KahanC accB;
    for (int i = 0; i < n; ++i) {
        const double* xi = X.data() + static_cast<std::size_t>(i) * n;
        Complex row{};
        for (int j = 0; j < n; ++j) row += xi[j] * xi[j] * u[j];
        accB.add(u[i] * u[i] * row);
    }
    t.B = eps * eps / n * accB.sum;

    // Y = R X, Z = Y^2; then C = (eps^3/n) sum_i u_i (Z Y)_{ii} and
    // D4 = (eps^4/n) sum_i u_i (Z Z)_{ii}, each O(n^2) past the one product.
    Mat P, Q, Zr, Zi;
    rowscale_split(u, X, P, Q);
    complex_square(P, Q, Zr, Zi);

    // Z^T, reused by the D4 trace and as the remainder's right-hand side
    Mat Zrt(n), Zit(n);
    const int tb = 64;
    for (int ib = 0; ib < n; ib += tb)
        for (int jb = 0; jb < n; jb += tb)
            for (int i = ib; i < std::min(ib + tb, n); ++i)
                for (int j = jb; j < std::min(jb + tb, n); ++j) {
                    Zrt(j, i) = Zr(i, j);
                    Zit(j, i) = Zi(i, j);
                }

    KahanC accC, accD4;
    for (int i = 0; i < n; ++i) {
        const double* zri = Zr.data() + static_cast<std::size_t>(i) * n;
        const double* zii = Zi.data() + static_cast<std::size_t>(i) * n;
        const double* zrt = Zrt.data() + static_cast<std::size_t>(i) * n;
        const double* zit = Zit.data() + static_cast<std::size_t>(i) * n;
        const double* xi = X.data() + static_cast<std::size_t>(i) * n;
        double cr = 0.0, ci = 0.0, dr = 0.0, di = 0.0;
        for (int j = 0; j < n; ++j) {
            // Y(j,i) = u_j X(j,i) = u_j X(i,j) by symmetry of X
            const double yr = u[j].real() * xi[j], yi = u[j].imag() * xi[j];
            cr += zri[j] * yr - zii[j] * yi;
            ci += zri[j] * yi + zii[j] * yr;
            if (with_D4) {
                dr += zri[j] * zrt[j] - zii[j] * zit[j];
                di += zri[j] * zit[j] + zii[j] * zrt[j];
            }
        }
        accC.add(u[i] * Complex(cr, ci));
        if (with_D4) accD4.add(u[i] * Complex(dr, di));
    }
    t.C = eps * eps * eps / n * accC.sum;
    if (with_D4) t.D4 = eps * eps * eps * eps / n * accD4.sum;

    // R_rem = (eps^4/n) Tr[Z Z R_eps] = (eps^4/n) sum_ij Z_ij W_ij for
    // W = R_eps Z^T, one factorized solve against z - D^eps.
    Mat Wr, Wi;
    shifted_sym_solve_transposed(diag, X, eps, z, Zrt, Zit, Wr, Wi);
    KahanC accR;
    for (int i = 0; i < n; ++i) {
        const std::size_t off = static_cast<std::size_t>(i) * n;
        double rr = 0.0, ri = 0.0;
        for (int j = 0; j < n; ++j) {
            rr += Zr.a[off + j] * Wr.a[off + j] - Zi.a[off + j] * Wi.a[off + j];
            ri += Zr.a[off + j] * Wi.a[off + j] + Zi.a[off + j] * Wr.a[off + j];
        }
        accR.add(Complex(rr, ri));
    }
    t.R = eps * eps * eps * eps / n * accR.sum;
    return t;
}

ResolventTerms resolvent_terms(const std::vector<double>& diag, const CMat& X, double eps,
                               Complex z, bool with_D4) {
    require_nonreal(z, "resolvent_terms");
    const int n = X.n;
    std::vector<Complex> u(n);
    for (int i = 0; i < n; ++i) u[i] = 1.0 / (z - diag[i]);

    ResolventTerms t;
    t.z = z;

    KahanC accA;
    for (int i = 0; i < n; ++i) accA.add(X(i, i) * u[i] * u[i]);
    t.A = eps / n * accA.sum;

    KahanC accB;
    for (int i = 0; i < n; ++i) {
        Complex row{};
        for (int j = 0; j < n; ++j) row += std::norm(X(i, j)) * u[j];
        accB.add(u[i] * u[i] * row);
    }
    t.B = eps * eps / n * accB.sum;

    CMat Y(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Y(i, j) = u[i] * X(i, j);
    CMat Z(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const Complex yik = Y(i, k);
            if (yik == Complex{}) continue;
            for (int j = 0; j < n; ++j) Z(i, j) += yik * Y(k, j);
        }

    KahanC accC, accD4;
    for (int i = 0; i < n; ++i) {
        Complex sc{}, sd{};
        for (int j = 0; j < n; ++j) {
            sc += Z(i, j) * Y(j, i);
            if (with_D4) sd += Z(i, j) * Z(j, i);
        }
        accC.add(u[i] * sc);
        if (with_D4) accD4.add(u[i] * sd);
    }
    t.C = eps * eps * eps / n * accC.sum;
    if (with_D4) t.D4 = eps * eps * eps * eps / n * accD4.sum;

    // W' = Z (z - D^eps)^{-1}; R_rem = (eps^4/n) Tr[Z W'].
    CMat Aful(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) Aful(i, j) = -eps * X(i, j);
        Aful(i, i) += z - diag[i];
    }
    CMat W = right_solve(Z, Aful);
    KahanC accR;
    for (int i = 0; i < n; ++i) {
        Complex s{};
        for (int j = 0; j < n; ++j) s += Z(i, j) * W(j, i);
        accR.add(s);
    }
    t.R = eps * eps * eps * eps / n * accR.sum;
    return t;
}

}  // namespace pertlab
