#include "pertlab/dense.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <cmath>
#include <cstdlib>

#include "pertlab/errors.hpp"

namespace pertlab {

namespace {
// Trial-level threads supply all the parallelism we want; nested BLAS threads
// just oversubscribe the cores.
struct BlasSingleThread {
    BlasSingleThread() { openblas_set_num_threads(1); }
} blas_single_thread_init;
}  // namespace

void gemm(const Mat& A, const Mat& B, Mat& C) {
    const int n = A.n;
    if (C.n != n) C = Mat(n);
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, n, n, n, 1.0, A.data(), n, B.data(),
                n, 0.0, C.data(), n);
}

void rowscale_split(const std::vector<Complex>& u, const Mat& X, Mat& P, Mat& Q) {
    const int n = X.n;
    if (P.n != n) P = Mat(n);
    if (Q.n != n) Q = Mat(n);
    for (int i = 0; i < n; ++i) {
        const double ur = u[i].real(), ui = u[i].imag();
        const double* xi = X.data() + static_cast<std::size_t>(i) * n;
        double* pi = P.data() + static_cast<std::size_t>(i) * n;
        double* qi = Q.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            pi[j] = ur * xi[j];
            qi[j] = ui * xi[j];
        }
    }
}

void complex_square(const Mat& P, const Mat& Q, Mat& Zr, Mat& Zi) {
    const int n = P.n;
    Mat T1(n), T2(n), S(n);
    gemm(P, P, T1);  // P^2
    gemm(Q, Q, T2);  // Q^2
    for (std::size_t k = 0; k < S.a.size(); ++k) S.a[k] = P.a[k] + Q.a[k];
    Mat T3(n);
    gemm(S, S, T3);  // (P+Q)^2 = P^2 + PQ + QP + Q^2
    if (Zr.n != n) Zr = Mat(n);
    if (Zi.n != n) Zi = Mat(n);
    for (std::size_t k = 0; k < T1.a.size(); ++k) {
        Zr.a[k] = T1.a[k] - T2.a[k];
        Zi.a[k] = T3.a[k] - T1.a[k] - T2.a[k];
    }
}

void shifted_sym_solve_transposed(const std::vector<double>& d, const Mat& X, double s,
                                  Complex z, const Mat& Br, const Mat& Bi, Mat& Wr, Mat& Wi) {
    const int n = X.n;
    const double y = z.imag();
    if (y == 0.0) throw DomainError("shifted_sym_solve: z must be nonreal");

    // S = Re z - (diag(d) + s X)
    Mat S(n);
    for (int i = 0; i < n; ++i) {
        const double* xi = X.data() + static_cast<std::size_t>(i) * n;
        double* si = S.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) si[j] = -s * xi[j];
        si[i] += z.real() - d[i];
    }

    // M = S^2 + y^2 I, SPD
    Mat M(n);
    cblas_dsyrk(CblasRowMajor, CblasLower, CblasNoTrans, n, n, 1.0, S.data(), n, 0.0, M.data(),
                n);
    for (int i = 0; i < n; ++i) M(i, i) += y * y;

    int info = LAPACKE_dpotrf(LAPACK_ROW_MAJOR, 'L', n, M.data(), n);
    if (info != 0) throw NumericError("shifted_sym_solve: Cholesky failed, info=" + std::to_string(info));

    // V = M^{-1} B, both parts at once
    Mat Vr = Br, Vi = Bi;
    info = LAPACKE_dpotrs(LAPACK_ROW_MAJOR, 'L', n, n, M.data(), n, Vr.data(), n);
    if (info == 0) info = LAPACKE_dpotrs(LAPACK_ROW_MAJOR, 'L', n, n, M.data(), n, Vi.data(), n);
    if (info != 0) throw NumericError("shifted_sym_solve: triangular solve failed");

    // W = (S - iy) V
    Mat SVr(n), SVi(n);
    gemm(S, Vr, SVr);
    gemm(S, Vi, SVi);
    if (Wr.n != n) Wr = Mat(n);
    if (Wi.n != n) Wi = Mat(n);
    for (std::size_t k = 0; k < SVr.a.size(); ++k) {
        Wr.a[k] = SVr.a[k] + y * Vi.a[k];
        Wi.a[k] = SVi.a[k] - y * Vr.a[k];
    }
}

CMat right_solve(const CMat& B, const CMat& A) {
    const int n = A.n;
    // X A = B  <=>  A^T X^T = B^T; LU with partial pivoting on A^T.
    CMat lu(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lu(i, j) = A(j, i);
    std::vector<int> piv(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(lu(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                p = i;
            }
        if (best == 0.0) throw NumericError("right_solve: singular matrix");
        piv[k] = p;
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
        const Complex inv = 1.0 / lu(k, k);
        for (int i = k + 1; i < n; ++i) {
            const Complex m = lu(i, k) * inv;
            lu(i, k) = m;
            for (int j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
        }
    }
    // Solve A^T Y = B^T column by column (columns of Y = rows of X).
    CMat Xo(n);
    std::vector<Complex> col(n);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) col[i] = B(c, i);  // c-th row of B = c-th column of B^T
        for (int k = 0; k < n; ++k) {
            if (piv[k] != k) std::swap(col[k], col[piv[k]]);
            for (int i = k + 1; i < n; ++i) col[i] -= lu(i, k) * col[k];
        }
        for (int k = n - 1; k >= 0; --k) {
            for (int j = k + 1; j < n; ++j) col[k] -= lu(k, j) * col[j];
            col[k] /= lu(k, k);
        }
        for (int i = 0; i < n; ++i) Xo(c, i) = col[i];
    }
    return Xo;
}

}  // namespace pertlab
