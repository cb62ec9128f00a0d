#pragma once

#include <complex>
#include <vector>

namespace pertlab {

using Complex = std::complex<double>;

/// Dense square real matrix, row-major.
struct Mat {
    int n = 0;
    std::vector<double> a;

    Mat() = default;
    explicit Mat(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    double* data() { return a.data(); }
    const double* data() const { return a.data(); }
    bool empty() const { return n == 0; }
};

/// Dense square complex matrix, row-major.
struct CMat {
    int n = 0;
    std::vector<Complex> a;

    CMat() = default;
    explicit CMat(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, Complex(0.0, 0.0)) {}

    Complex& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    Complex operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    Complex* data() { return a.data(); }
    const Complex* data() const { return a.data(); }
    bool empty() const { return n == 0; }
};

// C = A * B (real, square).  BLAS-backed.
void gemm(const Mat& A, const Mat& B, Mat& C);

// Y = P + iQ given row scales u: Y(i,j) = u_i * X(i,j).
void rowscale_split(const std::vector<Complex>& u, const Mat& X, Mat& P, Mat& Q);

// Z = Y^2 for Y = P + iQ, using three real multiplications.
void complex_square(const Mat& P, const Mat& Q, Mat& Zr, Mat& Zi);

/// Solves (z - H) W = B^T for real symmetric H (given as H = diag(d) + s*X) and
/// nonreal z, returning W row-major.  Uses the splitting
/// (S + iy)^{-1} = (S - iy)(S^2 + y^2)^{-1}, S = Re z - H, which needs only one
/// SPD factorization.  B is passed as (Br, Bi).
void shifted_sym_solve_transposed(const std::vector<double>& d, const Mat& X, double s,
                                  Complex z, const Mat& Br, const Mat& Bi, Mat& Wr, Mat& Wi);

// Small-n complex LU solve: X A = B  (i.e. right division), A general complex.
// Overwrites nothing; intended for n up to a few hundred.
CMat right_solve(const CMat& B, const CMat& A);

}  // namespace pertlab
