#pragma once

#include <vector>

#include "pertlab/dense.hpp"

namespace pertlab {

/// Sorted eigenvalues of a Hermitian matrix.
struct Spectrum {
    std::vector<double> values;  // ascending

    int n() const { return static_cast<int>(values.size()); }
};

/// Eigenvalues of a diagonal matrix: just the sorted entries.
Spectrum spectrum_from_diagonal(std::vector<double> d);

/// Eigenvalues of a real symmetric matrix by Householder tridiagonalization
/// followed by implicit-shift QL.  The input is consumed (reduced in place);
/// callers move large matrices in.  Verifies the trace and Frobenius
/// invariants of the result.
Spectrum eig_sym(Mat M);

/// Eigenvalues of a complex Hermitian matrix via the real embedding
/// [[A, -B], [B, A]] of M = A + iB; each eigenvalue of M appears twice in the
/// embedding and the doubled spectrum is collapsed pairwise.
Spectrum eig_hermitian(const CMat& M);

/// Independent small-matrix oracle (n <= 8): roots of the characteristic
/// polynomial, expanded exactly by cofactors over degree-1 polynomial entries,
/// located by bisection on Sturm-sequence sign changes.  Shares no code with
/// eig_sym.
Spectrum eig_oracle_small(const Mat& M);

}  // namespace pertlab
