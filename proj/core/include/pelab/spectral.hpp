#pragma once

#include <vector>

#include "pelab/density.hpp"

namespace pelab {

/// Eigenvalue groups of a Hermitian matrix, sorted descending. Eigenvalues
/// closer than tol.degeneracy are merged into one group whose projector spans
/// the whole subspace, which makes the decomposition reproducible even under
/// degeneracy (the projector of a subspace is basis-independent).
struct SpectralDecomposition {
    std::vector<double> eigenvalues;   // one per group, descending
    std::vector<int> multiplicities;   // group sizes
    std::vector<Matrix> projectors;    // rank = multiplicity

    Matrix reconstruct() const;

    /// Projector onto the span of all groups with eigenvalue >= 0.
    Matrix nonnegative_projector(std::int64_t dim) const;
};

/// Throws contract_error if the input is not Hermitian within tol.hermitian.
SpectralDecomposition spectral_decompose(const Matrix& herm, const Tolerances& tol = {});

/// All eigenvalues of a Hermitian matrix, ascending. Diagonal matrices take a
/// fast path (their diagonal is the exact spectrum).
RealVector hermitian_eigenvalues(const Matrix& herm, const Tolerances& tol = {});

/// (1/2) sum |lambda_i| over the spectrum of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const Matrix& rho, const Matrix& sigma, const Tolerances& tol = {});

/// Uhlmann fidelity Tr(sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Hermitian PSD square root via eigendecomposition; eigenvalues in
/// [-tol.psd, 0) are clamped to zero.
Matrix psd_sqrt(const Matrix& herm, const Tolerances& tol = {});

}  // namespace pelab
