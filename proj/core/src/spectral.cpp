#include "pelab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace pelab {

namespace {

void require_hermitian(const Matrix& m, const Tolerances& tol, const char* who) {
    if (m.rows() != m.cols()) throw contract_error(std::string(who) + ": matrix must be square");
    const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (defect > tol.hermitian) {
        throw contract_error(std::string(who) + ": input not Hermitian, defect " +
                             std::to_string(defect));
    }
}

bool is_exactly_diagonal(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
        }
    }
    return true;
}

}  // namespace

Matrix SpectralDecomposition::reconstruct() const {
    if (projectors.empty()) return Matrix();
    Matrix out = Matrix::Zero(projectors.front().rows(), projectors.front().cols());
    for (size_t g = 0; g < projectors.size(); ++g) {
        out += eigenvalues[g] * projectors[g];
    }
    return out;
}

Matrix SpectralDecomposition::nonnegative_projector(std::int64_t dim) const {
    Matrix out = Matrix::Zero(dim, dim);
    for (size_t g = 0; g < projectors.size(); ++g) {
        if (eigenvalues[g] >= 0.0) out += projectors[g];
    }
    return out;
}

SpectralDecomposition spectral_decompose(const Matrix& herm, const Tolerances& tol) {
    require_hermitian(herm, tol, "spectral_decompose");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
    if (solver.info() != Eigen::Success) {
        throw contract_error("spectral_decompose: eigensolver did not converge");
    }
    const RealVector& evals = solver.eigenvalues();  // ascending
    const Matrix& evecs = solver.eigenvectors();
    const Eigen::Index d = evals.size();

    SpectralDecomposition out;
    // Walk from the top so eigenvalue groups come out descending.
    Eigen::Index i = d - 1;
    while (i >= 0) {
        Eigen::Index j = i;
        while (j > 0 && std::abs(evals(j - 1) - evals(i)) <= tol.degeneracy) --j;
        const Eigen::Index count = i - j + 1;
        Matrix proj = Matrix::Zero(d, d);
        double value = 0.0;
        for (Eigen::Index c = j; c <= i; ++c) {
            proj += evecs.col(c) * evecs.col(c).adjoint();
            value += evals(c);
        }
        out.eigenvalues.push_back(value / static_cast<double>(count));
        out.multiplicities.push_back(static_cast<int>(count));
        out.projectors.push_back(std::move(proj));
        i = j - 1;
    }
    return out;
}

RealVector hermitian_eigenvalues(const Matrix& herm, const Tolerances& tol) {
    require_hermitian(herm, tol, "hermitian_eigenvalues");
    if (is_exactly_diagonal(herm)) {
        RealVector evals(herm.rows());
        for (Eigen::Index i = 0; i < herm.rows(); ++i) evals(i) = herm(i, i).real();
        std::sort(evals.data(), evals.data() + evals.size());
        return evals;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw contract_error("hermitian_eigenvalues: eigensolver did not converge");
    }
    return solver.eigenvalues();
}

double trace_distance(const Matrix& rho, const Matrix& sigma, const Tolerances& tol) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw contract_error("trace_distance: dimension mismatch");
    }
    const RealVector evals = hermitian_eigenvalues(rho - sigma, tol);
    return 0.5 * evals.cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    return trace_distance(rho.matrix(), sigma.matrix());
}

Matrix psd_sqrt(const Matrix& herm, const Tolerances& tol) {
    require_hermitian(herm, tol, "psd_sqrt");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
    if (solver.info() != Eigen::Success) {
        throw contract_error("psd_sqrt: eigensolver did not converge");
    }
    RealVector evals = solver.eigenvalues();
    if (evals.minCoeff() < -tol.psd) {
        throw contract_error("psd_sqrt: input has eigenvalue " +
                             std::to_string(evals.minCoeff()) + " below -tol_psd");
    }
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (evals(i) < 0.0) evals(i) = 0.0;  // clamps numeric noise in [-tol_psd, 0)
    }
    return solver.eigenvectors() * evals.cwiseSqrt().asDiagonal() *
           solver.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw contract_error("fidelity: dimension mismatch");
    // For a pure argument the formula collapses to Tr(rho sigma), which is
    // far better conditioned than the sqrt route.
    if (sigma.purity() >= 1.0 - 1e-12) {
        return std::clamp((rho.matrix() * sigma.matrix()).trace().real(), 0.0, 1.0);
    }
    if (rho.purity() >= 1.0 - 1e-12) {
        return std::clamp((sigma.matrix() * rho.matrix()).trace().real(), 0.0, 1.0);
    }
    const Matrix root = psd_sqrt(rho.matrix());
    Matrix inner = root * sigma.matrix() * root;
    inner = 0.5 * (inner + inner.adjoint().eval());  // re-Hermitianize numeric noise
    Eigen::SelfAdjointEigenSolver<Matrix> solver(inner, Eigen::EigenvaluesOnly);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double v = solver.eigenvalues()(i);
        // sqrt amplifies eigensolve noise near zero; stay above the floor
        if (v > 1e-15) sum += std::sqrt(v);
    }
    const double f = sum * sum;
    return std::min(1.0, f);
}

}  // namespace pelab
