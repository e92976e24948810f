#include "pelab/density.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace pelab {

PureStateVector::PureStateVector(Vector amplitudes, const Tolerances& tol)
    : amps_(std::move(amplitudes)) {
    qubits_ = qubit_count_for_dim(amps_.size());
    const double n = amps_.norm();
    if (std::abs(n - 1.0) > 1e-8) {
        throw contract_error("pure state not normalized: |v| = " + std::to_string(n));
    }
    (void)tol;
}

DensityMatrix DensityMatrix::make(Matrix m, const Tolerances& tol) {
    if (m.rows() != m.cols()) throw contract_error("density matrix must be square");
    const int q = qubit_count_for_dim(m.rows());
    DensityMatrix dm(std::move(m), q);
    dm.validate(tol);
    return dm;
}

DensityMatrix DensityMatrix::unchecked(Matrix m) {
    const int q = qubit_count_for_dim(m.rows());
    return DensityMatrix(std::move(m), q);
}

DensityMatrix DensityMatrix::from_pure(const PureStateVector& v) {
    return from_pure(v.amplitudes());
}

DensityMatrix DensityMatrix::from_pure(const Vector& amplitudes) {
    Matrix m = amplitudes * amplitudes.adjoint();
    return unchecked(std::move(m));
}

DensityMatrix DensityMatrix::basis_state(int qubits, std::int64_t index) {
    const std::int64_t d = std::int64_t{1} << qubits;
    if (index < 0 || index >= d) throw contract_error("basis index out of range");
    Matrix m = Matrix::Zero(d, d);
    m(index, index) = 1.0;
    return unchecked(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int qubits) {
    const std::int64_t d = std::int64_t{1} << qubits;
    Matrix m = Matrix::Identity(d, d) / static_cast<double>(d);
    return unchecked(std::move(m));
}

double DensityMatrix::hermiticity_defect() const {
    return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(mat_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate(const Tolerances& tol) const {
    if (hermiticity_defect() > tol.hermitian) {
        throw contract_error("density matrix not Hermitian within tolerance");
    }
    const double tr = mat_.trace().real();
    if (std::abs(tr - 1.0) > tol.trace || std::abs(mat_.trace().imag()) > tol.trace) {
        throw contract_error("density matrix trace " + std::to_string(tr) + " != 1");
    }
    if (min_eigenvalue() < -tol.psd) {
        throw contract_error("density matrix has eigenvalue below -tol_psd");
    }
}

bool DensityMatrix::is_valid(const Tolerances& tol) const {
    try {
        validate(tol);
        return true;
    } catch (const contract_error&) {
        return false;
    }
}

void Bipartition::validate(int n_qubits) const {
    std::vector<char> seen(static_cast<size_t>(n_qubits), 0);
    auto mark = [&](const std::vector<int>& qs) {
        for (int q : qs) {
            if (q < 0 || q >= n_qubits) throw contract_error("bipartition index out of range");
            if (seen[static_cast<size_t>(q)]) throw contract_error("bipartition indices overlap");
            seen[static_cast<size_t>(q)] = 1;
        }
    };
    mark(qubits_a);
    mark(qubits_b);
    for (char s : seen) {
        if (!s) throw contract_error("bipartition does not cover all qubits");
    }
}

Bipartition Bipartition::leading(int a_qubits, int n_qubits) {
    Bipartition p;
    for (int q = 0; q < a_qubits; ++q) p.qubits_a.push_back(q);
    for (int q = a_qubits; q < n_qubits; ++q) p.qubits_b.push_back(q);
    return p;
}

PureStateVector bell_state(BellKind which) {
    const double s = 1.0 / std::sqrt(2.0);
    Vector v = Vector::Zero(4);
    switch (which) {
        case BellKind::PhiPlus:  v(0) = s; v(3) = s; break;
        case BellKind::PhiMinus: v(0) = s; v(3) = -s; break;
        case BellKind::PsiPlus:  v(1) = s; v(2) = s; break;
        case BellKind::PsiMinus: v(1) = s; v(2) = -s; break;
    }
    return PureStateVector(std::move(v));
}

DensityMatrix bell_projector(BellKind which) {
    return DensityMatrix::from_pure(bell_state(which));
}

DensityMatrix bell_phi_mixture() {
    Matrix m = 0.5 * (bell_projector(BellKind::PhiPlus).matrix() +
                      bell_projector(BellKind::PhiMinus).matrix());
    return DensityMatrix::unchecked(std::move(m));
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix m(2, 2);
    m << s, s, s, -s;
    return m;
}

Matrix identity_matrix(std::int64_t dim) { return Matrix::Identity(dim, dim); }

}  // namespace pelab
