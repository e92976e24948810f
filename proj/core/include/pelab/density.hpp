#pragma once

#include <vector>

#include "pelab/types.hpp"

namespace pelab {

/// Qubit convention: qubit 0 is the leftmost (most significant) position of
/// a basis ket, so |q0 q1 ... q_{n-1}> has index sum(q_i * 2^(n-1-i)).
/// tensor(a, b) places a's qubits before b's.

class PureStateVector {
public:
    /// Empty placeholder (dim 0); any real use requires amplitudes.
    PureStateVector() : qubits_(0) {}
    PureStateVector(Vector amplitudes, const Tolerances& tol = {});

    std::int64_t dim() const { return amps_.size(); }
    int qubits() const { return qubits_; }
    const Vector& amplitudes() const { return amps_; }

    double norm() const { return amps_.norm(); }

private:
    Vector amps_;
    int qubits_;
};

class DensityMatrix {
public:
    /// Empty placeholder (dim 0); fails validation until assigned.
    DensityMatrix() : qubits_(0) {}

    /// Validating factory: checks Hermiticity, unit trace, and positive
    /// semi-definiteness within tolerances; throws contract_error otherwise.
    static DensityMatrix make(Matrix m, const Tolerances& tol = {});

    /// Constructs without validating. For operations that preserve the
    /// invariants by construction (tensor, partial trace, unitary
    /// conjugation, convex mixtures of valid states).
    static DensityMatrix unchecked(Matrix m);

    static DensityMatrix from_pure(const PureStateVector& v);
    static DensityMatrix from_pure(const Vector& amplitudes);

    /// |index><index| on `qubits` qubits.
    static DensityMatrix basis_state(int qubits, std::int64_t index);

    /// I / 2^qubits.
    static DensityMatrix maximally_mixed(int qubits);

    std::int64_t dim() const { return mat_.rows(); }
    int qubits() const { return qubits_; }
    const Matrix& matrix() const { return mat_; }

    double trace_real() const { return mat_.trace().real(); }

    /// Re-checks the type invariants; throws contract_error on failure.
    void validate(const Tolerances& tol = {}) const;
    bool is_valid(const Tolerances& tol = {}) const;

    /// Largest absolute deviation from Hermiticity, max_ij |M_ij - conj(M_ji)|.
    double hermiticity_defect() const;

    /// Smallest eigenvalue (exact eigensolve).
    double min_eigenvalue() const;

    /// Tr(rho^2); equals the squared Frobenius norm for Hermitian matrices.
    double purity() const { return mat_.squaredNorm(); }

private:
    DensityMatrix(Matrix m, int qubits) : mat_(std::move(m)), qubits_(qubits) {}

    Matrix mat_;
    int qubits_;
};

/// Ordered split of qubit indices into the two parties' registers.
struct Bipartition {
    std::vector<int> qubits_a;
    std::vector<int> qubits_b;

    int total_qubits() const { return static_cast<int>(qubits_a.size() + qubits_b.size()); }

    /// Throws contract_error unless qubits_a and qubits_b are disjoint and
    /// together cover exactly {0, ..., n_qubits-1}.
    void validate(int n_qubits) const;

    /// A holds the first `a_qubits` positions, B the rest.
    static Bipartition leading(int a_qubits, int n_qubits);
};

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

PureStateVector bell_state(BellKind which);

/// |Phi^+><Phi^+| projector and friends as 4x4 density matrices.
DensityMatrix bell_projector(BellKind which);

/// Uniform mixture of |Phi+><Phi+| and |Phi-><Phi-|; equals the classically
/// correlated state (|00><00| + |11><11|) / 2.
DensityMatrix bell_phi_mixture();

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix hadamard();
Matrix identity_matrix(std::int64_t dim);

}  // namespace pelab
