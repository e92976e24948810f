#pragma once

#include <vector>

#include "pelab/density.hpp"
#include "pelab/rng.hpp"

namespace pelab {

/// Kronecker product; a's qubits come first. Checks the dimension cap.
Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
PureStateVector tensor(const PureStateVector& a, const PureStateVector& b);

/// rho^{(x) n}.
DensityMatrix tensor_power(const DensityMatrix& rho, int n);

enum class Side { A, B };

/// Traces out the complement of `keep`.
DensityMatrix partial_trace(const DensityMatrix& rho, const Bipartition& part, Side keep);

/// Traces out an explicit qubit subset, keeping the remaining qubits in
/// their original relative order.
DensityMatrix partial_trace_out(const DensityMatrix& rho, const std::vector<int>& traced);

/// Transpose of the B-side indices. Result is Hermitian with unit trace but
/// possibly not PSD, hence returned as a raw matrix.
Matrix partial_transpose(const Matrix& rho, const Bipartition& part);

/// Reorders qubits: new_order[j] = old position of the qubit now at j.
DensityMatrix permute_qubits(const DensityMatrix& rho, const std::vector<int>& new_order);

/// Permutation matrix P with P|x_old> = |x_new> for the same reordering
/// convention as permute_qubits.
Matrix qubit_permutation_matrix(const std::vector<int>& new_order, int total_qubits);

/// Embeds a 2^k-dim unitary acting on `targets` (in list order) into the
/// full 2^n space.
Matrix expand_unitary(const Matrix& u, const std::vector<int>& targets, int total_qubits);

/// In-place m <- Op m (resp. m <- m Op) where Op is `op` expanded over
/// `targets`. O(4^n * 2^k) instead of materializing the full operator.
void apply_local_left(Matrix& m, const Matrix& op, const std::vector<int>& targets,
                      int total_qubits);
void apply_local_right(Matrix& m, const Matrix& op, const std::vector<int>& targets,
                       int total_qubits);

/// Checks max |U U^dag - I| <= tol.unitary; throws contract_error otherwise.
void require_unitary(const Matrix& u, const Tolerances& tol = {});

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                            const std::vector<int>& targets, const Tolerances& tol = {});
PureStateVector apply_unitary(const PureStateVector& v, const Matrix& u,
                              const std::vector<int>& targets, const Tolerances& tol = {});

/// Computational-basis outcome distribution over the listed qubits
/// (outcome bits in list order, first listed qubit most significant).
std::vector<double> measure_computational(const DensityMatrix& rho, const std::vector<int>& qubits);

/// One sampled outcome from measure_computational's distribution.
std::int64_t sample_computational(const DensityMatrix& rho, const std::vector<int>& qubits,
                                  CounterRng& rng);

}  // namespace pelab
