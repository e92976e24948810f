#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pelab/density.hpp"

namespace pelab {

enum class EfiFamilyKind { orthogonal, angle, keyed_subset, custom };

std::string to_string(EfiFamilyKind kind);
EfiFamilyKind efi_family_from_string(const std::string& name);

/// Parameters of a state-pair generator: the security/size parameter lambda,
/// the element width n(lambda) in qubits, and per-family knobs.
struct EfiSpec {
    EfiFamilyKind family = EfiFamilyKind::orthogonal;
    int lambda = 2;
    int n_qubits = 1;
    double theta = 0.0;           // angle family, radians in (0, pi/2]
    int register_qubits = 0;      // keyed_subset key-register width; 0 = derived
    std::uint64_t seed = 0;       // keyed_subset permutation seed
    std::string rho0_path;        // custom family
    std::string rho1_path;

    void validate() const;

    /// Trace-distance lower bound this family promises (custom promises 0).
    double declared_td_bound() const;

    /// "transparent" for families whose bit is easy to read out,
    /// "hard-for-restricted-distinguishers" for the keyed mixtures. Honest
    /// labeling: none of the built-ins is computationally hiding.
    std::string hardness_tag() const;

    bool supports_purification() const { return family != EfiFamilyKind::custom; }

    /// Width of the key register K in the purification.
    int key_qubits() const;

    /// Recorded size bound for the generator circuit (efficiency witness for
    /// certificates; a count, not an asymptotic claim).
    std::int64_t generator_gate_bound() const;
};

/// Coherent output |chi_b> of the generator's unitary part, with the E:K
/// register split. Tracing out K yields the generated element; tracing out E
/// yields the key state.
struct PurifiedState {
    PureStateVector chi;
    std::vector<int> e_qubits;
    std::vector<int> k_qubits;
};

struct Purification {
    Matrix u0;  // unitary part for b = 0, maps |0...0> to |chi_0>
    Matrix u1;
    std::vector<int> e_qubits;
    std::vector<int> k_qubits;
};

struct EfiInstance {
    DensityMatrix rho0;
    DensityMatrix rho1;
    std::optional<Purification> purification;
    EfiSpec spec;

    const DensityMatrix& element(int b) const { return b ? rho1 : rho0; }
};

/// Deterministically generates element b of the pair. Mixedness lives in the
/// density matrix itself; no sampling happens here.
DensityMatrix generate(const EfiSpec& spec, int b);

/// Coherent generation; throws capability_error for families without a
/// purification (custom).
PurifiedState purified_generate(const EfiSpec& spec, int b);

EfiInstance make_instance(const EfiSpec& spec);

/// Tensor-power amplification: rho_b -> rho_b^{(x) n}. Purification is kept
/// when its dimension stays within the cap, dropped otherwise.
EfiInstance amplify_statistical(const EfiInstance& inst, int n);

/// 1 - exp(-n * td / 2), the tensor-power trace-distance lower bound.
double td_amplification_bound(double td_single, int n);

struct FarnessReport {
    double td = 0.0;
    double bound_1_minus_2_pow_minus_lambda = 0.0;
    bool satisfied = false;
};

FarnessReport farness_report(const EfiInstance& inst);

/// Unitary whose first column is `target` (a reflection for real targets;
/// exact identity when target is |0...0>).
Matrix state_preparation_unitary(const Vector& target);

}  // namespace pelab
