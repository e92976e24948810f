#pragma once

#include <optional>

#include "pelab/efi.hpp"

namespace pelab {

/// The low-entanglement state psi and its entangled reference phi, built on
/// registers [Bell-A qubit 0, Bell-B qubit 1, EFI register 2..n+1]. The cut
/// gives {Bell-A, EFI} to A and {Bell-B} to B.
struct FamilyPair {
    DensityMatrix psi;
    DensityMatrix phi;
    Bipartition cut;
    int lambda = 0;
    EfiInstance source;

    int total_qubits() const { return psi.qubits(); }
};

/// psi = 1/4 (|Phi+><Phi+| + |Phi-><Phi-|) (x) (rho0 + rho1).
DensityMatrix build_psi(const EfiInstance& inst);

/// phi = 1/2 (|Phi+><Phi+| (x) rho0 + |Phi-><Phi-| (x) rho1).
DensityMatrix build_phi(const EfiInstance& inst);

Bipartition family_cut(int efi_qubits);

FamilyPair build_pair(const EfiInstance& inst);

/// Variant where both parties hold an element with the same bit b
/// (rho_b (x) rho_b); off by default, see build_pair_two_sided.
DensityMatrix build_psi_two_sided(const EfiInstance& inst);
DensityMatrix build_phi_two_sided(const EfiInstance& inst);
FamilyPair build_pair_two_sided(const EfiInstance& inst);

/// Base pair plus the coherent key: the key state k0 = Tr_E |chi_0><chi_0|
/// and the generator's unitary part for b = 0.
struct KeyedFamily {
    FamilyPair base;
    DensityMatrix key_state;
    Matrix u0;
    PureStateVector chi0;
    int e_qubit_count = 0;
    int k_qubit_count = 0;
};

KeyedFamily build_keyed(const EfiInstance& inst);

/// q-fold tensor of the pair. Materialized while the dimension stays within
/// the cap; above it only analytic per-copy aggregates are available.
struct AmplifiedFamily {
    int q = 1;
    FamilyPair base;
    std::vector<int> component_lambdas;    // lambda index per copy
    std::optional<DensityMatrix> psi_bar;  // engaged iff materialized
    std::optional<DensityMatrix> phi_bar;
    bool analytic = false;

    // Per-copy diagnostics aggregated by exact tensor rules.
    double log_negativity_phi_bar = 0.0;   // q * per-copy value
    double fidelity_psi_phi_bar = 0.0;     // per-copy fidelity ^ q
    double td_lower = 0.0;                 // bounds on TD(psi_bar, phi_bar)
    double td_upper = 0.0;
    std::optional<double> td_exact;        // engaged iff materialized

    Bipartition cut;  // joint cut: all per-copy A registers vs all B registers
};

AmplifiedFamily amplify(const FamilyPair& pair, int q);

}  // namespace pelab
