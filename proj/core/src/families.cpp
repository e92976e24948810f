#include "pelab/families.hpp"

#include <cmath>

#include "pelab/entdiag.hpp"
#include "pelab/ops.hpp"
#include "pelab/spectral.hpp"

namespace pelab {

DensityMatrix build_psi(const EfiInstance& inst) {
    const Matrix efi_mix = 0.5 * (inst.rho0.matrix() + inst.rho1.matrix());
    check_dim_cap(4 * efi_mix.rows(), "build_psi");
    return DensityMatrix::unchecked(kron(bell_phi_mixture().matrix(), efi_mix));
}

DensityMatrix build_phi(const EfiInstance& inst) {
    check_dim_cap(4 * inst.rho0.dim(), "build_phi");
    const Matrix plus = kron(bell_projector(BellKind::PhiPlus).matrix(), inst.rho0.matrix());
    const Matrix minus = kron(bell_projector(BellKind::PhiMinus).matrix(), inst.rho1.matrix());
    return DensityMatrix::unchecked(0.5 * (plus + minus));
}

Bipartition family_cut(int efi_qubits) {
    Bipartition cut;
    cut.qubits_a.push_back(0);
    for (int q = 2; q < efi_qubits + 2; ++q) cut.qubits_a.push_back(q);
    cut.qubits_b.push_back(1);
    return cut;
}

FamilyPair build_pair(const EfiInstance& inst) {
    FamilyPair pair{build_psi(inst), build_phi(inst), family_cut(inst.rho0.qubits()),
                    inst.spec.lambda, inst};
    return pair;
}

DensityMatrix build_psi_two_sided(const EfiInstance& inst) {
    // Correlated elements on both sides: 1/4 (Phi+ + Phi-) (x) (rho0 rho0 + rho1 rho1).
    const Matrix pair_mix = 0.5 * (kron(inst.rho0.matrix(), inst.rho0.matrix()) +
                                   kron(inst.rho1.matrix(), inst.rho1.matrix()));
    check_dim_cap(4 * pair_mix.rows(), "build_psi_two_sided");
    return DensityMatrix::unchecked(kron(bell_phi_mixture().matrix(), pair_mix));
}

DensityMatrix build_phi_two_sided(const EfiInstance& inst) {
    check_dim_cap(4 * inst.rho0.dim() * inst.rho0.dim(), "build_phi_two_sided");
    const Matrix plus = kron(bell_projector(BellKind::PhiPlus).matrix(),
                             kron(inst.rho0.matrix(), inst.rho0.matrix()));
    const Matrix minus = kron(bell_projector(BellKind::PhiMinus).matrix(),
                              kron(inst.rho1.matrix(), inst.rho1.matrix()));
    return DensityMatrix::unchecked(0.5 * (plus + minus));
}

FamilyPair build_pair_two_sided(const EfiInstance& inst) {
    // Registers: [Bell-A, Bell-B, EFI_A (n), EFI_B (n)]; A holds its Bell
    // qubit and the first element, B the rest.
    const int n = inst.rho0.qubits();
    Bipartition cut;
    cut.qubits_a.push_back(0);
    for (int q = 2; q < n + 2; ++q) cut.qubits_a.push_back(q);
    cut.qubits_b.push_back(1);
    for (int q = n + 2; q < 2 * n + 2; ++q) cut.qubits_b.push_back(q);
    return FamilyPair{build_psi_two_sided(inst), build_phi_two_sided(inst), cut,
                      inst.spec.lambda, inst};
}

KeyedFamily build_keyed(const EfiInstance& inst) {
    if (!inst.purification) {
        throw capability_error("build_keyed requires an instance with a purification");
    }
    const Purification& pur = *inst.purification;
    const PurifiedState chi0 = purified_generate(inst.spec, 0);

    Bipartition ek;
    ek.qubits_a = pur.e_qubits;
    ek.qubits_b = pur.k_qubits;
    const DensityMatrix full0 = DensityMatrix::from_pure(chi0.chi);
    KeyedFamily kf{build_pair(inst),
                   partial_trace(full0, ek, Side::B),
                   pur.u0,
                   chi0.chi,
                   static_cast<int>(pur.e_qubits.size()),
                   static_cast<int>(pur.k_qubits.size())};
    return kf;
}

AmplifiedFamily amplify(const FamilyPair& pair, int q) {
    if (q < 1) throw contract_error("amplify requires q >= 1");
    AmplifiedFamily out;
    out.q = q;
    out.base = pair;
    out.component_lambdas.assign(static_cast<size_t>(q), pair.lambda);

    const double per_copy_en = log_negativity(pair.phi, pair.cut);
    const double per_copy_fid = fidelity(pair.psi, pair.phi);
    const double per_copy_td = trace_distance(pair.psi, pair.phi);
    out.log_negativity_phi_bar = static_cast<double>(q) * per_copy_en;
    out.fidelity_psi_phi_bar = std::pow(per_copy_fid, q);

    const int per_copy_qubits = pair.total_qubits();
    const std::int64_t total_qubits = static_cast<std::int64_t>(per_copy_qubits) * q;
    const bool materializable =
        total_qubits < 62 && (std::int64_t{1} << total_qubits) <= dim_cap();

    // Joint cut: copy c occupies qubits [c*m, (c+1)*m).
    for (int c = 0; c < q; ++c) {
        for (int a : pair.cut.qubits_a) out.cut.qubits_a.push_back(c * per_copy_qubits + a);
        for (int b : pair.cut.qubits_b) out.cut.qubits_b.push_back(c * per_copy_qubits + b);
    }

    if (materializable) {
        out.psi_bar = tensor_power(pair.psi, q);
        out.phi_bar = tensor_power(pair.phi, q);
        out.td_exact = trace_distance(*out.psi_bar, *out.phi_bar);
        out.td_lower = *out.td_exact;
        out.td_upper = *out.td_exact;
    } else {
        // No exact tensor rule exists for the trace distance of the pair,
        // so the analytic record carries the standard bounds: monotonicity
        // and subadditivity from below/above plus the fidelity corridor.
        out.analytic = true;
        const double fid_bar = out.fidelity_psi_phi_bar;
        out.td_lower = std::max(per_copy_td, 1.0 - std::sqrt(fid_bar));
        out.td_upper = std::min({1.0, static_cast<double>(q) * per_copy_td,
                                 std::sqrt(std::max(0.0, 1.0 - fid_bar))});
    }
    return out;
}

}  // namespace pelab
