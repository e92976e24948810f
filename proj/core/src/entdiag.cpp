#include "pelab/entdiag.hpp"

#include <cmath>

#include "pelab/locc.hpp"
#include "pelab/ops.hpp"
#include "pelab/spectral.hpp"

namespace pelab {

double negativity(const DensityMatrix& rho, const Bipartition& cut) {
    const Matrix pt = partial_transpose(rho.matrix(), cut);
    const RealVector evals = hermitian_eigenvalues(pt);
    double neg = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (evals(i) < 0.0) neg += -evals(i);
    }
    return neg;
}

double log_negativity(const DensityMatrix& rho, const Bipartition& cut) {
    return std::log2(1.0 + 2.0 * negativity(rho, cut));
}

PptReport ppt_check(const DensityMatrix& rho, const Bipartition& cut, double tol) {
    const Matrix pt = partial_transpose(rho.matrix(), cut);
    const RealVector evals = hermitian_eigenvalues(pt);
    PptReport rep;
    rep.min_eigenvalue = evals.minCoeff();
    rep.is_ppt = rep.min_eigenvalue >= -tol;
    const std::int64_t da = std::int64_t{1} << cut.qubits_a.size();
    const std::int64_t db = std::int64_t{1} << cut.qubits_b.size();
    rep.conclusive_separability = rep.is_ppt && da * db <= 6;
    return rep;
}

GapReport gap_report(const CertifySummary& certs, const FamilyPair& pair) {
    GapReport rep;
    rep.cost_upper = certs.cost.value;
    rep.distill_lower = certs.distill.value;
    rep.gap = certs.gap;
    rep.epsilon = certs.epsilon;
    const PptReport ppt = ppt_check(pair.psi, pair.cut);
    rep.ppt_psi = ppt.is_ppt;
    rep.ppt_psi_min_eigenvalue = ppt.min_eigenvalue;
    rep.log_negativity_psi = log_negativity(pair.psi, pair.cut);
    rep.log_negativity_phi = log_negativity(pair.phi, pair.cut);
    return rep;
}

GapReport gap_report(const CertifySummary& certs, const AmplifiedFamily& family) {
    GapReport rep;
    rep.cost_upper = certs.cost.value;
    rep.distill_lower = certs.distill.value;
    rep.gap = certs.gap;
    rep.epsilon = certs.epsilon;
    if (family.psi_bar) {
        const PptReport ppt = ppt_check(*family.psi_bar, family.cut);
        rep.ppt_psi = ppt.is_ppt;
        rep.ppt_psi_min_eigenvalue = ppt.min_eigenvalue;
        rep.log_negativity_psi = log_negativity(*family.psi_bar, family.cut);
    } else {
        // per-copy PPT lifts to the tensor power (PT factorizes)
        const PptReport ppt = ppt_check(family.base.psi, family.base.cut);
        rep.ppt_psi = ppt.is_ppt;
        rep.ppt_psi_min_eigenvalue = ppt.min_eigenvalue;
        rep.log_negativity_psi =
            family.q * log_negativity(family.base.psi, family.base.cut);
    }
    rep.log_negativity_phi = family.phi_bar ? log_negativity(*family.phi_bar, family.cut)
                                            : family.log_negativity_phi_bar;
    return rep;
}

GapReport gap_report_psi_only(const DensityMatrix& psi, const Bipartition& cut,
                              const EntanglementCertificate* cost) {
    GapReport rep;
    rep.cost_upper = cost ? cost->value : 0;
    rep.epsilon = cost ? cost->epsilon : 0.0;
    const PptReport ppt = ppt_check(psi, cut);
    rep.ppt_psi = ppt.is_ppt;
    rep.ppt_psi_min_eigenvalue = ppt.min_eigenvalue;
    rep.log_negativity_psi = log_negativity(psi, cut);
    return rep;
}

}  // namespace pelab
