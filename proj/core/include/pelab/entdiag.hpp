#pragma once

#include <optional>

#include "pelab/density.hpp"

namespace pelab {

/// Sum of |lambda| over negative eigenvalues of the partial transpose.
/// Zero on every product and PPT state.
double negativity(const DensityMatrix& rho, const Bipartition& cut);

/// log2(1 + 2 * negativity) = log2 of the partial-transpose trace norm.
double log_negativity(const DensityMatrix& rho, const Bipartition& cut);

struct PptReport {
    bool is_ppt = false;
    double min_eigenvalue = 0.0;
    /// PPT implies separability only for 2x2 and 2x3 cuts; the flag stays
    /// honest about larger dimensions.
    bool conclusive_separability = false;
};

PptReport ppt_check(const DensityMatrix& rho, const Bipartition& cut, double tol = 1e-9);

/// Aggregation of operational certificates and structural diagnostics.
struct GapReport {
    int cost_upper = 0;
    std::optional<int> distill_lower;
    std::optional<int> gap;
    double epsilon = 0.0;
    double log_negativity_psi = 0.0;
    std::optional<double> log_negativity_phi;
    bool ppt_psi = false;
    double ppt_psi_min_eigenvalue = 0.0;
};

struct CertifySummary;  // locc
struct FamilyPair;      // families
struct AmplifiedFamily;
struct EntanglementCertificate;

GapReport gap_report(const CertifySummary& certs, const FamilyPair& pair);
GapReport gap_report(const CertifySummary& certs, const AmplifiedFamily& family);

/// Partial report when only psi (and optionally its cost certificate) exists.
GapReport gap_report_psi_only(const DensityMatrix& psi, const Bipartition& cut,
                              const EntanglementCertificate* cost);

}  // namespace pelab
