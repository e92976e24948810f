#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pelab/families.hpp"

namespace pelab {

enum class DistinguisherKind { helstrom, fixed_povm, local_measure, random_circuit };

/// A two-outcome distinguisher compiled to its accept effect E1
/// (Heisenberg-picture composition), so every advantage is an exact trace
/// formula; sampling is a presentation layer on top.
struct Distinguisher {
    DistinguisherKind kind = DistinguisherKind::fixed_povm;
    Matrix accept_effect;
    std::string description;
    std::string descriptor;  // compact JSON descriptor for serialization

    std::int64_t dim() const { return accept_effect.rows(); }
    std::string descriptor_hash() const { return fnv1a64_hex(descriptor); }

    /// 0 <= E1 <= I within tolerance; throws contract_error otherwise.
    void validate(double tol = 1e-9) const;
};

/// Projector onto the nonnegative eigenspace of rho0 - sigma1; its advantage
/// on the pair equals their trace distance.
Distinguisher helstrom_povm(const DensityMatrix& rho0, const DensityMatrix& sigma1);

Distinguisher fixed_povm_distinguisher(Matrix accept_effect, std::string description);

/// Accept-never (effect 0) distinguisher; advantage 0 on every pair.
Distinguisher constant_distinguisher(std::int64_t dim);

enum class LocalRule { first_bit, parity, all_zeros, table };
std::string to_string(LocalRule rule);
LocalRule local_rule_from_string(const std::string& name);

/// Per-qubit measurement in bases "XYZ..." (one letter per qubit) followed by
/// a classical acceptance rule over the outcome bits.
Distinguisher local_measure_distinguisher(const std::string& bases, LocalRule rule,
                                          std::uint64_t table_mask = 0);

/// Seeded layered circuit (single-qubit rotations + CNOT chain), then a
/// computational measurement of qubit 0; accepts on outcome 1.
Distinguisher random_circuit_distinguisher(int qubits, int depth, std::uint64_t seed);

struct BoundCheck {
    std::string name;
    double bound_value = 0.0;
    bool satisfied = false;
};

struct EmpiricalEstimate {
    double estimate = 0.0;
    std::int64_t trials = 0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
    bool within_4_std_error = true;
};

struct AdvantageReport {
    double exact = 0.0;
    std::optional<EmpiricalEstimate> empirical;
    std::optional<BoundCheck> bound_checked;
};

/// |Tr(E1 (rho - sigma))| plus the trace-distance bound check.
AdvantageReport advantage_exact(const Distinguisher& d, const DensityMatrix& rho,
                                const DensityMatrix& sigma, bool check_td_bound = true);

/// Frequency estimate from `trials` Bernoulli draws per state, one
/// counter-RNG stream per trial. Requires trials >= 100.
AdvantageReport advantage_monte_carlo(const Distinguisher& d, const DensityMatrix& rho,
                                      const DensityMatrix& sigma, std::int64_t trials,
                                      std::uint64_t seed);

struct HalvingRow {
    std::string description;
    double advantage = 0.0;
    bool within_bound = false;
};

/// Checks advantage(d, psi, phi) <= TD(rho0, rho1) / 2 for every given
/// distinguisher, and that the optimal measurement attains equality.
struct HalvingReport {
    double td_rho = 0.0;
    double bound = 0.0;  // td_rho / 2
    std::vector<HalvingRow> rows;
    double optimal_advantage = 0.0;
    bool optimal_attains_bound = false;
    bool all_within = false;
};

HalvingReport verify_halving(const EfiInstance& inst, const std::vector<Distinguisher>& ds);

/// The telescoping hybrid chain H_i = psi^{(x)(p-i)} (x) phi^{(x)i}.
struct HybridSequence {
    int p = 0;
    std::vector<std::string> hybrid_labels;  // H_0 ... H_p
    std::vector<double> per_adjacent_advantage;
    int i_star = 0;
    double total_advantage = 0.0;
    double sum_adjacent = 0.0;
    bool telescoping_ok = false;  // total <= sum <= p * max within tolerance
};

struct HybridReduction {
    HybridSequence sequence;
    /// Single-copy distinguisher embedding the unknown state at slot
    /// p - i_star - 1 (0-indexed), remaining slots filled from advice states.
    Distinguisher single_copy;
    double single_copy_advantage = 0.0;
};

HybridReduction hybrid_reduce(const Distinguisher& many_copy, const FamilyPair& pair, int p);

/// Contraction of a many-copy effect against fixed prefix/suffix states:
/// Tr((X (x) eta (x) Y) E) = Tr(eta * effective_effect(E, X, Y)).
Matrix effective_effect(const Matrix& effect, const Matrix& prefix_state,
                        std::int64_t slot_dim, const Matrix& suffix_state);

}  // namespace pelab
