#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pelab/families.hpp"

namespace pelab {

enum class Party { A, B };
std::string to_string(Party p);

/// Named, party-owned qubit registers in a fixed global order. Positions are
/// derived from the order, so discarding a register renumbers the rest.
struct RegisterDef {
    std::string name;
    Party owner;
    int qubits = 1;
    bool ancilla = false;  // scratch register added by the party itself
};

class RegisterLayout {
public:
    RegisterLayout() = default;
    explicit RegisterLayout(std::vector<RegisterDef> regs) : regs_(std::move(regs)) {}

    void add(RegisterDef def);
    void remove(const std::string& name);
    bool has(const std::string& name) const;
    Party owner(const std::string& name) const;
    int total_qubits() const;

    /// Current global qubit positions of a register, ascending.
    std::vector<int> positions(const std::string& name) const;
    std::vector<int> positions(const std::vector<std::string>& names) const;

    const std::vector<RegisterDef>& registers() const { return regs_; }

private:
    const RegisterDef& find(const std::string& name) const;
    std::vector<RegisterDef> regs_;
};

/// One weighted branch of a branch-exact protocol run: the joint state plus
/// the classical variables recorded so far.
struct Branch {
    double weight = 1.0;
    DensityMatrix state;
    std::map<std::string, int> vars;
};

/// A single engine instruction. Protocols are data (instruction lists), which
/// makes transcripts replayable.
struct Instruction {
    enum class Kind {
        prepare,       // replace register contents with a given state
        prepare_epr,   // shared Phi+ across two 1-qubit registers (the only cross-cut op)
        unitary,       // local unitary, optionally conditioned on a classical var
        measure,       // local POVM, branches per effect, outcome stored in var
        measure_comp,  // local full computational measurement of the registers
        coin,          // local classical fair-or-biased coin
        send,          // classical message: var becomes known to the other party
        derive,        // classical post-processing: var = (var_in != 0)
        merge,         // merge branches equal on the listed vars
        discard        // trace out registers
    };

    Kind kind = Kind::prepare;
    Party party = Party::A;
    std::vector<std::string> regs;
    Matrix matrix;                 // prepare: state; unitary: U
    std::vector<Matrix> effects;   // measure
    std::string var;
    std::string var_in;
    double prob_one = 0.5;         // coin
    std::optional<std::pair<std::string, int>> condition;
    std::vector<std::string> merge_keys;
    std::int64_t cost = 0;         // recorded gate-count contribution
    std::string note;
};

Instruction instr_prepare(Party party, std::vector<std::string> regs, const DensityMatrix& state,
                          std::string note, std::int64_t cost = -1);
Instruction instr_prepare_epr(std::string reg_a, std::string reg_b, std::string note);
Instruction instr_unitary(Party party, std::vector<std::string> regs, Matrix u, std::string note,
                          std::optional<std::pair<std::string, int>> condition = std::nullopt,
                          std::int64_t cost = -1);
Instruction instr_measure(Party party, std::vector<std::string> regs, std::vector<Matrix> effects,
                          std::string var, std::string note, std::int64_t cost = -1);
Instruction instr_measure_comp(Party party, std::vector<std::string> regs, std::string var,
                               std::string note);
Instruction instr_coin(Party party, std::string var, double prob_one, std::string note);
Instruction instr_send(Party from, std::string var);
Instruction instr_derive_is_nonzero(Party party, std::string var_out, std::string var_in);
Instruction instr_merge(std::vector<std::string> keys);
Instruction instr_discard(Party party, std::vector<std::string> regs, std::string note);

/// A party's current view of the run: its qubit positions, ancilla
/// positions, and classical message queues (received vs sent variables).
struct PartyView {
    Party name = Party::A;
    std::vector<int> local_qubits;
    std::vector<int> local_ancillas;
    std::vector<std::string> inbox;   // variables learned from the other party
    std::vector<std::string> outbox;  // own variables sent across
};

/// Branch-exact two-party engine. Every quantum instruction must touch only
/// the acting party's registers; conditions may reference only classical
/// variables the acting party knows (its own outcomes plus received
/// messages). Violations throw contract_error.
class LoccEngine {
public:
    LoccEngine(RegisterLayout layout, std::vector<Branch> initial);

    void execute(const Instruction& ins);
    void run(const std::vector<Instruction>& program);

    const RegisterLayout& layout() const { return layout_; }
    const std::vector<Branch>& branches() const { return branches_; }

    /// Weighted average of branch states (the protocol's output state).
    DensityMatrix averaged_state() const;

    /// Total weight of branches matching all the given var assignments.
    double weight_where(const std::map<std::string, int>& assignment) const;

    int epr_count() const { return epr_count_; }
    std::int64_t gate_count() const { return gate_count_; }

    PartyView party_view(Party p) const;

    /// Step records for the JSON-lines export.
    const std::vector<std::string>& step_log() const { return step_log_; }

private:
    void require_owned(Party party, const std::vector<std::string>& regs) const;
    void require_known(Party party, const std::string& var) const;
    void log_step(const Instruction& ins);

    RegisterLayout layout_;
    std::vector<Branch> branches_;
    std::map<std::string, std::vector<Party>> knowledge_;
    std::map<std::string, Party> origin_;
    int epr_count_ = 0;
    std::int64_t gate_count_ = 0;
    std::vector<std::string> step_log_;
};

struct ProtocolTranscript {
    std::string name;
    RegisterLayout initial_layout;
    std::vector<Branch> initial_branches;
    std::vector<Instruction> program;

    DensityMatrix final_state;  // branch-averaged over the remaining registers
    DensityMatrix target;
    double fidelity = 0.0;
    int epr_count = 0;
    std::int64_t gate_count = 0;
    std::vector<Branch> final_branches;
    std::vector<std::string> step_log;

    /// One JSON object per executed step: {party, op, params, msg_bits}.
    std::string to_json_lines() const;
};

/// Re-executes the recorded program from the recorded initial data.
/// Returns the branch-averaged final state.
DensityMatrix replay(const ProtocolTranscript& transcript);

enum class CertificateKind { cost_upper, distill_lower };
std::string to_string(CertificateKind kind);

struct EntanglementCertificate {
    CertificateKind kind = CertificateKind::cost_upper;
    int value = 0;        // EPR pairs consumed (cost) or distilled (distill)
    double epsilon = 0.0; // 1 - achieved fidelity
    bool efficient = false;
    std::int64_t gate_bound = 0;
    ProtocolTranscript transcript;
};

struct PrepareResult {
    ProtocolTranscript transcript;
    EntanglementCertificate certificate;
};

/// The two-coin preparation of psi: A samples the element bit and the
/// correlated computational bit, sends the latter to B. Consumes zero EPR
/// pairs; the averaged output equals build_psi exactly.
PrepareResult run_prepare_psi(const EfiInstance& inst);

struct DistillResult {
    ProtocolTranscript transcript;
    EntanglementCertificate certificate;
    double predicted_fidelity = 0.0;  // 1 - (1 - TD(rho0, rho1)) / 2
};

/// Helstrom-measurement distillation of phi: A measures its EFI register
/// with the optimal POVM, sends the guess, B applies Z on guess 1.
DistillResult run_distill_phi(const EfiInstance& inst);

struct KeyedDistillResult {
    ProtocolTranscript transcript;
    EntanglementCertificate certificate;
    double accept_given_b0 = 0.0;  // Pr[guess 0 | b = 0]
    double accept_given_b1 = 0.0;  // Pr[guess 0 | b = 1]
    double overlap_reference = 0.0;  // <chi0| (rho1 (x) k0) |chi0>
};

/// Efficient keyed distillation: A rebuilds the coherent generator output
/// from its EFI register and the quantum key, inverts the generator's
/// unitary part, and accepts bit 0 on an all-zeros readout.
KeyedDistillResult run_distill_phi_keyed(const KeyedFamily& kf);

struct CertifySummary {
    EntanglementCertificate cost;
    EntanglementCertificate distill;
    int gap = 0;
    double epsilon = 0.0;
    int q = 1;
    double per_copy_epsilon = 0.0;
    bool bernoulli_ok = true;  // (1 - eps)^q >= 1 - q * eps
};

CertifySummary certify(const FamilyPair& pair);
CertifySummary certify(const AmplifiedFamily& family);

/// Demonstration sampling mode: follows one randomly drawn branch and
/// returns its classical record.
std::map<std::string, int> sample_branch(const ProtocolTranscript& transcript,
                                         std::uint64_t seed);

}  // namespace pelab
