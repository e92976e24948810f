#include "pelab/locc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "pelab/adversary.hpp"
#include "pelab/ops.hpp"
#include "pelab/spectral.hpp"

namespace pelab {

namespace {
constexpr double kBranchPrune = 1e-14;
constexpr int kMaxMeasuredQubits = 12;
}  // namespace

std::string to_string(Party p) { return p == Party::A ? "A" : "B"; }

std::string to_string(CertificateKind kind) {
    return kind == CertificateKind::cost_upper ? "cost_upper" : "distill_lower";
}

// ---------------------------------------------------------------------------
// RegisterLayout

void RegisterLayout::add(RegisterDef def) {
    if (has(def.name)) throw contract_error("register already exists: " + def.name);
    regs_.push_back(std::move(def));
}

void RegisterLayout::remove(const std::string& name) {
    auto it = std::find_if(regs_.begin(), regs_.end(),
                           [&](const RegisterDef& r) { return r.name == name; });
    if (it == regs_.end()) throw contract_error("no such register: " + name);
    regs_.erase(it);
}

bool RegisterLayout::has(const std::string& name) const {
    return std::any_of(regs_.begin(), regs_.end(),
                       [&](const RegisterDef& r) { return r.name == name; });
}

const RegisterDef& RegisterLayout::find(const std::string& name) const {
    for (const RegisterDef& r : regs_) {
        if (r.name == name) return r;
    }
    throw contract_error("no such register: " + name);
}

Party RegisterLayout::owner(const std::string& name) const { return find(name).owner; }

int RegisterLayout::total_qubits() const {
    int total = 0;
    for (const RegisterDef& r : regs_) total += r.qubits;
    return total;
}

std::vector<int> RegisterLayout::positions(const std::string& name) const {
    int offset = 0;
    for (const RegisterDef& r : regs_) {
        if (r.name == name) {
            std::vector<int> out;
            for (int q = 0; q < r.qubits; ++q) out.push_back(offset + q);
            return out;
        }
        offset += r.qubits;
    }
    throw contract_error("no such register: " + name);
}

std::vector<int> RegisterLayout::positions(const std::vector<std::string>& names) const {
    std::vector<int> out;
    for (const std::string& n : names) {
        const std::vector<int> p = positions(n);
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Instruction factories

Instruction instr_prepare(Party party, std::vector<std::string> regs, const DensityMatrix& state,
                          std::string note, std::int64_t cost) {
    Instruction ins;
    ins.kind = Instruction::Kind::prepare;
    ins.party = party;
    ins.regs = std::move(regs);
    ins.matrix = state.matrix();
    ins.cost = cost >= 0 ? cost : state.dim() * state.dim();
    ins.note = std::move(note);
    return ins;
}

Instruction instr_prepare_epr(std::string reg_a, std::string reg_b, std::string note) {
    Instruction ins;
    ins.kind = Instruction::Kind::prepare_epr;
    ins.regs = {std::move(reg_a), std::move(reg_b)};
    ins.cost = 2;
    ins.note = std::move(note);
    return ins;
}

Instruction instr_unitary(Party party, std::vector<std::string> regs, Matrix u, std::string note,
                          std::optional<std::pair<std::string, int>> condition,
                          std::int64_t cost) {
    Instruction ins;
    ins.kind = Instruction::Kind::unitary;
    ins.party = party;
    ins.regs = std::move(regs);
    ins.cost = cost >= 0 ? cost : u.rows() * u.cols();
    ins.matrix = std::move(u);
    ins.condition = std::move(condition);
    ins.note = std::move(note);
    return ins;
}

Instruction instr_measure(Party party, std::vector<std::string> regs, std::vector<Matrix> effects,
                          std::string var, std::string note, std::int64_t cost) {
    Instruction ins;
    ins.kind = Instruction::Kind::measure;
    ins.party = party;
    ins.regs = std::move(regs);
    ins.cost = cost >= 0 ? cost
                         : (effects.empty() ? 0 : effects.front().rows() * effects.front().cols());
    ins.effects = std::move(effects);
    ins.var = std::move(var);
    ins.note = std::move(note);
    return ins;
}

Instruction instr_measure_comp(Party party, std::vector<std::string> regs, std::string var,
                               std::string note) {
    Instruction ins;
    ins.kind = Instruction::Kind::measure_comp;
    ins.party = party;
    ins.regs = std::move(regs);
    ins.var = std::move(var);
    ins.note = std::move(note);
    return ins;
}

Instruction instr_coin(Party party, std::string var, double prob_one, std::string note) {
    Instruction ins;
    ins.kind = Instruction::Kind::coin;
    ins.party = party;
    ins.var = std::move(var);
    ins.prob_one = prob_one;
    ins.cost = 1;
    ins.note = std::move(note);
    return ins;
}

Instruction instr_send(Party from, std::string var) {
    Instruction ins;
    ins.kind = Instruction::Kind::send;
    ins.party = from;
    ins.var = std::move(var);
    ins.note = "classical message";
    return ins;
}

Instruction instr_derive_is_nonzero(Party party, std::string var_out, std::string var_in) {
    Instruction ins;
    ins.kind = Instruction::Kind::derive;
    ins.party = party;
    ins.var = std::move(var_out);
    ins.var_in = std::move(var_in);
    ins.note = "classical post-processing";
    return ins;
}

Instruction instr_merge(std::vector<std::string> keys) {
    Instruction ins;
    ins.kind = Instruction::Kind::merge;
    ins.merge_keys = std::move(keys);
    ins.note = "merge branches with equal classical record";
    return ins;
}

Instruction instr_discard(Party party, std::vector<std::string> regs, std::string note) {
    Instruction ins;
    ins.kind = Instruction::Kind::discard;
    ins.party = party;
    ins.regs = std::move(regs);
    ins.note = std::move(note);
    return ins;
}

// ---------------------------------------------------------------------------
// LoccEngine

LoccEngine::LoccEngine(RegisterLayout layout, std::vector<Branch> initial)
    : layout_(std::move(layout)), branches_(std::move(initial)) {
    if (branches_.empty()) throw contract_error("engine needs at least one branch");
    const std::int64_t d = std::int64_t{1} << layout_.total_qubits();
    for (const Branch& b : branches_) {
        if (b.state.dim() != d) throw contract_error("initial state does not match layout");
    }
}

void LoccEngine::require_owned(Party party, const std::vector<std::string>& regs) const {
    for (const std::string& r : regs) {
        if (layout_.owner(r) != party) {
            throw contract_error("locality violation: party " + to_string(party) +
                                 " touched register " + r + " owned by " +
                                 to_string(layout_.owner(r)));
        }
    }
}

void LoccEngine::require_known(Party party, const std::string& var) const {
    auto it = knowledge_.find(var);
    if (it == knowledge_.end() ||
        std::find(it->second.begin(), it->second.end(), party) == it->second.end()) {
        throw contract_error("party " + to_string(party) + " does not know variable " + var);
    }
}

DensityMatrix LoccEngine::averaged_state() const {
    double total = 0.0;
    for (const Branch& b : branches_) total += b.weight;
    Matrix sum = Matrix::Zero(branches_.front().state.dim(), branches_.front().state.dim());
    for (const Branch& b : branches_) sum += (b.weight / total) * b.state.matrix();
    return DensityMatrix::unchecked(std::move(sum));
}

PartyView LoccEngine::party_view(Party p) const {
    PartyView view;
    view.name = p;
    int offset = 0;
    for (const RegisterDef& r : layout_.registers()) {
        for (int q = 0; q < r.qubits; ++q) {
            if (r.owner == p) {
                view.local_qubits.push_back(offset + q);
                if (r.ancilla) view.local_ancillas.push_back(offset + q);
            }
        }
        offset += r.qubits;
    }
    for (const auto& [var, holders] : knowledge_) {
        const bool knows =
            std::find(holders.begin(), holders.end(), p) != holders.end();
        const bool shared = holders.size() > 1;
        auto ot = origin_.find(var);
        const Party origin = (ot != origin_.end()) ? ot->second : p;
        if (knows && origin != p) view.inbox.push_back(var);
        if (shared && origin == p) view.outbox.push_back(var);
    }
    return view;
}

double LoccEngine::weight_where(const std::map<std::string, int>& assignment) const {
    double total = 0.0;
    for (const Branch& b : branches_) {
        bool match = true;
        for (const auto& [k, v] : assignment) {
            auto it = b.vars.find(k);
            if (it == b.vars.end() || it->second != v) {
                match = false;
                break;
            }
        }
        if (match) total += b.weight;
    }
    return total;
}

void LoccEngine::log_step(const Instruction& ins) {
    nlohmann::json j;
    const char* names[] = {"prepare", "prepare_epr", "unitary",  "measure", "measure_comp",
                           "coin",    "send",        "derive",   "merge",   "discard"};
    j["party"] = (ins.kind == Instruction::Kind::merge) ? "-" : to_string(ins.party);
    j["op"] = names[static_cast<int>(ins.kind)];
    nlohmann::json params;
    if (!ins.regs.empty()) params["regs"] = ins.regs;
    if (!ins.note.empty()) params["note"] = ins.note;
    if (ins.matrix.size() > 0) {
        std::string bytes(reinterpret_cast<const char*>(ins.matrix.data()),
                          static_cast<size_t>(ins.matrix.size()) * sizeof(Complex));
        params["matrix_dim"] = ins.matrix.rows();
        params["matrix_fnv1a64"] = fnv1a64_hex(bytes);
    }
    if (!ins.effects.empty()) params["effects"] = ins.effects.size();
    if (ins.condition) {
        params["if"] = ins.condition->first;
        params["equals"] = ins.condition->second;
    }
    if (ins.cost > 0) params["cost"] = ins.cost;
    j["params"] = params;
    if (!ins.var.empty()) {
        // Distribution of the classical variable over branches after the step.
        nlohmann::json dist;
        std::map<int, double> acc;
        for (const Branch& b : branches_) {
            auto it = b.vars.find(ins.var);
            if (it != b.vars.end()) acc[it->second] += b.weight;
        }
        for (const auto& [v, w] : acc) dist[std::to_string(v)] = w;
        j["msg_bits"] = dist;
    } else {
        j["msg_bits"] = nlohmann::json::object();
    }
    step_log_.push_back(j.dump());
}

void LoccEngine::execute(const Instruction& ins) {
    using Kind = Instruction::Kind;
    const int n = layout_.total_qubits();

    auto matches = [&](const Branch& b) {
        if (!ins.condition) return true;
        auto it = b.vars.find(ins.condition->first);
        return it != b.vars.end() && it->second == ins.condition->second;
    };
    if (ins.condition) require_known(ins.party, ins.condition->first);

    switch (ins.kind) {
        case Kind::prepare: {
            require_owned(ins.party, ins.regs);
            const std::vector<int> pos = layout_.positions(ins.regs);
            const DensityMatrix prep = DensityMatrix::unchecked(ins.matrix);
            for (Branch& b : branches_) {
                if (!matches(b)) continue;
                DensityMatrix rest = partial_trace_out(b.state, pos);
                DensityMatrix joined = tensor(rest, prep);
                // Restore the canonical layout order.
                std::vector<int> rest_pos;
                for (int q = 0; q < n; ++q) {
                    if (std::find(pos.begin(), pos.end(), q) == pos.end()) rest_pos.push_back(q);
                }
                std::vector<int> new_order(static_cast<size_t>(n));
                for (size_t i = 0; i < rest_pos.size(); ++i) {
                    new_order[static_cast<size_t>(rest_pos[i])] = static_cast<int>(i);
                }
                for (size_t i = 0; i < pos.size(); ++i) {
                    new_order[static_cast<size_t>(pos[i])] =
                        static_cast<int>(rest_pos.size() + i);
                }
                b.state = permute_qubits(joined, new_order);
            }
            gate_count_ += ins.cost;
            break;
        }
        case Kind::prepare_epr: {
            if (ins.regs.size() != 2 || layout_.owner(ins.regs[0]) == layout_.owner(ins.regs[1])) {
                throw contract_error("prepare_epr needs one register per party");
            }
            const std::vector<int> pos = layout_.positions(ins.regs);
            if (pos.size() != 2) throw contract_error("prepare_epr registers must be 1 qubit each");
            Instruction sub = ins;
            sub.kind = Kind::prepare;
            sub.matrix = bell_projector(BellKind::PhiPlus).matrix();
            // Bypass single-party ownership: this is the declared cross-cut resource.
            const DensityMatrix prep = DensityMatrix::unchecked(sub.matrix);
            for (Branch& b : branches_) {
                if (!matches(b)) continue;
                DensityMatrix rest = partial_trace_out(b.state, pos);
                DensityMatrix joined = tensor(rest, prep);
                std::vector<int> rest_pos;
                for (int q = 0; q < n; ++q) {
                    if (std::find(pos.begin(), pos.end(), q) == pos.end()) rest_pos.push_back(q);
                }
                std::vector<int> new_order(static_cast<size_t>(n));
                for (size_t i = 0; i < rest_pos.size(); ++i) {
                    new_order[static_cast<size_t>(rest_pos[i])] = static_cast<int>(i);
                }
                for (size_t i = 0; i < pos.size(); ++i) {
                    new_order[static_cast<size_t>(pos[i])] =
                        static_cast<int>(rest_pos.size() + i);
                }
                b.state = permute_qubits(joined, new_order);
            }
            ++epr_count_;
            gate_count_ += ins.cost;
            break;
        }
        case Kind::unitary: {
            require_owned(ins.party, ins.regs);
            require_unitary(ins.matrix);
            const std::vector<int> pos = layout_.positions(ins.regs);
            const Matrix u_adj = ins.matrix.adjoint();
            for (Branch& b : branches_) {
                if (!matches(b)) continue;
                Matrix m = b.state.matrix();
                apply_local_left(m, ins.matrix, pos, n);
                apply_local_right(m, u_adj, pos, n);
                b.state = DensityMatrix::unchecked(std::move(m));
            }
            gate_count_ += ins.cost;
            break;
        }
        case Kind::measure: {
            require_owned(ins.party, ins.regs);
            if (ins.effects.empty()) throw contract_error("measure needs at least one effect");
            const std::vector<int> pos = layout_.positions(ins.regs);
            // POVM sanity: effects Hermitian, PSD, and summing to identity.
            Matrix sum = Matrix::Zero(ins.effects.front().rows(), ins.effects.front().cols());
            for (const Matrix& e : ins.effects) {
                if ((e - e.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
                    throw contract_error("measure effect not Hermitian");
                }
                if (hermitian_eigenvalues(e).minCoeff() < -1e-9) {
                    throw contract_error("measure effect not positive semi-definite");
                }
                sum += e;
            }
            if ((sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff() > 1e-9) {
                throw contract_error("measure effects do not sum to identity");
            }
            std::vector<Matrix> kraus;
            for (const Matrix& e : ins.effects) kraus.push_back(psd_sqrt(e));
            std::vector<Branch> next;
            for (const Branch& b : branches_) {
                if (!matches(b)) {
                    next.push_back(b);
                    continue;
                }
                for (size_t i = 0; i < kraus.size(); ++i) {
                    Matrix post = b.state.matrix();
                    apply_local_left(post, kraus[i], pos, n);
                    apply_local_right(post, kraus[i].adjoint(), pos, n);
                    const double p = post.trace().real();
                    if (p <= kBranchPrune) continue;
                    Branch nb;
                    nb.weight = b.weight * p;
                    nb.state = DensityMatrix::unchecked(post / p);
                    nb.vars = b.vars;
                    nb.vars[ins.var] = static_cast<int>(i);
                    next.push_back(std::move(nb));
                }
            }
            branches_ = std::move(next);
            knowledge_[ins.var] = {ins.party};
            origin_[ins.var] = ins.party;
            gate_count_ += ins.cost;
            break;
        }
        case Kind::measure_comp: {
            require_owned(ins.party, ins.regs);
            const std::vector<int> pos = layout_.positions(ins.regs);
            const int k = static_cast<int>(pos.size());
            if (k > kMaxMeasuredQubits) {
                throw resource_error("computational measurement of " + std::to_string(k) +
                                     " qubits exceeds branch limit");
            }
            const std::int64_t outcomes = std::int64_t{1} << k;
            const std::int64_t d = std::int64_t{1} << n;
            // Precompute the measured-bit pattern of every basis index.
            std::vector<std::int64_t> pattern(static_cast<size_t>(d));
            for (std::int64_t x = 0; x < d; ++x) {
                std::int64_t m = 0;
                for (int a = 0; a < k; ++a) {
                    m = (m << 1) | ((x >> (n - 1 - pos[static_cast<size_t>(a)])) & 1);
                }
                pattern[static_cast<size_t>(x)] = m;
            }
            std::vector<Branch> next;
            for (const Branch& b : branches_) {
                if (!matches(b)) {
                    next.push_back(b);
                    continue;
                }
                for (std::int64_t m = 0; m < outcomes; ++m) {
                    double p = 0.0;
                    for (std::int64_t x = 0; x < d; ++x) {
                        if (pattern[static_cast<size_t>(x)] == m) {
                            p += b.state.matrix()(x, x).real();
                        }
                    }
                    if (p <= kBranchPrune) continue;
                    Matrix post = Matrix::Zero(d, d);
                    for (std::int64_t x = 0; x < d; ++x) {
                        if (pattern[static_cast<size_t>(x)] != m) continue;
                        for (std::int64_t y = 0; y < d; ++y) {
                            if (pattern[static_cast<size_t>(y)] == m) {
                                post(x, y) = b.state.matrix()(x, y) / p;
                            }
                        }
                    }
                    Branch nb;
                    nb.weight = b.weight * p;
                    nb.state = DensityMatrix::unchecked(std::move(post));
                    nb.vars = b.vars;
                    nb.vars[ins.var] = static_cast<int>(m);
                    next.push_back(std::move(nb));
                }
            }
            branches_ = std::move(next);
            knowledge_[ins.var] = {ins.party};
            origin_[ins.var] = ins.party;
            gate_count_ += k;
            break;
        }
        case Kind::coin: {
            std::vector<Branch> next;
            for (const Branch& b : branches_) {
                if (!matches(b)) {
                    next.push_back(b);
                    continue;
                }
                for (int v = 0; v <= 1; ++v) {
                    const double p = v ? ins.prob_one : 1.0 - ins.prob_one;
                    if (p <= kBranchPrune) continue;
                    Branch nb = b;
                    nb.weight = b.weight * p;
                    nb.vars[ins.var] = v;
                    next.push_back(std::move(nb));
                }
            }
            branches_ = std::move(next);
            knowledge_[ins.var] = {ins.party};
            origin_[ins.var] = ins.party;
            gate_count_ += ins.cost;
            break;
        }
        case Kind::send: {
            require_known(ins.party, ins.var);
            const Party other = ins.party == Party::A ? Party::B : Party::A;
            auto& holders = knowledge_[ins.var];
            if (std::find(holders.begin(), holders.end(), other) == holders.end()) {
                holders.push_back(other);
            }
            break;
        }
        case Kind::derive: {
            require_known(ins.party, ins.var_in);
            for (Branch& b : branches_) {
                auto it = b.vars.find(ins.var_in);
                if (it == b.vars.end()) throw contract_error("derive: missing " + ins.var_in);
                b.vars[ins.var] = it->second != 0 ? 1 : 0;
            }
            knowledge_[ins.var] = {ins.party};
            origin_[ins.var] = ins.party;
            break;
        }
        case Kind::merge: {
            std::map<std::vector<int>, Branch> groups;
            for (const Branch& b : branches_) {
                std::vector<int> key;
                for (const std::string& k : ins.merge_keys) {
                    auto it = b.vars.find(k);
                    key.push_back(it == b.vars.end() ? -1 : it->second);
                }
                auto found = groups.find(key);
                if (found == groups.end()) {
                    Branch nb;
                    nb.weight = b.weight;
                    nb.state = DensityMatrix::unchecked(b.weight * b.state.matrix());
                    for (size_t i = 0; i < ins.merge_keys.size(); ++i) {
                        if (key[i] >= 0) nb.vars[ins.merge_keys[i]] = key[i];
                    }
                    groups.emplace(std::move(key), std::move(nb));
                } else {
                    Branch& g = found->second;
                    g.weight += b.weight;
                    g.state = DensityMatrix::unchecked(g.state.matrix() +
                                                       b.weight * b.state.matrix());
                }
            }
            branches_.clear();
            for (auto& [key, g] : groups) {
                g.state = DensityMatrix::unchecked(g.state.matrix() / g.weight);
                branches_.push_back(std::move(g));
            }
            break;
        }
        case Kind::discard: {
            require_owned(ins.party, ins.regs);
            const std::vector<int> pos = layout_.positions(ins.regs);
            for (Branch& b : branches_) {
                b.state = partial_trace_out(b.state, pos);
            }
            for (const std::string& r : ins.regs) layout_.remove(r);
            break;
        }
    }
    log_step(ins);
}

void LoccEngine::run(const std::vector<Instruction>& program) {
    for (const Instruction& ins : program) execute(ins);
}

// ---------------------------------------------------------------------------
// Transcripts

std::string ProtocolTranscript::to_json_lines() const {
    std::ostringstream out;
    for (const std::string& line : step_log) out << line << "\n";
    return out.str();
}

DensityMatrix replay(const ProtocolTranscript& transcript) {
    LoccEngine engine(transcript.initial_layout, transcript.initial_branches);
    engine.run(transcript.program);
    return engine.averaged_state();
}

std::map<std::string, int> sample_branch(const ProtocolTranscript& transcript,
                                         std::uint64_t seed) {
    CounterRng rng(seed, 0x7472616aULL);
    double total = 0.0;
    for (const Branch& b : transcript.final_branches) total += b.weight;
    double u = rng.next_double() * total;
    for (const Branch& b : transcript.final_branches) {
        u -= b.weight;
        if (u <= 0.0) return b.vars;
    }
    return transcript.final_branches.back().vars;
}

// ---------------------------------------------------------------------------
// Protocols

namespace {

ProtocolTranscript finish(const std::string& name, LoccEngine& engine,
                          RegisterLayout initial_layout, std::vector<Branch> initial_branches,
                          std::vector<Instruction> program, const DensityMatrix& target) {
    ProtocolTranscript t;
    t.name = name;
    t.initial_layout = std::move(initial_layout);
    t.initial_branches = std::move(initial_branches);
    t.program = std::move(program);
    t.final_state = engine.averaged_state();
    t.target = target;
    t.fidelity = fidelity(t.final_state, target);
    t.epr_count = engine.epr_count();
    t.gate_count = engine.gate_count();
    t.final_branches = engine.branches();
    t.step_log = engine.step_log();
    return t;
}

Branch zero_branch(const RegisterLayout& layout) {
    Branch b;
    b.weight = 1.0;
    b.state = DensityMatrix::basis_state(layout.total_qubits(), 0);
    return b;
}

}  // namespace

PrepareResult run_prepare_psi(const EfiInstance& inst) {
    const int n = inst.rho0.qubits();
    RegisterLayout layout({{"bell_a", Party::A, 1}, {"bell_b", Party::B, 1}, {"efi", Party::A, n}});
    std::vector<Branch> initial{zero_branch(layout)};

    const std::int64_t gen_cost = inst.spec.family == EfiFamilyKind::custom
                                      ? inst.rho0.dim() * inst.rho0.dim()
                                      : inst.spec.generator_gate_bound();
    std::vector<Instruction> program;
    program.push_back(instr_coin(Party::A, "b", 0.5, "element coin"));
    program.push_back(instr_prepare(Party::A, {"efi"}, inst.rho0, "generate element 0", gen_cost));
    program.back().condition = {{"b", 0}};
    program.push_back(instr_prepare(Party::A, {"efi"}, inst.rho1, "generate element 1", gen_cost));
    program.back().condition = {{"b", 1}};
    program.push_back(instr_coin(Party::A, "c", 0.5, "correlation coin"));
    program.push_back(
        instr_unitary(Party::A, {"bell_a"}, pauli_x(), "set |1> on A side", {{"c", 1}}, 1));
    program.push_back(instr_send(Party::A, "c"));
    program.push_back(
        instr_unitary(Party::B, {"bell_b"}, pauli_x(), "set |1> on B side", {{"c", 1}}, 1));

    LoccEngine engine(layout, initial);
    engine.run(program);

    const DensityMatrix target = build_psi(inst);
    PrepareResult out;
    out.transcript = finish("prepare_psi", engine, layout, initial, program, target);

    EntanglementCertificate cert;
    cert.kind = CertificateKind::cost_upper;
    cert.value = engine.epr_count();
    cert.epsilon = 1.0 - out.transcript.fidelity;
    cert.efficient = true;
    cert.gate_bound = engine.gate_count();
    cert.transcript = out.transcript;
    out.certificate = std::move(cert);
    return out;
}

DistillResult run_distill_phi(const EfiInstance& inst) {
    const int n = inst.rho0.qubits();
    RegisterLayout layout({{"bell_a", Party::A, 1}, {"bell_b", Party::B, 1}, {"efi", Party::A, n}});
    std::vector<Branch> initial{{1.0, build_phi(inst), {}}};

    const Distinguisher helstrom = helstrom_povm(inst.rho0, inst.rho1);
    const Matrix& proj = helstrom.accept_effect;
    std::vector<Instruction> program;
    program.push_back(instr_measure(
        Party::A, {"efi"},
        {proj, Matrix::Identity(proj.rows(), proj.cols()) - proj}, "g",
        "optimal discrimination of the element pair"));
    program.push_back(instr_send(Party::A, "g"));
    program.push_back(
        instr_unitary(Party::B, {"bell_b"}, pauli_z(), "phase fix on guess 1", {{"g", 1}}, 1));
    program.push_back(instr_discard(Party::A, {"efi"}, "drop the used element register"));

    LoccEngine engine(layout, initial);
    engine.run(program);

    const DensityMatrix target = bell_projector(BellKind::PhiPlus);
    DistillResult out;
    out.transcript = finish("distill_phi", engine, layout, initial, program, target);
    out.predicted_fidelity = 1.0 - 0.5 * (1.0 - trace_distance(inst.rho0, inst.rho1));

    EntanglementCertificate cert;
    cert.kind = CertificateKind::distill_lower;
    cert.value = 1;
    cert.epsilon = 1.0 - out.transcript.fidelity;
    cert.efficient = false;  // the optimal POVM need not have a small circuit
    cert.gate_bound = engine.gate_count();
    cert.transcript = out.transcript;
    out.certificate = std::move(cert);
    return out;
}

KeyedDistillResult run_distill_phi_keyed(const KeyedFamily& kf) {
    const EfiInstance& inst = kf.base.source;
    if (!inst.purification) {
        throw capability_error("keyed distillation requires a purification");
    }
    const int ne = kf.e_qubit_count;
    const int nk = kf.k_qubit_count;
    RegisterLayout layout({{"bell_a", Party::A, 1},
                           {"bell_b", Party::B, 1},
                           {"efi", Party::A, ne},
                           {"key", Party::A, nk}});

    // Branch b=0: the coherent generator output sits jointly on (E, K).
    // Branch b=1: the element and the key are independent preparations.
    std::vector<Branch> initial;
    {
        Branch b0;
        b0.weight = 0.5;
        b0.state = DensityMatrix::unchecked(
            kron(bell_projector(BellKind::PhiPlus).matrix(),
                 DensityMatrix::from_pure(kf.chi0).matrix()));
        b0.vars["b"] = 0;
        initial.push_back(std::move(b0));
        Branch b1;
        b1.weight = 0.5;
        b1.state = DensityMatrix::unchecked(
            kron(bell_projector(BellKind::PhiMinus).matrix(),
                 kron(inst.rho1.matrix(), kf.key_state.matrix())));
        b1.vars["b"] = 1;
        initial.push_back(std::move(b1));
    }

    const std::int64_t gen_cost = inst.spec.generator_gate_bound();
    std::vector<Instruction> program;
    program.push_back(instr_unitary(Party::A, {"efi", "key"}, kf.u0.adjoint(),
                                    "invert the generator unitary part", std::nullopt, gen_cost));
    program.push_back(
        instr_measure_comp(Party::A, {"efi", "key"}, "m", "computational readout"));
    program.push_back(instr_derive_is_nonzero(Party::A, "g", "m"));
    program.push_back(instr_merge({"b", "g"}));
    program.push_back(instr_send(Party::A, "g"));
    program.push_back(
        instr_unitary(Party::B, {"bell_b"}, pauli_z(), "phase fix on guess 1", {{"g", 1}}, 1));
    program.push_back(instr_discard(Party::A, {"efi", "key"}, "drop element and key registers"));

    LoccEngine engine(layout, initial);
    engine.run(program);

    KeyedDistillResult out;
    out.accept_given_b0 = engine.weight_where({{"b", 0}, {"g", 0}}) / engine.weight_where({{"b", 0}});
    out.accept_given_b1 = engine.weight_where({{"b", 1}, {"g", 0}}) / engine.weight_where({{"b", 1}});
    const Matrix product = kron(inst.rho1.matrix(), kf.key_state.matrix());
    out.overlap_reference =
        (kf.chi0.amplitudes().adjoint() * product * kf.chi0.amplitudes())(0, 0).real();

    const DensityMatrix target = bell_projector(BellKind::PhiPlus);
    out.transcript = finish("distill_phi_keyed", engine, layout, initial, program, target);

    EntanglementCertificate cert;
    cert.kind = CertificateKind::distill_lower;
    cert.value = 1;
    cert.epsilon = 1.0 - out.transcript.fidelity;
    cert.efficient = true;
    cert.gate_bound = engine.gate_count();
    cert.transcript = out.transcript;
    out.certificate = std::move(cert);
    return out;
}

CertifySummary certify(const FamilyPair& pair) {
    CertifySummary out;
    out.cost = run_prepare_psi(pair.source).certificate;
    out.distill = run_distill_phi(pair.source).certificate;
    out.gap = out.distill.value - out.cost.value;
    out.epsilon = std::max(out.cost.epsilon, out.distill.epsilon);
    out.q = 1;
    out.per_copy_epsilon = out.epsilon;
    out.bernoulli_ok = true;
    return out;
}

CertifySummary certify(const AmplifiedFamily& family) {
    CertifySummary per_copy = certify(family.base);
    CertifySummary out = per_copy;
    out.q = family.q;
    out.per_copy_epsilon = per_copy.distill.epsilon;

    const double fid_one = 1.0 - per_copy.distill.epsilon;
    const double fid_q = std::pow(fid_one, family.q);
    out.distill.value = per_copy.distill.value * family.q;
    out.distill.epsilon = 1.0 - fid_q;
    out.distill.gate_bound = per_copy.distill.gate_bound * family.q;
    out.cost.value = per_copy.cost.value * family.q;
    out.cost.gate_bound = per_copy.cost.gate_bound * family.q;
    out.gap = out.distill.value - out.cost.value;
    out.epsilon = std::max(out.cost.epsilon, out.distill.epsilon);
    out.bernoulli_ok =
        fid_q + 1e-12 >= 1.0 - static_cast<double>(family.q) * per_copy.distill.epsilon;
    return out;
}

}  // namespace pelab
