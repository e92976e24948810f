#include "pelab/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pelab/ops.hpp"
#include "pelab/rng.hpp"
#include "pelab/spectral.hpp"

namespace pelab {

void Distinguisher::validate(double tol) const {
    if (accept_effect.rows() != accept_effect.cols()) {
        throw contract_error("accept effect must be square");
    }
    if ((accept_effect - accept_effect.adjoint()).cwiseAbs().maxCoeff() > tol) {
        throw contract_error("accept effect not Hermitian");
    }
    const RealVector evals = hermitian_eigenvalues(accept_effect);
    if (evals.minCoeff() < -tol || evals.maxCoeff() > 1.0 + tol) {
        throw contract_error("accept effect not in [0, I]");
    }
}

Distinguisher helstrom_povm(const DensityMatrix& rho0, const DensityMatrix& sigma1) {
    if (rho0.dim() != sigma1.dim()) throw contract_error("helstrom_povm: dimension mismatch");
    const Matrix diff = rho0.matrix() - sigma1.matrix();
    const SpectralDecomposition spec = spectral_decompose(diff);
    Distinguisher d;
    d.kind = DistinguisherKind::helstrom;
    d.accept_effect = spec.nonnegative_projector(rho0.dim());
    d.description = "helstrom";
    std::string bytes(reinterpret_cast<const char*>(d.accept_effect.data()),
                      static_cast<size_t>(d.accept_effect.size()) * sizeof(Complex));
    std::ostringstream desc;
    desc << "{\"kind\":\"helstrom\",\"dim\":" << rho0.dim() << ",\"effect_fnv\":\""
         << fnv1a64_hex(bytes) << "\"}";
    d.descriptor = desc.str();
    return d;
}

Distinguisher fixed_povm_distinguisher(Matrix accept_effect, std::string description) {
    Distinguisher d;
    d.kind = DistinguisherKind::fixed_povm;
    d.accept_effect = std::move(accept_effect);
    d.description = std::move(description);
    std::string bytes(reinterpret_cast<const char*>(d.accept_effect.data()),
                      static_cast<size_t>(d.accept_effect.size()) * sizeof(Complex));
    std::ostringstream desc;
    desc << "{\"kind\":\"fixed_povm\",\"dim\":" << d.accept_effect.rows() << ",\"effect_fnv\":\""
         << fnv1a64_hex(bytes) << "\"}";
    d.descriptor = desc.str();
    return d;
}

Distinguisher constant_distinguisher(std::int64_t dim) {
    Distinguisher d = fixed_povm_distinguisher(Matrix::Zero(dim, dim), "constant");
    std::ostringstream desc;
    desc << "{\"kind\":\"constant\",\"dim\":" << dim << "}";
    d.descriptor = desc.str();
    return d;
}

std::string to_string(LocalRule rule) {
    switch (rule) {
        case LocalRule::first_bit: return "first_bit";
        case LocalRule::parity: return "parity";
        case LocalRule::all_zeros: return "all_zeros";
        case LocalRule::table: return "table";
    }
    return "?";
}

LocalRule local_rule_from_string(const std::string& name) {
    if (name == "first_bit") return LocalRule::first_bit;
    if (name == "parity") return LocalRule::parity;
    if (name == "all_zeros") return LocalRule::all_zeros;
    if (name == "table") return LocalRule::table;
    throw input_error("unknown local rule: " + name);
}

namespace {

// Single-qubit basis data: outcome projectors and the +/- observable.
struct BasisInfo {
    Matrix proj0;
    Matrix proj1;
    Matrix observable;
};

BasisInfo basis_info(char basis) {
    BasisInfo info;
    Matrix eye = Matrix::Identity(2, 2);
    switch (basis) {
        case 'Z':
            info.observable = pauli_z();
            break;
        case 'X':
            info.observable = pauli_x();
            break;
        case 'Y':
            info.observable = pauli_y();
            break;
        default:
            throw input_error(std::string("unknown measurement basis: ") + basis);
    }
    info.proj0 = 0.5 * (eye + info.observable);
    info.proj1 = 0.5 * (eye - info.observable);
    return info;
}

}  // namespace

Distinguisher local_measure_distinguisher(const std::string& bases, LocalRule rule,
                                          std::uint64_t table_mask) {
    const int n = static_cast<int>(bases.size());
    if (n < 1) throw input_error("local_measure needs at least one basis letter");
    const std::int64_t d = std::int64_t{1} << n;
    check_dim_cap(d, "local_measure_distinguisher");

    Matrix effect;
    switch (rule) {
        case LocalRule::first_bit: {
            // Accept iff the first qubit reads 1.
            effect = basis_info(bases[0]).proj1;
            for (int q = 1; q < n; ++q) effect = kron(effect, Matrix::Identity(2, 2));
            break;
        }
        case LocalRule::parity: {
            // Accept iff the XOR of all outcome bits is 1: (I - O1...On)/2.
            Matrix obs = basis_info(bases[0]).observable;
            for (int q = 1; q < n; ++q) obs = kron(obs, basis_info(bases[q]).observable);
            effect = 0.5 * (Matrix::Identity(d, d) - obs);
            break;
        }
        case LocalRule::all_zeros: {
            effect = basis_info(bases[0]).proj0;
            for (int q = 1; q < n; ++q) effect = kron(effect, basis_info(bases[q]).proj0);
            break;
        }
        case LocalRule::table: {
            if (n > 16) throw resource_error("table rule limited to 16 qubits");
            effect = Matrix::Zero(d, d);
            for (std::int64_t m = 0; m < d; ++m) {
                if (!((table_mask >> m) & 1)) continue;
                Matrix proj = ((m >> (n - 1)) & 1) ? basis_info(bases[0]).proj1
                                                   : basis_info(bases[0]).proj0;
                for (int q = 1; q < n; ++q) {
                    const BasisInfo info = basis_info(bases[q]);
                    proj = kron(proj, ((m >> (n - 1 - q)) & 1) ? info.proj1 : info.proj0);
                }
                effect += proj;
            }
            break;
        }
    }

    Distinguisher dist;
    dist.kind = DistinguisherKind::local_measure;
    dist.accept_effect = std::move(effect);
    dist.description = "local_measure:" + bases + ":" + to_string(rule);
    std::ostringstream desc;
    desc << "{\"kind\":\"local_measure\",\"bases\":\"" << bases << "\",\"rule\":\""
         << to_string(rule) << "\",\"table\":" << table_mask << "}";
    dist.descriptor = desc.str();
    return dist;
}

namespace {

Matrix rotation_gate(double alpha, double beta, double gamma) {
    // Rz(gamma) Ry(beta) Rz(alpha)
    const Complex ea(std::cos(alpha / 2), -std::sin(alpha / 2));
    const Complex eg(std::cos(gamma / 2), -std::sin(gamma / 2));
    const double cb = std::cos(beta / 2);
    const double sb = std::sin(beta / 2);
    Matrix rz_a(2, 2), ry(2, 2), rz_g(2, 2);
    rz_a << ea, 0, 0, std::conj(ea);
    ry << cb, -sb, sb, cb;
    rz_g << eg, 0, 0, std::conj(eg);
    return rz_g * ry * rz_a;
}

Matrix cnot_gate() {
    Matrix g = Matrix::Zero(4, 4);
    g(0, 0) = 1;
    g(1, 1) = 1;
    g(2, 3) = 1;
    g(3, 2) = 1;
    return g;
}

struct CircuitGate {
    Matrix gate;
    std::vector<int> targets;
};

std::vector<CircuitGate> build_random_circuit(int qubits, int depth, std::uint64_t seed) {
    CounterRng rng(seed, 0x63697263ULL);
    std::vector<CircuitGate> gates;
    const double two_pi = 6.283185307179586476925286766559;
    for (int layer = 0; layer < depth; ++layer) {
        for (int q = 0; q < qubits; ++q) {
            const double a = two_pi * rng.next_double();
            const double b = two_pi * rng.next_double();
            const double c = two_pi * rng.next_double();
            gates.push_back({rotation_gate(a, b, c), {q}});
        }
        for (int q = layer % 2; q + 1 < qubits; q += 2) {
            gates.push_back({cnot_gate(), {q, q + 1}});
        }
    }
    return gates;
}

}  // namespace

Distinguisher random_circuit_distinguisher(int qubits, int depth, std::uint64_t seed) {
    if (qubits < 1 || depth < 0) throw input_error("random_circuit needs qubits >= 1, depth >= 0");
    const std::int64_t d = std::int64_t{1} << qubits;
    check_dim_cap(d, "random_circuit_distinguisher");

    // Heisenberg picture: E = U^dag (|1><1|_0 (x) I) U, built by conjugating
    // the final projector backwards through the circuit.
    Matrix effect = Matrix::Zero(d, d);
    const std::int64_t half = d >> 1;
    for (std::int64_t x = half; x < d; ++x) effect(x, x) = 1.0;  // qubit 0 reads 1

    const std::vector<CircuitGate> gates = build_random_circuit(qubits, depth, seed);
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        apply_local_left(effect, it->gate.adjoint(), it->targets, qubits);
        apply_local_right(effect, it->gate, it->targets, qubits);
    }

    Distinguisher dist;
    dist.kind = DistinguisherKind::random_circuit;
    dist.accept_effect = std::move(effect);
    std::ostringstream desc;
    desc << "{\"kind\":\"random_circuit\",\"qubits\":" << qubits << ",\"depth\":" << depth
         << ",\"seed\":" << seed << "}";
    dist.descriptor = desc.str();
    dist.description = "random_circuit:d" + std::to_string(depth) + ":s" + std::to_string(seed);
    return dist;
}

AdvantageReport advantage_exact(const Distinguisher& d, const DensityMatrix& rho,
                                const DensityMatrix& sigma, bool check_td_bound) {
    if (d.dim() != rho.dim() || rho.dim() != sigma.dim()) {
        throw contract_error("advantage_exact: dimension mismatch");
    }
    AdvantageReport rep;
    rep.exact = std::abs((d.accept_effect * (rho.matrix() - sigma.matrix())).trace().real());
    if (check_td_bound) {
        BoundCheck check;
        check.name = "trace_distance";
        check.bound_value = trace_distance(rho, sigma);
        check.satisfied = rep.exact <= check.bound_value + 1e-9;
        rep.bound_checked = check;
    }
    return rep;
}

AdvantageReport advantage_monte_carlo(const Distinguisher& d, const DensityMatrix& rho,
                                      const DensityMatrix& sigma, std::int64_t trials,
                                      std::uint64_t seed) {
    if (trials < 100) throw contract_error("advantage_monte_carlo requires trials >= 100");
    AdvantageReport rep = advantage_exact(d, rho, sigma, /*check_td_bound=*/false);
    const double p_rho =
        std::clamp((d.accept_effect * rho.matrix()).trace().real(), 0.0, 1.0);
    const double p_sigma =
        std::clamp((d.accept_effect * sigma.matrix()).trace().real(), 0.0, 1.0);

    std::int64_t hits_rho = 0;
    std::int64_t hits_sigma = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        CounterRng rng(seed, static_cast<std::uint64_t>(t));
        if (rng.next_double() < p_rho) ++hits_rho;
        if (rng.next_double() < p_sigma) ++hits_sigma;
    }
    const double f_rho = static_cast<double>(hits_rho) / static_cast<double>(trials);
    const double f_sigma = static_cast<double>(hits_sigma) / static_cast<double>(trials);

    EmpiricalEstimate emp;
    emp.estimate = std::abs(f_rho - f_sigma);
    emp.trials = trials;
    emp.seed = seed;
    emp.std_error = std::sqrt((f_rho * (1.0 - f_rho) + f_sigma * (1.0 - f_sigma)) /
                              static_cast<double>(trials));
    emp.within_4_std_error = std::abs(emp.estimate - rep.exact) <= 4.0 * emp.std_error + 1e-15;
    rep.empirical = emp;
    return rep;
}

HalvingReport verify_halving(const EfiInstance& inst, const std::vector<Distinguisher>& ds) {
    HalvingReport rep;
    rep.td_rho = trace_distance(inst.rho0, inst.rho1);
    rep.bound = 0.5 * rep.td_rho;

    const DensityMatrix psi = build_psi(inst);
    const DensityMatrix phi = build_phi(inst);

    rep.all_within = true;
    for (const Distinguisher& d : ds) {
        HalvingRow row;
        row.description = d.description;
        row.advantage = advantage_exact(d, psi, phi, /*check_td_bound=*/false).exact;
        row.within_bound = row.advantage <= rep.bound + 1e-9;
        rep.all_within = rep.all_within && row.within_bound;
        rep.rows.push_back(std::move(row));
    }

    const Distinguisher optimal = helstrom_povm(psi, phi);
    rep.optimal_advantage = advantage_exact(optimal, psi, phi, false).exact;
    rep.optimal_attains_bound = std::abs(rep.optimal_advantage - rep.bound) <= 1e-9;
    return rep;
}

Matrix effective_effect(const Matrix& effect, const Matrix& prefix_state, std::int64_t slot_dim,
                        const Matrix& suffix_state) {
    const std::int64_t dx = prefix_state.rows() > 0 ? prefix_state.rows() : 1;
    const std::int64_t dy = suffix_state.rows() > 0 ? suffix_state.rows() : 1;
    if (effect.rows() != dx * slot_dim * dy) {
        throw contract_error("effective_effect: dimension mismatch");
    }
    Matrix out = Matrix::Zero(slot_dim, slot_dim);
    auto idx = [&](std::int64_t i, std::int64_t a, std::int64_t k) {
        return (i * slot_dim + a) * dy + k;
    };
    for (std::int64_t a = 0; a < slot_dim; ++a) {
        for (std::int64_t b = 0; b < slot_dim; ++b) {
            Complex acc = 0.0;
            for (std::int64_t i = 0; i < dx; ++i) {
                for (std::int64_t j = 0; j < dx; ++j) {
                    const Complex x = (prefix_state.rows() > 0) ? prefix_state(j, i)
                                                                : Complex(i == j ? 1.0 : 0.0);
                    if (x == Complex(0.0, 0.0)) continue;
                    for (std::int64_t k = 0; k < dy; ++k) {
                        for (std::int64_t l = 0; l < dy; ++l) {
                            const Complex y = (suffix_state.rows() > 0)
                                                  ? suffix_state(l, k)
                                                  : Complex(k == l ? 1.0 : 0.0);
                            if (y == Complex(0.0, 0.0)) continue;
                            acc += x * y * effect(idx(i, a, k), idx(j, b, l));
                        }
                    }
                }
            }
            out(a, b) = acc;
        }
    }
    return out;
}

HybridReduction hybrid_reduce(const Distinguisher& many_copy, const FamilyPair& pair, int p) {
    if (p < 1) throw contract_error("hybrid_reduce requires p >= 1");
    const std::int64_t slot_dim = pair.psi.dim();
    std::int64_t full_dim = 1;
    for (int i = 0; i < p; ++i) {
        full_dim *= slot_dim;
        check_dim_cap(full_dim, "hybrid_reduce");
    }
    if (many_copy.dim() != full_dim) {
        throw contract_error("hybrid_reduce: distinguisher dimension does not match p copies");
    }

    // H_i = psi^{(x)(p-i)} (x) phi^{(x)i}
    std::vector<DensityMatrix> hybrids;
    hybrids.reserve(static_cast<size_t>(p) + 1);
    for (int i = 0; i <= p; ++i) {
        DensityMatrix h = (p - i > 0) ? tensor_power(pair.psi, p - i) : tensor_power(pair.phi, p);
        if (p - i > 0 && i > 0) h = tensor(h, tensor_power(pair.phi, i));
        hybrids.push_back(std::move(h));
    }

    HybridReduction out;
    out.sequence.p = p;
    for (int i = 0; i <= p; ++i) {
        out.sequence.hybrid_labels.push_back("psi^" + std::to_string(p - i) + " phi^" +
                                             std::to_string(i));
    }

    double max_adj = 0.0;
    int i_star = 0;
    double sum_adj = 0.0;
    for (int i = 0; i < p; ++i) {
        const double adv =
            std::abs((many_copy.accept_effect *
                      (hybrids[static_cast<size_t>(i)].matrix() -
                       hybrids[static_cast<size_t>(i) + 1].matrix()))
                         .trace()
                         .real());
        out.sequence.per_adjacent_advantage.push_back(adv);
        sum_adj += adv;
        if (adv > max_adj) {
            max_adj = adv;
            i_star = i;
        }
    }
    out.sequence.i_star = i_star;
    out.sequence.sum_adjacent = sum_adj;
    out.sequence.total_advantage =
        std::abs((many_copy.accept_effect *
                  (hybrids.front().matrix() - hybrids.back().matrix()))
                     .trace()
                     .real());
    out.sequence.telescoping_ok =
        out.sequence.total_advantage <= sum_adj + 1e-9 &&
        sum_adj <= static_cast<double>(p) * max_adj + 1e-9;

    // Adjacent hybrids H_{i*}, H_{i*+1} differ at slot p - i* (1-indexed):
    // prefix psi^{(x)(p-i*-1)}, unknown slot, suffix phi^{(x)i*}.
    const int prefix_copies = p - i_star - 1;
    const Matrix prefix =
        prefix_copies > 0 ? tensor_power(pair.psi, prefix_copies).matrix() : Matrix();
    const Matrix suffix = i_star > 0 ? tensor_power(pair.phi, i_star).matrix() : Matrix();
    Matrix eff = effective_effect(many_copy.accept_effect, prefix, slot_dim, suffix);
    out.single_copy = fixed_povm_distinguisher(
        std::move(eff), many_copy.description + ":hybrid-slot" + std::to_string(i_star));
    out.single_copy_advantage =
        advantage_exact(out.single_copy, pair.psi, pair.phi, false).exact;
    return out;
}

}  // namespace pelab
