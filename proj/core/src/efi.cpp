#include "pelab/efi.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "pelab/dmx_io.hpp"
#include "pelab/ops.hpp"
#include "pelab/rng.hpp"
#include "pelab/spectral.hpp"

namespace pelab {

std::string to_string(EfiFamilyKind kind) {
    switch (kind) {
        case EfiFamilyKind::orthogonal: return "orthogonal";
        case EfiFamilyKind::angle: return "angle";
        case EfiFamilyKind::keyed_subset: return "keyed_subset";
        case EfiFamilyKind::custom: return "custom";
    }
    return "?";
}

EfiFamilyKind efi_family_from_string(const std::string& name) {
    if (name == "orthogonal") return EfiFamilyKind::orthogonal;
    if (name == "angle") return EfiFamilyKind::angle;
    if (name == "keyed_subset") return EfiFamilyKind::keyed_subset;
    if (name == "custom") return EfiFamilyKind::custom;
    throw input_error("unknown EFI family: " + name);
}

void EfiSpec::validate() const {
    if (lambda < 1) throw input_error("EFI spec: lambda must be >= 1");
    if (n_qubits < 1) throw input_error("EFI spec: n_qubits must be >= 1");
    if (family == EfiFamilyKind::angle) {
        const double half_pi = 1.5707963267948966;
        if (!(theta > 0.0 && theta <= half_pi + 1e-12)) {
            throw input_error("EFI spec: angle theta must lie in (0, pi/2]");
        }
    }
    if (family == EfiFamilyKind::keyed_subset && register_qubits > 0 &&
        register_qubits < n_qubits - 1) {
        throw input_error("EFI spec: keyed_subset key register too small for mixture rank");
    }
    if (family == EfiFamilyKind::custom && (rho0_path.empty() || rho1_path.empty())) {
        throw input_error("EFI spec: custom family requires both state file paths");
    }
}

double EfiSpec::declared_td_bound() const {
    switch (family) {
        case EfiFamilyKind::orthogonal: return 1.0;
        case EfiFamilyKind::angle: return std::sin(theta);
        case EfiFamilyKind::keyed_subset: return 1.0;
        case EfiFamilyKind::custom: return 0.0;
    }
    return 0.0;
}

std::string EfiSpec::hardness_tag() const {
    return family == EfiFamilyKind::keyed_subset ? "hard-for-restricted-distinguishers"
                                                 : "transparent";
}

int EfiSpec::key_qubits() const {
    switch (family) {
        case EfiFamilyKind::orthogonal:
        case EfiFamilyKind::angle:
            return 1;
        case EfiFamilyKind::keyed_subset:
            return register_qubits > 0 ? register_qubits : std::max(1, n_qubits - 1);
        case EfiFamilyKind::custom:
            throw capability_error("custom family has no purification");
    }
    return 1;
}

std::int64_t EfiSpec::generator_gate_bound() const {
    const std::int64_t n = n_qubits;
    switch (family) {
        case EfiFamilyKind::orthogonal: return n + 1;
        case EfiFamilyKind::angle: return n + 1;
        case EfiFamilyKind::keyed_subset: {
            // Dense state preparation: one two-level rotation per amplitude.
            const int total = n_qubits + key_qubits();
            return std::int64_t{1} << total;
        }
        case EfiFamilyKind::custom:
            throw capability_error("custom family has no generator circuit");
    }
    return 0;
}

namespace {

int parity_of(std::int64_t x) { return std::popcount(static_cast<std::uint64_t>(x)) & 1; }

// Seeded Fisher-Yates permutation of {0, ..., size-1}.
std::vector<std::int64_t> seeded_permutation(std::int64_t size, std::uint64_t seed) {
    std::vector<std::int64_t> perm(static_cast<size_t>(size));
    std::iota(perm.begin(), perm.end(), std::int64_t{0});
    CounterRng rng(seed, /*stream=*/0x6b657973ULL);
    for (std::int64_t i = size - 1; i > 0; --i) {
        const auto j = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
        std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
    }
    return perm;
}

// Basis states assigned to bit b by the seeded permutation, ascending.
std::vector<std::int64_t> keyed_subset_members(const EfiSpec& spec, int b) {
    const std::int64_t d = std::int64_t{1} << spec.n_qubits;
    const std::vector<std::int64_t> perm = seeded_permutation(d, spec.seed);
    std::vector<std::int64_t> members;
    for (std::int64_t x = 0; x < d; ++x) {
        if (parity_of(x) == b) members.push_back(perm[static_cast<size_t>(x)]);
    }
    std::sort(members.begin(), members.end());
    return members;
}

Vector angle_element_vector(const EfiSpec& spec, int b) {
    const std::int64_t d = std::int64_t{1} << spec.n_qubits;
    Vector v = Vector::Zero(d);
    if (b == 0) {
        v(0) = 1.0;
    } else {
        v(0) = std::cos(spec.theta);
        v(std::int64_t{1} << (spec.n_qubits - 1)) = std::sin(spec.theta);  // qubit 0 set
    }
    return v;
}

}  // namespace

DensityMatrix generate(const EfiSpec& spec, int b) {
    spec.validate();
    if (b != 0 && b != 1) throw contract_error("EFI bit must be 0 or 1");
    const std::int64_t d = std::int64_t{1} << spec.n_qubits;
    check_dim_cap(d, "generate");
    switch (spec.family) {
        case EfiFamilyKind::orthogonal:
            return DensityMatrix::basis_state(spec.n_qubits, b == 0 ? 0 : d - 1);
        case EfiFamilyKind::angle:
            return DensityMatrix::from_pure(angle_element_vector(spec, b));
        case EfiFamilyKind::keyed_subset: {
            const std::vector<std::int64_t> members = keyed_subset_members(spec, b);
            Matrix m = Matrix::Zero(d, d);
            const double w = 1.0 / static_cast<double>(members.size());
            for (std::int64_t y : members) m(y, y) = w;
            return DensityMatrix::unchecked(std::move(m));
        }
        case EfiFamilyKind::custom:
            return read_dmx_file(b == 0 ? spec.rho0_path : spec.rho1_path);
    }
    throw contract_error("unreachable family kind");
}

PurifiedState purified_generate(const EfiSpec& spec, int b) {
    spec.validate();
    if (!spec.supports_purification()) {
        throw capability_error("family " + to_string(spec.family) + " has no purification");
    }
    const int n = spec.n_qubits;
    const int k = spec.key_qubits();
    const std::int64_t de = std::int64_t{1} << n;
    const std::int64_t dk = std::int64_t{1} << k;
    check_dim_cap(de * dk, "purified_generate");

    Vector chi = Vector::Zero(de * dk);
    switch (spec.family) {
        case EfiFamilyKind::orthogonal: {
            const std::int64_t e_index = (b == 0) ? 0 : de - 1;
            chi(e_index * dk) = 1.0;  // |b..b>_E |0>_K
            break;
        }
        case EfiFamilyKind::angle: {
            const Vector v = angle_element_vector(spec, b);
            for (std::int64_t e = 0; e < de; ++e) chi(e * dk) = v(e);
            break;
        }
        case EfiFamilyKind::keyed_subset: {
            const std::vector<std::int64_t> members = keyed_subset_members(spec, b);
            if (static_cast<std::int64_t>(members.size()) > dk) {
                throw contract_error("key register narrower than mixture rank");
            }
            const double amp = 1.0 / std::sqrt(static_cast<double>(members.size()));
            for (size_t j = 0; j < members.size(); ++j) {
                chi(members[j] * dk + static_cast<std::int64_t>(j)) = amp;
            }
            break;
        }
        case EfiFamilyKind::custom:
            break;  // unreachable, guarded above
    }

    PurifiedState out{PureStateVector(std::move(chi)), {}, {}};
    for (int q = 0; q < n; ++q) out.e_qubits.push_back(q);
    for (int q = n; q < n + k; ++q) out.k_qubits.push_back(q);
    return out;
}

EfiInstance make_instance(const EfiSpec& spec) {
    spec.validate();
    EfiInstance inst{generate(spec, 0), generate(spec, 1), std::nullopt, spec};
    if (spec.supports_purification()) {
        const std::int64_t purified_dim = std::int64_t{1}
                                          << (spec.n_qubits + spec.key_qubits());
        if (purified_dim <= dim_cap()) {
            const PurifiedState p0 = purified_generate(spec, 0);
            const PurifiedState p1 = purified_generate(spec, 1);
            Purification pur;
            pur.u0 = state_preparation_unitary(p0.chi.amplitudes());
            pur.u1 = state_preparation_unitary(p1.chi.amplitudes());
            pur.e_qubits = p0.e_qubits;
            pur.k_qubits = p0.k_qubits;
            inst.purification = std::move(pur);
        }
        // otherwise the instance stays usable for unkeyed paths; callers that
        // need the coherent key go through purified_generate and get the
        // resource error
    }
    return inst;
}

double td_amplification_bound(double td_single, int n) {
    return 1.0 - std::exp(-static_cast<double>(n) * td_single / 2.0);
}

EfiInstance amplify_statistical(const EfiInstance& inst, int n) {
    if (n < 1) throw contract_error("amplify_statistical requires n >= 1");
    if (n == 1) return inst;
    const int base_qubits = inst.rho0.qubits();
    const std::int64_t new_dim = std::int64_t{1} << (static_cast<std::int64_t>(base_qubits) * n);
    check_dim_cap(new_dim, "amplify_statistical");

    EfiInstance out{tensor_power(inst.rho0, n), tensor_power(inst.rho1, n), std::nullopt,
                    inst.spec};
    out.spec.n_qubits = base_qubits * n;

    // Purification of the tensor power, re-laid-out so all E registers come
    // before all K registers; kept only while the unitary stays small enough
    // to materialize.
    if (inst.purification) {
        const auto& pur = *inst.purification;
        const int per_copy = static_cast<int>(pur.e_qubits.size() + pur.k_qubits.size());
        const int ne = static_cast<int>(pur.e_qubits.size());
        const int total = per_copy * n;
        const std::int64_t pdim = std::int64_t{1} << total;
        if (total <= 10 && pdim <= dim_cap()) {
            Matrix u0 = pur.u0;
            Matrix u1 = pur.u1;
            for (int c = 1; c < n; ++c) {
                u0 = kron(u0, pur.u0);
                u1 = kron(u1, pur.u1);
            }
            // new_order[j] = old (interleaved) position of the qubit at blocked slot j
            std::vector<int> new_order;
            for (int c = 0; c < n; ++c) {
                for (int q = 0; q < ne; ++q) new_order.push_back(c * per_copy + q);
            }
            for (int c = 0; c < n; ++c) {
                for (int q = ne; q < per_copy; ++q) new_order.push_back(c * per_copy + q);
            }
            const Matrix perm = qubit_permutation_matrix(new_order, total);
            Purification amped;
            amped.u0 = perm * u0;
            amped.u1 = perm * u1;
            for (int q = 0; q < ne * n; ++q) amped.e_qubits.push_back(q);
            for (int q = ne * n; q < total; ++q) amped.k_qubits.push_back(q);
            out.purification = std::move(amped);
        }
    }
    return out;
}

FarnessReport farness_report(const EfiInstance& inst) {
    FarnessReport rep;
    rep.td = trace_distance(inst.rho0, inst.rho1);
    rep.bound_1_minus_2_pow_minus_lambda = 1.0 - std::pow(2.0, -inst.spec.lambda);
    rep.satisfied = rep.td + 1e-12 >= rep.bound_1_minus_2_pow_minus_lambda;
    return rep;
}

Matrix state_preparation_unitary(const Vector& target) {
    const std::int64_t d = target.size();
    const double nrm = target.norm();
    if (std::abs(nrm - 1.0) > 1e-8) throw contract_error("target state not normalized");

    Vector e0 = Vector::Zero(d);
    e0(0) = 1.0;
    if ((target - e0).norm() <= 1e-15) return Matrix::Identity(d, d);

    // Householder mapping target <-> -e^{i phi} e0, then a global phase so
    // that column 0 is exactly the target direction.
    const Complex beta = target(0);
    const Complex phase = (std::abs(beta) > 0.0) ? beta / std::abs(beta) : Complex(1.0, 0.0);
    Vector u = target + phase * e0;
    const double unorm2 = u.squaredNorm();
    Matrix h = Matrix::Identity(d, d) - (2.0 / unorm2) * (u * u.adjoint());
    return (-phase) * h;
}

}  // namespace pelab
