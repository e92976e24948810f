#include "pelab/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pelab {

namespace {

// Bit of qubit q inside a basis index on n qubits (qubit 0 most significant).
inline std::int64_t qubit_bit(std::int64_t index, int q, int n) {
    return (index >> (n - 1 - q)) & 1;
}

inline std::int64_t with_qubit_bit(std::int64_t index, int q, int n, std::int64_t bit) {
    const std::int64_t mask = std::int64_t{1} << (n - 1 - q);
    return bit ? (index | mask) : (index & ~mask);
}

// Composes a full basis index from the bits of `sub` spread over `positions`
// (first listed position takes the most significant bit of sub).
inline std::int64_t scatter_bits(std::int64_t sub, const std::vector<int>& positions, int n) {
    std::int64_t out = 0;
    const int k = static_cast<int>(positions.size());
    for (int a = 0; a < k; ++a) {
        const std::int64_t bit = (sub >> (k - 1 - a)) & 1;
        out = with_qubit_bit(out, positions[static_cast<size_t>(a)], n, bit);
    }
    return out;
}

std::vector<int> complement_of(const std::vector<int>& qs, int n) {
    std::vector<char> in(static_cast<size_t>(n), 0);
    for (int q : qs) {
        if (q < 0 || q >= n) throw contract_error("qubit index out of range");
        if (in[static_cast<size_t>(q)]) throw contract_error("duplicate qubit index");
        in[static_cast<size_t>(q)] = 1;
    }
    std::vector<int> rest;
    for (int q = 0; q < n; ++q) {
        if (!in[static_cast<size_t>(q)]) rest.push_back(q);
    }
    return rest;
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
    check_dim_cap(a.rows() * b.rows(), "kron");
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector kron(const Vector& a, const Vector& b) {
    check_dim_cap(a.size() * b.size(), "kron");
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix::unchecked(kron(a.matrix(), b.matrix()));
}

PureStateVector tensor(const PureStateVector& a, const PureStateVector& b) {
    return PureStateVector(kron(a.amplitudes(), b.amplitudes()));
}

DensityMatrix tensor_power(const DensityMatrix& rho, int n) {
    if (n < 1) throw contract_error("tensor_power requires n >= 1");
    DensityMatrix out = rho;
    for (int i = 1; i < n; ++i) out = tensor(out, rho);
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const Bipartition& part, Side keep) {
    part.validate(rho.qubits());
    const std::vector<int>& kept = (keep == Side::A) ? part.qubits_a : part.qubits_b;
    const std::vector<int>& traced = (keep == Side::A) ? part.qubits_b : part.qubits_a;
    const int n = rho.qubits();
    const int nk = static_cast<int>(kept.size());
    const int nt = static_cast<int>(traced.size());
    const std::int64_t dk = std::int64_t{1} << nk;
    const std::int64_t dt = std::int64_t{1} << nt;

    Matrix out = Matrix::Zero(dk, dk);
    for (std::int64_t i = 0; i < dk; ++i) {
        const std::int64_t base_i = scatter_bits(i, kept, n);
        for (std::int64_t j = 0; j < dk; ++j) {
            const std::int64_t base_j = scatter_bits(j, kept, n);
            Complex sum = 0.0;
            for (std::int64_t t = 0; t < dt; ++t) {
                const std::int64_t env = scatter_bits(t, traced, n);
                sum += rho.matrix()(base_i | env, base_j | env);
            }
            out(i, j) = sum;
        }
    }
    return DensityMatrix::unchecked(std::move(out));
}

DensityMatrix partial_trace_out(const DensityMatrix& rho, const std::vector<int>& traced) {
    Bipartition part;
    part.qubits_a = complement_of(traced, rho.qubits());
    part.qubits_b = traced;
    return partial_trace(rho, part, Side::A);
}

Matrix partial_transpose(const Matrix& rho, const Bipartition& part) {
    const int n = qubit_count_for_dim(rho.rows());
    part.validate(n);
    const std::int64_t d = rho.rows();
    Matrix out(d, d);
    for (std::int64_t x = 0; x < d; ++x) {
        for (std::int64_t y = 0; y < d; ++y) {
            std::int64_t xs = x;
            std::int64_t ys = y;
            for (int q : part.qubits_b) {
                const std::int64_t bx = qubit_bit(x, q, n);
                const std::int64_t by = qubit_bit(y, q, n);
                xs = with_qubit_bit(xs, q, n, by);
                ys = with_qubit_bit(ys, q, n, bx);
            }
            out(xs, ys) = rho(x, y);
        }
    }
    return out;
}

DensityMatrix permute_qubits(const DensityMatrix& rho, const std::vector<int>& new_order) {
    const int n = rho.qubits();
    if (static_cast<int>(new_order.size()) != n) {
        throw contract_error("permutation size mismatch");
    }
    (void)complement_of(new_order, n);  // validates it is a permutation
    const std::int64_t d = rho.dim();
    std::vector<std::int64_t> map(static_cast<size_t>(d));
    for (std::int64_t x = 0; x < d; ++x) {
        std::int64_t old_index = 0;
        for (int j = 0; j < n; ++j) {
            old_index = with_qubit_bit(old_index, new_order[static_cast<size_t>(j)], n,
                                       qubit_bit(x, j, n));
        }
        map[static_cast<size_t>(x)] = old_index;
    }
    Matrix out(d, d);
    for (std::int64_t x = 0; x < d; ++x) {
        for (std::int64_t y = 0; y < d; ++y) {
            out(x, y) = rho.matrix()(map[static_cast<size_t>(x)], map[static_cast<size_t>(y)]);
        }
    }
    return DensityMatrix::unchecked(std::move(out));
}

Matrix qubit_permutation_matrix(const std::vector<int>& new_order, int total_qubits) {
    if (static_cast<int>(new_order.size()) != total_qubits) {
        throw contract_error("permutation size mismatch");
    }
    (void)complement_of(new_order, total_qubits);
    const std::int64_t d = std::int64_t{1} << total_qubits;
    check_dim_cap(d, "qubit_permutation_matrix");
    Matrix p = Matrix::Zero(d, d);
    for (std::int64_t old_index = 0; old_index < d; ++old_index) {
        std::int64_t new_index = 0;
        for (int j = 0; j < total_qubits; ++j) {
            new_index = with_qubit_bit(
                new_index, j, total_qubits,
                qubit_bit(old_index, new_order[static_cast<size_t>(j)], total_qubits));
        }
        p(new_index, old_index) = 1.0;
    }
    return p;
}

Matrix expand_unitary(const Matrix& u, const std::vector<int>& targets, int total_qubits) {
    const int k = static_cast<int>(targets.size());
    if (u.rows() != (std::int64_t{1} << k) || u.rows() != u.cols()) {
        throw contract_error("unitary dimension does not match target count");
    }
    const std::vector<int> rest = complement_of(targets, total_qubits);
    const std::int64_t d = std::int64_t{1} << total_qubits;
    const std::int64_t dk = u.rows();
    const std::int64_t dr = std::int64_t{1} << rest.size();
    check_dim_cap(d, "expand_unitary");

    Matrix out = Matrix::Zero(d, d);
    for (std::int64_t r = 0; r < dr; ++r) {
        const std::int64_t env = scatter_bits(r, rest, total_qubits);
        for (std::int64_t i = 0; i < dk; ++i) {
            const std::int64_t row = env | scatter_bits(i, targets, total_qubits);
            for (std::int64_t j = 0; j < dk; ++j) {
                const std::int64_t col = env | scatter_bits(j, targets, total_qubits);
                out(row, col) = u(i, j);
            }
        }
    }
    return out;
}

namespace {

// Offsets of the 2^k embedded basis indices for a fixed setting of the
// non-target bits; `base` iterates over indices with all target bits clear.
struct LocalIndexing {
    std::vector<std::int64_t> strides;
    std::vector<std::int64_t> offsets;

    LocalIndexing(const std::vector<int>& targets, int n) {
        const int k = static_cast<int>(targets.size());
        strides.resize(static_cast<size_t>(k));
        for (int a = 0; a < k; ++a) {
            strides[static_cast<size_t>(a)] = std::int64_t{1}
                                              << (n - 1 - targets[static_cast<size_t>(a)]);
        }
        offsets.assign(static_cast<size_t>(std::int64_t{1} << k), 0);
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(offsets.size()); ++i) {
            for (int a = 0; a < k; ++a) {
                if ((i >> (k - 1 - a)) & 1) {
                    offsets[static_cast<size_t>(i)] += strides[static_cast<size_t>(a)];
                }
            }
        }
    }

    bool is_base(std::int64_t x) const {
        for (std::int64_t s : strides) {
            if (x & s) return false;
        }
        return true;
    }
};

}  // namespace

void apply_local_left(Matrix& m, const Matrix& op, const std::vector<int>& targets,
                      int total_qubits) {
    const LocalIndexing ix(targets, total_qubits);
    const std::int64_t dk = static_cast<std::int64_t>(ix.offsets.size());
    if (op.rows() != dk || op.cols() != dk) {
        throw contract_error("apply_local_left: operator dimension mismatch");
    }
    std::vector<Complex> scratch(static_cast<size_t>(dk));
    for (std::int64_t base = 0; base < m.rows(); ++base) {
        if (!ix.is_base(base)) continue;
        for (std::int64_t col = 0; col < m.cols(); ++col) {
            for (std::int64_t i = 0; i < dk; ++i) {
                scratch[static_cast<size_t>(i)] = m(base + ix.offsets[static_cast<size_t>(i)], col);
            }
            for (std::int64_t i = 0; i < dk; ++i) {
                Complex acc = 0.0;
                for (std::int64_t j = 0; j < dk; ++j) {
                    acc += op(i, j) * scratch[static_cast<size_t>(j)];
                }
                m(base + ix.offsets[static_cast<size_t>(i)], col) = acc;
            }
        }
    }
}

void apply_local_right(Matrix& m, const Matrix& op, const std::vector<int>& targets,
                       int total_qubits) {
    const LocalIndexing ix(targets, total_qubits);
    const std::int64_t dk = static_cast<std::int64_t>(ix.offsets.size());
    if (op.rows() != dk || op.cols() != dk) {
        throw contract_error("apply_local_right: operator dimension mismatch");
    }
    std::vector<Complex> scratch(static_cast<size_t>(dk));
    for (std::int64_t base = 0; base < m.cols(); ++base) {
        if (!ix.is_base(base)) continue;
        for (std::int64_t row = 0; row < m.rows(); ++row) {
            for (std::int64_t j = 0; j < dk; ++j) {
                scratch[static_cast<size_t>(j)] = m(row, base + ix.offsets[static_cast<size_t>(j)]);
            }
            for (std::int64_t j = 0; j < dk; ++j) {
                Complex acc = 0.0;
                for (std::int64_t i = 0; i < dk; ++i) {
                    acc += scratch[static_cast<size_t>(i)] * op(i, j);
                }
                m(row, base + ix.offsets[static_cast<size_t>(j)]) = acc;
            }
        }
    }
}

void require_unitary(const Matrix& u, const Tolerances& tol) {
    if (u.rows() != u.cols()) throw contract_error("unitary must be square");
    const double defect =
        (u * u.adjoint() - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    if (defect > tol.unitary) {
        throw contract_error("matrix not unitary within tolerance, defect " +
                             std::to_string(defect));
    }
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                            const std::vector<int>& targets, const Tolerances& tol) {
    require_unitary(u, tol);
    Matrix m = rho.matrix();
    apply_local_left(m, u, targets, rho.qubits());
    apply_local_right(m, u.adjoint(), targets, rho.qubits());
    return DensityMatrix::unchecked(std::move(m));
}

PureStateVector apply_unitary(const PureStateVector& v, const Matrix& u,
                              const std::vector<int>& targets, const Tolerances& tol) {
    require_unitary(u, tol);
    Matrix column = v.amplitudes();
    apply_local_left(column, u, targets, v.qubits());
    return PureStateVector(Vector(column.col(0)));
}

std::vector<double> measure_computational(const DensityMatrix& rho, const std::vector<int>& qubits) {
    const int n = rho.qubits();
    const int k = static_cast<int>(qubits.size());
    (void)complement_of(qubits, n);  // validates indices
    const std::int64_t outcomes = std::int64_t{1} << k;
    std::vector<double> probs(static_cast<size_t>(outcomes), 0.0);
    for (std::int64_t x = 0; x < rho.dim(); ++x) {
        std::int64_t m = 0;
        for (int a = 0; a < k; ++a) {
            m = (m << 1) | qubit_bit(x, qubits[static_cast<size_t>(a)], n);
        }
        probs[static_cast<size_t>(m)] += rho.matrix()(x, x).real();
    }
    return probs;
}

std::int64_t sample_computational(const DensityMatrix& rho, const std::vector<int>& qubits,
                                  CounterRng& rng) {
    const std::vector<double> probs = measure_computational(rho, qubits);
    const double u = rng.next_double();
    double acc = 0.0;
    for (size_t m = 0; m < probs.size(); ++m) {
        acc += probs[m];
        if (u < acc) return static_cast<std::int64_t>(m);
    }
    return static_cast<std::int64_t>(probs.size()) - 1;
}

}  // namespace pelab
