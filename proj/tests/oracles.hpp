// Test-only oracles, deliberately independent of the library's linear
// algebra paths: a hand-rolled cyclic Jacobi eigensolver, basis-sandwich
// partial traces, and seeded state generators. Expected values frozen in the
// test files were computed with these.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "pelab/density.hpp"
#include "pelab/ops.hpp"
#include "pelab/rng.hpp"

namespace oracle {

using pelab::Complex;
using pelab::Matrix;
using pelab::Vector;

/// Scoped dimension-cap override; restores the previous cap on exit.
struct DimCapGuard {
    std::int64_t saved;
    explicit DimCapGuard(std::int64_t cap) : saved(pelab::dim_cap()) { pelab::set_dim_cap(cap); }
    ~DimCapGuard() { pelab::set_dim_cap(saved); }
    DimCapGuard(const DimCapGuard&) = delete;
    DimCapGuard& operator=(const DimCapGuard&) = delete;
};

// Cyclic Jacobi diagonalization for Hermitian matrices. Rotations are
// applied until all off-diagonal mass is annihilated; eigenvalues returned
// ascending. Accuracy ~1e-13 on the small matrices used in tests.
inline std::vector<double> jacobi_eigenvalues(Matrix a, int max_sweeps = 60) {
    const std::int64_t n = a.rows();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        }
        if (off < 1e-28) break;
        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Phase to make the pivot real, then a real Jacobi rotation.
                const Complex phase = apq / std::abs(apq);
                const double g = std::abs(apq);
                const double tau = (aqq - app) / (2.0 * g);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Columns: [p q] <- [p q] * R with R = [[c, s*conj(phase)], [-s*phase, c]]
                for (std::int64_t r = 0; r < n; ++r) {
                    const Complex arp = a(r, p);
                    const Complex arq = a(r, q);
                    a(r, p) = c * arp - s * std::conj(phase) * arq;
                    a(r, q) = s * phase * arp + c * arq;
                }
                for (std::int64_t r = 0; r < n; ++r) {
                    const Complex apr = a(p, r);
                    const Complex aqr = a(q, r);
                    a(p, r) = c * apr - s * phase * aqr;
                    a(q, r) = s * std::conj(phase) * apr + c * aqr;
                }
            }
        }
    }
    std::vector<double> evals(static_cast<size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) evals[static_cast<size_t>(i)] = a(i, i).real();
    std::sort(evals.begin(), evals.end());
    return evals;
}

// Trace distance by the sqrt(M^dag M) route: singular values of M are the
// sqrt of the Jacobi eigenvalues of M^dag M. Distinct algebra from the
// library's eigenvalue-sum route.
inline double trace_distance_sqrt_route(const Matrix& rho, const Matrix& sigma) {
    const Matrix m = rho - sigma;
    const Matrix gram = m.adjoint() * m;
    double sum = 0.0;
    for (double v : jacobi_eigenvalues(gram)) {
        if (v > 0.0) sum += std::sqrt(v);
    }
    return 0.5 * sum;
}

// Partial trace over the B side by explicit basis sandwiches
// (I (x) <k|) rho (I (x) |k>), for a trailing B block of `b_qubits`.
inline Matrix partial_trace_b_sandwich(const Matrix& rho, int b_qubits) {
    const std::int64_t db = std::int64_t{1} << b_qubits;
    const std::int64_t da = rho.rows() / db;
    Matrix out = Matrix::Zero(da, da);
    for (std::int64_t k = 0; k < db; ++k) {
        for (std::int64_t i = 0; i < da; ++i) {
            for (std::int64_t j = 0; j < da; ++j) {
                out(i, j) += rho(i * db + k, j * db + k);
            }
        }
    }
    return out;
}

// Seeded random pure state (Gaussian amplitudes, normalized).
inline Vector random_pure(std::int64_t dim, pelab::CounterRng& rng) {
    Vector v(dim);
    for (std::int64_t i = 0; i < dim; ++i) {
        v(i) = Complex(rng.next_gaussian(), rng.next_gaussian());
    }
    v.normalize();
    return v;
}

// Seeded random density matrix: Wishart G G^dag / Tr with `rank` columns.
inline pelab::DensityMatrix random_density(std::int64_t dim, int rank, pelab::CounterRng& rng) {
    Matrix g(dim, rank);
    for (std::int64_t i = 0; i < dim; ++i) {
        for (int j = 0; j < rank; ++j) {
            g(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
        }
    }
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    m = 0.5 * (m + m.adjoint().eval());
    return pelab::DensityMatrix::make(std::move(m));
}

// Full-rank variant (eigenvalues bounded away from zero) for fidelity tests.
inline pelab::DensityMatrix random_density_full_rank(std::int64_t dim, pelab::CounterRng& rng) {
    pelab::DensityMatrix w = random_density(dim, static_cast<int>(dim), rng);
    Matrix m = 0.9 * w.matrix() + 0.1 * Matrix::Identity(dim, dim) / static_cast<double>(dim);
    return pelab::DensityMatrix::make(std::move(m));
}

// Random Hermitian with entries of order 1.
inline Matrix random_hermitian(std::int64_t dim, pelab::CounterRng& rng) {
    Matrix m(dim, dim);
    for (std::int64_t i = 0; i < dim; ++i) {
        for (std::int64_t j = 0; j < dim; ++j) {
            m(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
        }
    }
    return 0.5 * (m + m.adjoint().eval());
}

}  // namespace oracle
