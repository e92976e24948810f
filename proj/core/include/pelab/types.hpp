#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pelab {

using Complex = std::complex<double>;
// Row-major to match the on-disk dmx-json layout (array of rows).
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Base class for all pelab errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated an operation contract (bad partition, non-Hermitian
/// input, dimension mismatch) or a state invariant failed to hold.
class contract_error : public error {
public:
    using error::error;
};

/// An operation would exceed the configured dimension cap.
class resource_error : public error {
public:
    using error::error;
};

/// Malformed external input (config file, dmx-json file).
class input_error : public error {
public:
    using error::error;
};

/// A family or state does not support the requested capability
/// (e.g. purification of a custom family).
class capability_error : public error {
public:
    using error::error;
};

/// Numerical tolerances used by state validation and spectral routines.
struct Tolerances {
    double hermitian = 1e-10;
    double trace = 1e-10;
    double psd = 1e-9;
    double recon = 1e-9;
    double unitary = 1e-10;
    double degeneracy = 1e-10;  // eigenvalue gap below which subspaces merge
};

/// Largest matrix dimension any operation is allowed to materialize.
/// Exceeding it raises resource_error instead of attempting the allocation.
std::int64_t dim_cap();
void set_dim_cap(std::int64_t cap);

/// Throws resource_error if dim exceeds the active cap.
void check_dim_cap(std::int64_t dim, const std::string& context);

inline bool is_power_of_two(std::int64_t x) { return x > 0 && (x & (x - 1)) == 0; }

/// log2 of a power-of-two dimension.
int qubit_count_for_dim(std::int64_t dim);

/// FNV-1a 64-bit hash, used for reproducibility fingerprints in reports.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace pelab
