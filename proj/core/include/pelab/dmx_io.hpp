#pragma once

#include <string>

#include "pelab/density.hpp"

namespace pelab {

/// dmx-json: { "qubits": n, "re": [[...]], "im": [[...]] }, row-major,
/// numbers at 17 significant digits.
std::string to_dmx_json(const DensityMatrix& rho);

/// Parses dmx-json text; validates the density-matrix invariants.
DensityMatrix from_dmx_json(const std::string& text, const Tolerances& tol = {});

void write_dmx_file(const std::string& path, const DensityMatrix& rho);
DensityMatrix read_dmx_file(const std::string& path, const Tolerances& tol = {});

/// Formats a double with 17 significant digits (shortest form of %.17g).
std::string format_g17(double v);

}  // namespace pelab
