#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pelab/adversary.hpp"
#include "pelab/efi.hpp"

namespace pelab {

/// Config-level distinguisher descriptor, compiled per target dimension.
struct DistinguisherSpec {
    std::string kind = "helstrom";  // helstrom | constant | local_measure | random_circuit
    std::string bases = "Z";        // local_measure: letters, repeated cyclically
    std::string rule = "first_bit";
    std::uint64_t table = 0;
    int depth = 4;
    std::uint64_t seed = 0;

    static DistinguisherSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct ExperimentConfig {
    EfiSpec efi;
    std::vector<int> lambda_range{2, 3, 4};
    std::vector<int> amplify_q{1, 2, 3};
    std::vector<int> copies_p{2, 3};
    std::vector<DistinguisherSpec> distinguishers;
    std::int64_t trials = 10000;
    std::uint64_t seed = 1;
    std::int64_t dim_cap_value = std::int64_t{1} << 14;
    std::string output_dir = "out";
    Tolerances tol;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::json to_json() const;

    /// FNV-1a64 of the canonical (key-sorted) serialization.
    std::string config_hash() const;

    void validate() const;

    /// Applies dim_cap_value to the process-wide cap.
    void apply_limits() const;
};

/// Compiles a descriptor against a concrete system size. The helstrom kind
/// needs the target pair itself.
Distinguisher compile_distinguisher(const DistinguisherSpec& spec, const DensityMatrix& rho,
                                    const DensityMatrix& sigma);

/// Metadata block (config hash, seed, tolerances, dim cap, versions)
/// embedded in every section and report.
nlohmann::json meta_block(const ExperimentConfig& config);

/// Subcommand engines. Each writes its section JSON (+ CSVs, + state files
/// for construct) into output_dir and returns the section document.
nlohmann::json run_construct(const ExperimentConfig& config);
nlohmann::json run_distill(const ExperimentConfig& config);
nlohmann::json run_distinguish(const ExperimentConfig& config);
nlohmann::json run_amplify(const ExperimentConfig& config);

/// Merges the four section files into report.json; throws input_error
/// listing any missing section.
nlohmann::json run_report(const ExperimentConfig& config);

/// Plain-text summary tables for the CLI.
std::string render_construct_table(const nlohmann::json& section);
std::string render_distill_table(const nlohmann::json& section);
std::string render_distinguish_table(const nlohmann::json& section);
std::string render_amplify_table(const nlohmann::json& section);

}  // namespace pelab
