#include "pelab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pelab/dmx_io.hpp"
#include "pelab/entdiag.hpp"
#include "pelab/families.hpp"
#include "pelab/locc.hpp"
#include "pelab/ops.hpp"
#include "pelab/spectral.hpp"

namespace pelab {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

DistinguisherSpec DistinguisherSpec::from_json(const json& j) {
    DistinguisherSpec s;
    s.kind = j.value("kind", std::string("helstrom"));
    s.bases = j.value("bases", std::string("Z"));
    s.rule = j.value("rule", std::string("first_bit"));
    s.table = j.value("table", std::uint64_t{0});
    s.depth = j.value("depth", 4);
    s.seed = j.value("seed", std::uint64_t{0});
    return s;
}

json DistinguisherSpec::to_json() const {
    json j;
    j["kind"] = kind;
    if (kind == "local_measure") {
        j["bases"] = bases;
        j["rule"] = rule;
        if (rule == "table") j["table"] = table;
    }
    if (kind == "random_circuit") {
        j["depth"] = depth;
        j["seed"] = seed;
    }
    return j;
}

namespace {

EfiSpec efi_spec_from_json(const json& j) {
    EfiSpec s;
    s.family = efi_family_from_string(j.value("family", std::string("orthogonal")));
    s.lambda = j.value("lambda", 2);
    s.n_qubits = j.value("n_qubits", 1);
    s.theta = j.value("theta", 0.5235987755982988);  // pi/6 default for the angle family
    s.register_qubits = j.value("register_qubits", 0);
    s.seed = j.value("seed", std::uint64_t{0});
    s.rho0_path = j.value("rho0", std::string());
    s.rho1_path = j.value("rho1", std::string());
    return s;
}

json efi_spec_to_json(const EfiSpec& s) {
    json j;
    j["family"] = to_string(s.family);
    j["lambda"] = s.lambda;
    j["n_qubits"] = s.n_qubits;
    if (s.family == EfiFamilyKind::angle) j["theta"] = s.theta;
    if (s.family == EfiFamilyKind::keyed_subset) {
        j["register_qubits"] = s.register_qubits;
        j["seed"] = s.seed;
    }
    if (s.family == EfiFamilyKind::custom) {
        j["rho0"] = s.rho0_path;
        j["rho1"] = s.rho1_path;
    }
    return j;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw input_error("write failed: " + path);
}

void write_section(const ExperimentConfig& config, const std::string& name, const json& section) {
    fs::create_directories(config.output_dir);
    write_text((fs::path(config.output_dir) / (name + ".json")).string(), section.dump(1) + "\n");
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return format_g17(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void write_csv(const ExperimentConfig& config, const std::string& name,
               const std::vector<std::string>& columns, const json& rows) {
    std::ostringstream out;
    for (size_t c = 0; c < columns.size(); ++c) {
        if (c) out << ",";
        out << columns[c];
    }
    out << "\n";
    for (const json& row : rows) {
        for (size_t c = 0; c < columns.size(); ++c) {
            if (c) out << ",";
            if (row.contains(columns[c])) out << csv_cell(row[columns[c]]);
        }
        out << "\n";
    }
    fs::create_directories(config.output_dir);
    write_text((fs::path(config.output_dir) / (name + ".csv")).string(), out.str());
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("efi")) c.efi = efi_spec_from_json(j["efi"]);
    if (j.contains("lambda_range")) c.lambda_range = j["lambda_range"].get<std::vector<int>>();
    if (j.contains("amplify_q")) c.amplify_q = j["amplify_q"].get<std::vector<int>>();
    if (j.contains("copies_p")) c.copies_p = j["copies_p"].get<std::vector<int>>();
    if (j.contains("distinguishers")) {
        c.distinguishers.clear();
        for (const json& d : j["distinguishers"]) {
            c.distinguishers.push_back(DistinguisherSpec::from_json(d));
        }
    }
    c.trials = j.value("trials", std::int64_t{10000});
    c.seed = j.value("seed", std::uint64_t{1});
    c.dim_cap_value = j.value("dim_cap", std::int64_t{1} << 14);
    c.output_dir = j.value("output_dir", std::string("out"));
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw input_error(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

json ExperimentConfig::to_json() const {
    json j;
    j["efi"] = efi_spec_to_json(efi);
    j["lambda_range"] = lambda_range;
    j["amplify_q"] = amplify_q;
    j["copies_p"] = copies_p;
    json ds = json::array();
    for (const DistinguisherSpec& d : distinguishers) ds.push_back(d.to_json());
    j["distinguishers"] = ds;
    j["trials"] = trials;
    j["seed"] = seed;
    j["dim_cap"] = dim_cap_value;
    j["output_dir"] = output_dir;
    return j;
}

std::string ExperimentConfig::config_hash() const { return fnv1a64_hex(to_json().dump()); }

void ExperimentConfig::validate() const {
    efi.validate();
    if (lambda_range.empty()) throw input_error("config: lambda_range must be nonempty");
    if (amplify_q.empty()) throw input_error("config: amplify_q must be nonempty");
    if (copies_p.empty()) throw input_error("config: copies_p must be nonempty");
    for (int l : lambda_range) {
        if (l < 1) throw input_error("config: lambda values must be >= 1");
    }
    for (int q : amplify_q) {
        if (q < 1) throw input_error("config: amplify_q values must be >= 1");
    }
    for (int p : copies_p) {
        if (p < 1) throw input_error("config: copies_p values must be >= 1");
    }
    if (trials < 100) throw input_error("config: trials must be >= 100");
    if (dim_cap_value < 4) throw input_error("config: dim_cap must be >= 4");
}

void ExperimentConfig::apply_limits() const { set_dim_cap(dim_cap_value); }

Distinguisher compile_distinguisher(const DistinguisherSpec& spec, const DensityMatrix& rho,
                                    const DensityMatrix& sigma) {
    const int qubits = rho.qubits();
    if (spec.kind == "helstrom") return helstrom_povm(rho, sigma);
    if (spec.kind == "constant") return constant_distinguisher(rho.dim());
    if (spec.kind == "local_measure") {
        std::string bases;
        for (int q = 0; q < qubits; ++q) {
            bases.push_back(spec.bases[static_cast<size_t>(q) % spec.bases.size()]);
        }
        return local_measure_distinguisher(bases, local_rule_from_string(spec.rule), spec.table);
    }
    if (spec.kind == "random_circuit") {
        return random_circuit_distinguisher(qubits, spec.depth, spec.seed);
    }
    throw input_error("unknown distinguisher kind: " + spec.kind);
}

json meta_block(const ExperimentConfig& config) {
    json m;
    m["config"] = config.to_json();
    m["config_hash"] = config.config_hash();
    m["seed"] = config.seed;
    m["dim_cap"] = config.dim_cap_value;
    json tol;
    tol["hermitian"] = config.tol.hermitian;
    tol["trace"] = config.tol.trace;
    tol["psd"] = config.tol.psd;
    tol["recon"] = config.tol.recon;
    m["tolerances"] = tol;
    json versions;
    versions["pelab"] = "0.1.0";
    versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION);
    versions["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    m["versions"] = versions;
    return m;
}

namespace {

EfiSpec spec_for_lambda(const ExperimentConfig& config, int lambda) {
    EfiSpec s = config.efi;
    s.lambda = lambda;
    return s;
}

json cut_to_json(const Bipartition& cut) {
    json j;
    j["a"] = cut.qubits_a;
    j["b"] = cut.qubits_b;
    return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// construct

json run_construct(const ExperimentConfig& config) {
    config.validate();
    config.apply_limits();
    fs::create_directories(config.output_dir);

    json rows = json::array();
    for (int lambda : config.lambda_range) {
        const EfiSpec spec = spec_for_lambda(config, lambda);
        const EfiInstance inst = make_instance(spec);
        const FamilyPair pair = build_pair(inst);

        const double td_rho = trace_distance(inst.rho0, inst.rho1);
        const double td_pair = trace_distance(pair.psi, pair.phi);
        const PptReport ppt = ppt_check(pair.psi, pair.cut);
        const double ln_psi = log_negativity(pair.psi, pair.cut);
        const double ln_phi = log_negativity(pair.phi, pair.cut);
        const FarnessReport farness = farness_report(inst);

        const std::string psi_file = "psi_lambda" + std::to_string(lambda) + ".dmx.json";
        const std::string phi_file = "phi_lambda" + std::to_string(lambda) + ".dmx.json";
        const std::string manifest_file = "family_lambda" + std::to_string(lambda) + ".json";
        write_dmx_file((fs::path(config.output_dir) / psi_file).string(), pair.psi);
        write_dmx_file((fs::path(config.output_dir) / phi_file).string(), pair.phi);

        json manifest;
        manifest["lambda"] = lambda;
        manifest["family"] = to_string(spec.family);
        manifest["hardness"] = spec.hardness_tag();
        manifest["n_qubits"] = spec.n_qubits;
        manifest["cut"] = cut_to_json(pair.cut);
        manifest["td_rho"] = td_rho;
        manifest["td_psi_phi"] = td_pair;
        manifest["psi_file"] = psi_file;
        manifest["phi_file"] = phi_file;
        write_text((fs::path(config.output_dir) / manifest_file).string(),
                   manifest.dump(1) + "\n");

        json row;
        row["lambda"] = lambda;
        row["family"] = to_string(spec.family);
        row["n_qubits"] = spec.n_qubits;
        row["hardness"] = spec.hardness_tag();
        row["td_rho"] = td_rho;
        row["td_psi_phi"] = td_pair;
        row["half_td_rho"] = 0.5 * td_rho;
        row["halving_abs_error"] = std::abs(td_pair - 0.5 * td_rho);
        row["ppt_psi"] = ppt.is_ppt;
        row["ppt_psi_min_eigenvalue"] = ppt.min_eigenvalue;
        row["log_negativity_psi"] = ln_psi;
        row["log_negativity_phi"] = ln_phi;
        row["farness_td"] = farness.td;
        row["farness_bound"] = farness.bound_1_minus_2_pow_minus_lambda;
        row["farness_satisfied"] = farness.satisfied;
        row["psi_file"] = psi_file;
        row["phi_file"] = phi_file;
        row["manifest_file"] = manifest_file;
        rows.push_back(std::move(row));
    }

    json section;
    section["section"] = "construct";
    section["meta"] = meta_block(config);
    section["rows"] = rows;
    write_section(config, "construct", section);
    write_csv(config, "construct",
              {"lambda", "family", "n_qubits", "td_rho", "td_psi_phi", "half_td_rho",
               "halving_abs_error", "ppt_psi", "ppt_psi_min_eigenvalue", "log_negativity_psi",
               "log_negativity_phi"},
              rows);
    return section;
}

// ---------------------------------------------------------------------------
// distill

json run_distill(const ExperimentConfig& config) {
    config.validate();
    config.apply_limits();
    fs::create_directories(config.output_dir);

    json rows = json::array();
    for (int lambda : config.lambda_range) {
        const EfiSpec spec = spec_for_lambda(config, lambda);
        const EfiInstance inst = make_instance(spec);
        const double td_rho = trace_distance(inst.rho0, inst.rho1);

        {
            const DistillResult res = run_distill_phi(inst);
            json row;
            row["lambda"] = lambda;
            row["mode"] = "helstrom";
            row["td_rho"] = td_rho;
            row["fidelity"] = res.transcript.fidelity;
            row["predicted_fidelity"] = res.predicted_fidelity;
            row["epsilon"] = res.certificate.epsilon;
            row["epr_distilled"] = res.certificate.value;
            row["epr_consumed"] = res.transcript.epr_count;
            row["efficient"] = res.certificate.efficient;
            row["gate_bound"] = res.certificate.gate_bound;
            const std::string transcript_file =
                "distill_transcript_lambda" + std::to_string(lambda) + "_helstrom.jsonl";
            write_text((fs::path(config.output_dir) / transcript_file).string(),
                       res.transcript.to_json_lines());
            row["transcript_file"] = transcript_file;
            rows.push_back(std::move(row));
        }

        if (inst.purification) {
            const KeyedFamily kf = build_keyed(inst);
            const KeyedDistillResult res = run_distill_phi_keyed(kf);
            json row;
            row["lambda"] = lambda;
            row["mode"] = "keyed";
            row["td_rho"] = td_rho;
            row["fidelity"] = res.transcript.fidelity;
            row["predicted_fidelity"] = 1.0 - 0.5 * res.overlap_reference;
            row["epsilon"] = res.certificate.epsilon;
            row["epr_distilled"] = res.certificate.value;
            row["epr_consumed"] = res.transcript.epr_count;
            row["efficient"] = res.certificate.efficient;
            row["gate_bound"] = res.certificate.gate_bound;
            row["accept_given_b0"] = res.accept_given_b0;
            row["accept_given_b1"] = res.accept_given_b1;
            row["overlap_reference"] = res.overlap_reference;
            const std::string transcript_file =
                "distill_transcript_lambda" + std::to_string(lambda) + "_keyed.jsonl";
            write_text((fs::path(config.output_dir) / transcript_file).string(),
                       res.transcript.to_json_lines());
            row["transcript_file"] = transcript_file;
            rows.push_back(std::move(row));
        }

        // Tensor-amplified element pair with 2*lambda copies: distillation
        // error drops below 2^-lambda once the element pair is far enough.
        {
            const int copies = 2 * lambda;
            json row;
            row["lambda"] = lambda;
            row["mode"] = "amplified";
            row["copies"] = copies;
            const std::int64_t amp_qubits =
                static_cast<std::int64_t>(inst.rho0.qubits()) * copies;
            if (amp_qubits + 2 > 62 ||
                (std::int64_t{1} << (amp_qubits + 2)) > dim_cap()) {
                row["skipped"] = "dimension cap";
            } else {
                const EfiInstance amped = amplify_statistical(inst, copies);
                const DistillResult res = run_distill_phi(amped);
                row["td_rho"] = trace_distance(amped.rho0, amped.rho1);
                row["fidelity"] = res.transcript.fidelity;
                row["epsilon"] = res.certificate.epsilon;
                row["bound_1_minus_2_pow_minus_lambda"] = 1.0 - std::pow(2.0, -lambda);
                row["satisfied"] =
                    res.transcript.fidelity + 1e-12 >= 1.0 - std::pow(2.0, -lambda);
            }
            rows.push_back(std::move(row));
        }
    }

    json section;
    section["section"] = "distill";
    section["meta"] = meta_block(config);
    section["rows"] = rows;
    write_section(config, "distill", section);
    write_csv(config, "distill",
              {"lambda", "mode", "td_rho", "fidelity", "predicted_fidelity", "epsilon",
               "epr_distilled", "epr_consumed", "efficient", "accept_given_b0",
               "accept_given_b1", "overlap_reference", "copies", "satisfied"},
              rows);
    return section;
}

// ---------------------------------------------------------------------------
// distinguish

namespace {

json advantage_row(const ExperimentConfig& config, int lambda, const std::string& target,
                   const Distinguisher& d, const DensityMatrix& rho, const DensityMatrix& sigma,
                   std::uint64_t mc_stream) {
    const AdvantageReport exact = advantage_exact(d, rho, sigma);
    const AdvantageReport mc =
        advantage_monte_carlo(d, rho, sigma, config.trials, config.seed ^ mc_stream);
    json row;
    row["lambda"] = lambda;
    row["target"] = target;
    row["distinguisher"] = d.description;
    row["descriptor_hash"] = d.descriptor_hash();
    row["exact"] = exact.exact;
    row["td"] = exact.bound_checked->bound_value;
    row["within_td"] = exact.bound_checked->satisfied;
    row["mc_estimate"] = mc.empirical->estimate;
    row["mc_std_error"] = mc.empirical->std_error;
    row["mc_within_4se"] = mc.empirical->within_4_std_error;
    row["trials"] = config.trials;
    return row;
}

double fit_log2_slope(const std::vector<std::pair<int, double>>& points, double* intercept) {
    // Least squares on log2(adv) vs lambda over positive advantages.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& [x, y] : points) {
        if (y <= 1e-15) continue;
        const double ly = std::log2(y);
        sx += x;
        sy += ly;
        sxx += static_cast<double>(x) * x;
        sxy += x * ly;
        ++m;
    }
    if (m < 2) {
        if (intercept) *intercept = 0.0;
        return 0.0;
    }
    const double denom = m * sxx - sx * sx;
    const double slope = (denom != 0.0) ? (m * sxy - sx * sy) / denom : 0.0;
    if (intercept) *intercept = (sy - slope * sx) / m;
    return slope;
}

}  // namespace

json run_distinguish(const ExperimentConfig& config) {
    config.validate();
    config.apply_limits();

    json advantage_rows = json::array();
    json halving_rows = json::array();

    for (int lambda : config.lambda_range) {
        const EfiSpec spec = spec_for_lambda(config, lambda);
        const EfiInstance inst = make_instance(spec);
        const FamilyPair pair = build_pair(inst);

        std::vector<Distinguisher> on_rho;
        std::vector<Distinguisher> on_pair;
        for (const DistinguisherSpec& ds : config.distinguishers) {
            on_rho.push_back(compile_distinguisher(ds, inst.rho0, inst.rho1));
            on_pair.push_back(compile_distinguisher(ds, pair.psi, pair.phi));
        }

        std::uint64_t stream = 0x1000 + static_cast<std::uint64_t>(lambda) * 64;
        for (const Distinguisher& d : on_rho) {
            advantage_rows.push_back(
                advantage_row(config, lambda, "rho_pair", d, inst.rho0, inst.rho1, ++stream));
        }
        const double half_td = 0.5 * trace_distance(inst.rho0, inst.rho1);
        for (const Distinguisher& d : on_pair) {
            json row = advantage_row(config, lambda, "family_pair", d, pair.psi, pair.phi,
                                     ++stream);
            row["bound_half_td"] = half_td;
            row["within_half_td"] = row["exact"].get<double>() <= half_td + 1e-9;
            advantage_rows.push_back(std::move(row));
        }

        const HalvingReport halving = verify_halving(inst, on_pair);
        json hrow;
        hrow["lambda"] = lambda;
        hrow["td_rho"] = halving.td_rho;
        hrow["bound"] = halving.bound;
        hrow["optimal_advantage"] = halving.optimal_advantage;
        hrow["optimal_attains_bound"] = halving.optimal_attains_bound;
        hrow["all_within"] = halving.all_within;
        json hs = json::array();
        for (const HalvingRow& r : halving.rows) {
            json e;
            e["distinguisher"] = r.description;
            e["advantage"] = r.advantage;
            e["within_bound"] = r.within_bound;
            hs.push_back(std::move(e));
        }
        hrow["rows"] = hs;
        halving_rows.push_back(std::move(hrow));
    }

    // Hybrid telescoping check; the states do not depend on lambda, so this
    // runs once per copy count.
    json hybrid_rows = json::array();
    {
        const EfiSpec spec = spec_for_lambda(config, config.lambda_range.front());
        const EfiInstance inst = make_instance(spec);
        const FamilyPair pair = build_pair(inst);
        for (int p : config.copies_p) {
            std::int64_t full_dim = 1;
            bool fits = true;
            for (int i = 0; i < p; ++i) {
                full_dim *= pair.psi.dim();
                if (full_dim > dim_cap()) {
                    fits = false;
                    break;
                }
            }
            if (!fits) {
                json row;
                row["p"] = p;
                row["skipped"] = "dimension cap";
                hybrid_rows.push_back(std::move(row));
                continue;
            }
            const DensityMatrix psi_p = tensor_power(pair.psi, p);
            const DensityMatrix phi_p = tensor_power(pair.phi, p);
            std::vector<Distinguisher> many;
            many.push_back(helstrom_povm(psi_p, phi_p));
            many.push_back(random_circuit_distinguisher(psi_p.qubits(), 4,
                                                        config.seed ^ 0xc1c1c1ULL));
            std::string bases(static_cast<size_t>(psi_p.qubits()), 'Z');
            many.push_back(local_measure_distinguisher(bases, LocalRule::parity));
            many.push_back(constant_distinguisher(psi_p.dim()));

            for (const Distinguisher& d : many) {
                const HybridReduction red = hybrid_reduce(d, pair, p);
                json row;
                row["p"] = p;
                row["distinguisher"] = d.description;
                row["total_advantage"] = red.sequence.total_advantage;
                row["sum_adjacent"] = red.sequence.sum_adjacent;
                const double max_adj =
                    *std::max_element(red.sequence.per_adjacent_advantage.begin(),
                                      red.sequence.per_adjacent_advantage.end());
                row["p_times_max_adjacent"] = p * max_adj;
                row["i_star"] = red.sequence.i_star;
                row["adjacent"] = red.sequence.per_adjacent_advantage;
                row["telescoping_ok"] = red.sequence.telescoping_ok;
                row["single_copy_advantage"] = red.single_copy_advantage;
                row["embedding_consistent"] =
                    std::abs(red.single_copy_advantage - max_adj) <= 1e-9;
                hybrid_rows.push_back(std::move(row));
            }
        }
    }

    // Descriptive decay profile: how restricted single-qubit readout loses
    // ground as the keyed mixtures grow with lambda. Never a pass/fail proof.
    json decay;
    {
        json points = json::array();
        std::vector<std::pair<int, double>> restricted_points;
        for (int lambda : config.lambda_range) {
            EfiSpec spec = spec_for_lambda(config, lambda);
            if (spec.family == EfiFamilyKind::keyed_subset) {
                spec.n_qubits = std::min(lambda + 1, 6);
                spec.register_qubits = 0;
            }
            // elements only; the profile never touches purifications
            const DensityMatrix r0 = generate(spec, 0);
            const DensityMatrix r1 = generate(spec, 1);
            std::string bases(static_cast<size_t>(r0.qubits()), 'Z');
            const Distinguisher restricted =
                local_measure_distinguisher(bases, LocalRule::first_bit);
            const double adv_restricted =
                advantage_exact(restricted, r0, r1, false).exact;
            const double td = trace_distance(r0, r1);
            json pt;
            pt["lambda"] = lambda;
            pt["n_qubits"] = r0.qubits();
            pt["advantage_restricted"] = adv_restricted;
            pt["advantage_optimal"] = td;
            points.push_back(std::move(pt));
            restricted_points.emplace_back(lambda, adv_restricted);
        }
        double intercept = 0.0;
        const double slope = fit_log2_slope(restricted_points, &intercept);
        decay["points"] = points;
        decay["fitted_log2_slope"] = slope;
        decay["fitted_log2_intercept"] = intercept;
        double c2 = 0.0;
        for (const auto& [lambda, adv] : restricted_points) {
            c2 = std::max(c2, adv * std::pow(2.0, lambda));
        }
        decay["envelope_c_times_2_pow_minus_lambda"] = c2;
        decay["note"] = "descriptive only; finite data cannot certify asymptotics";
    }

    json section;
    section["section"] = "distinguish";
    section["meta"] = meta_block(config);
    section["advantage_rows"] = advantage_rows;
    section["halving"] = halving_rows;
    section["hybrid"] = hybrid_rows;
    section["decay"] = decay;
    write_section(config, "distinguish", section);
    write_csv(config, "advantage",
              {"lambda", "target", "distinguisher", "exact", "td", "within_td", "bound_half_td",
               "within_half_td", "mc_estimate", "mc_std_error", "mc_within_4se", "trials"},
              advantage_rows);
    write_csv(config, "hybrid",
              {"p", "distinguisher", "total_advantage", "sum_adjacent", "p_times_max_adjacent",
               "i_star", "telescoping_ok", "single_copy_advantage", "embedding_consistent"},
              hybrid_rows);
    return section;
}

// ---------------------------------------------------------------------------
// amplify

json run_amplify(const ExperimentConfig& config) {
    config.validate();
    config.apply_limits();

    json rows = json::array();
    for (int lambda : config.lambda_range) {
        const EfiSpec spec = spec_for_lambda(config, lambda);
        const EfiInstance inst = make_instance(spec);
        const FamilyPair pair = build_pair(inst);
        const double ln_phi = log_negativity(pair.phi, pair.cut);

        for (int q : config.amplify_q) {
            const AmplifiedFamily amped = amplify(pair, q);
            const CertifySummary cert = certify(amped);
            const GapReport gap = gap_report(cert, amped);
            json row;
            row["lambda"] = lambda;
            row["q"] = q;
            row["component_lambdas"] = amped.component_lambdas;
            row["gap"] = gap.gap.value();
            row["cost_upper"] = gap.cost_upper;
            row["distill_lower"] = gap.distill_lower.value();
            row["ppt_psi"] = gap.ppt_psi;
            row["log_negativity_psi"] = gap.log_negativity_psi;
            row["epsilon_q"] = cert.distill.epsilon;
            row["per_copy_epsilon"] = cert.per_copy_epsilon;
            row["q_times_per_copy_epsilon"] = q * cert.per_copy_epsilon;
            row["bernoulli_ok"] = cert.bernoulli_ok;
            row["log_negativity_phi_bar"] = gap.log_negativity_phi.value();
            row["q_times_log_negativity_phi"] = q * ln_phi;
            row["materialized"] = !amped.analytic;
            if (amped.phi_bar) {
                row["additivity_abs_error"] =
                    std::abs(gap.log_negativity_phi.value() - q * ln_phi);
            }
            if (amped.td_exact) {
                row["td_psi_phi_bar"] = *amped.td_exact;
            } else {
                row["td_lower"] = amped.td_lower;
                row["td_upper"] = amped.td_upper;
            }
            rows.push_back(std::move(row));
        }
    }

    json section;
    section["section"] = "amplify";
    section["meta"] = meta_block(config);
    section["rows"] = rows;
    write_section(config, "amplify", section);
    write_csv(config, "amplify",
              {"lambda", "q", "gap", "epsilon_q", "per_copy_epsilon", "bernoulli_ok",
               "log_negativity_phi_bar", "q_times_log_negativity_phi", "additivity_abs_error",
               "materialized"},
              rows);
    return section;
}

// ---------------------------------------------------------------------------
// report

json run_report(const ExperimentConfig& config) {
    config.validate();
    const char* names[] = {"construct", "distill", "distinguish", "amplify"};
    json sections;
    std::vector<std::string> missing;
    for (const char* name : names) {
        const fs::path p = fs::path(config.output_dir) / (std::string(name) + ".json");
        std::ifstream in(p, std::ios::binary);
        if (!in) {
            missing.push_back(name);
            continue;
        }
        try {
            json j;
            in >> j;
            sections[name] = std::move(j);
        } catch (const json::exception& e) {
            throw input_error("section " + std::string(name) + " unreadable: " + e.what());
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (size_t i = 0; i < missing.size(); ++i) {
            if (i) list += ", ";
            list += missing[i];
        }
        throw input_error("missing sections in " + config.output_dir + ": " + list +
                          " (run the corresponding subcommands first)");
    }

    json report;
    report["meta"] = meta_block(config);
    report["sections"] = sections;
    write_text((fs::path(config.output_dir) / "report.json").string(), report.dump(1) + "\n");
    return report;
}

// ---------------------------------------------------------------------------
// Text rendering

namespace {

std::string fixed(double v, int prec = 9) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(prec) << v;
    return out.str();
}

}  // namespace

std::string render_construct_table(const json& section) {
    std::ostringstream out;
    out << "lambda  family         TD(rho0,rho1)  TD(psi,phi)    TD/2           |err|\n";
    for (const json& row : section["rows"]) {
        out << std::left << std::setw(8) << row["lambda"].get<int>() << std::setw(15)
            << row["family"].get<std::string>() << std::setw(15)
            << fixed(row["td_rho"].get<double>()) << std::setw(15)
            << fixed(row["td_psi_phi"].get<double>()) << std::setw(15)
            << fixed(row["half_td_rho"].get<double>())
            << format_g17(row["halving_abs_error"].get<double>()) << "\n";
    }
    return out.str();
}

std::string render_distill_table(const json& section) {
    std::ostringstream out;
    out << "lambda  mode       fidelity       epsilon\n";
    for (const json& row : section["rows"]) {
        out << std::left << std::setw(8) << row["lambda"].get<int>() << std::setw(11)
            << row["mode"].get<std::string>();
        if (row.contains("fidelity")) {
            out << std::setw(15) << fixed(row["fidelity"].get<double>())
                << format_g17(row.value("epsilon", 0.0));
        } else {
            out << "skipped: " << row.value("skipped", std::string("?"));
        }
        out << "\n";
    }
    return out.str();
}

std::string render_distinguish_table(const json& section) {
    std::ostringstream out;
    out << "lambda  target       distinguisher                    exact          within\n";
    for (const json& row : section["advantage_rows"]) {
        out << std::left << std::setw(8) << row["lambda"].get<int>() << std::setw(13)
            << row["target"].get<std::string>() << std::setw(33)
            << row["distinguisher"].get<std::string>() << std::setw(15)
            << fixed(row["exact"].get<double>())
            << (row["within_td"].get<bool>() ? "yes" : "NO") << "\n";
    }
    return out.str();
}

std::string render_amplify_table(const json& section) {
    std::ostringstream out;
    out << "lambda  q   gap  epsilon_q      E_N(phi_bar)   q*E_N(phi)\n";
    for (const json& row : section["rows"]) {
        out << std::left << std::setw(8) << row["lambda"].get<int>() << std::setw(4)
            << row["q"].get<int>() << std::setw(5) << row["gap"].get<int>() << std::setw(15)
            << fixed(row["epsilon_q"].get<double>()) << std::setw(15)
            << fixed(row["log_negativity_phi_bar"].get<double>())
            << fixed(row["q_times_log_negativity_phi"].get<double>()) << "\n";
    }
    return out.str();
}

}  // namespace pelab
