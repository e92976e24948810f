// pelab: config-driven experiments on pseudo-entangled state families.
//
// Subcommands: construct | distill | distinguish | amplify | report
// Exit codes: 0 success, 2 config/input error, 3 resource cap, 4 invariant
// violation.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pelab/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;
    std::int64_t dim_cap = -1;
    std::int64_t trials = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config JSON");
    cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", flags.seed, "RNG seed (overrides config)");
    cmd->add_option("--dim-cap", flags.dim_cap, "matrix dimension cap (overrides config)");
    cmd->add_option("--trials", flags.trials, "Monte-Carlo trials (overrides config)");
}

pelab::ExperimentConfig load_config(const CommonFlags& flags) {
    pelab::ExperimentConfig config;
    if (!flags.config_path.empty()) {
        config = pelab::ExperimentConfig::from_file(flags.config_path);
    } else {
        config.distinguishers.push_back({});  // helstrom by default
        pelab::DistinguisherSpec local;
        local.kind = "local_measure";
        config.distinguishers.push_back(local);
        pelab::DistinguisherSpec circuit;
        circuit.kind = "random_circuit";
        circuit.seed = 7;
        config.distinguishers.push_back(circuit);
        pelab::DistinguisherSpec constant;
        constant.kind = "constant";
        config.distinguishers.push_back(constant);
    }
    // Precedence: flags > file > defaults.
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.dim_cap >= 0) config.dim_cap_value = flags.dim_cap;
    if (flags.trials >= 0) config.trials = flags.trials;
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"density-matrix experiments: EFI pairs to pseudo-entanglement"};
    app.require_subcommand(1);

    CommonFlags flags;
    CLI::App* construct = app.add_subcommand("construct", "build psi/phi families per lambda");
    CLI::App* distill = app.add_subcommand("distill", "run distillation protocols");
    CLI::App* distinguish =
        app.add_subcommand("distinguish", "advantage tables and hybrid checks");
    CLI::App* amplify = app.add_subcommand("amplify", "gap amplification diagnostics");
    CLI::App* report = app.add_subcommand("report", "merge sections into report.json");
    for (CLI::App* cmd : {construct, distill, distinguish, amplify, report}) {
        add_common(cmd, flags);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const pelab::ExperimentConfig config = load_config(flags);
        if (construct->parsed()) {
            const auto section = pelab::run_construct(config);
            std::cout << pelab::render_construct_table(section);
            std::cout << "wrote " << config.output_dir << "/construct.json\n";
        } else if (distill->parsed()) {
            const auto section = pelab::run_distill(config);
            std::cout << pelab::render_distill_table(section);
            std::cout << "wrote " << config.output_dir << "/distill.json\n";
        } else if (distinguish->parsed()) {
            const auto section = pelab::run_distinguish(config);
            std::cout << pelab::render_distinguish_table(section);
            std::cout << "wrote " << config.output_dir << "/distinguish.json\n";
        } else if (amplify->parsed()) {
            const auto section = pelab::run_amplify(config);
            std::cout << pelab::render_amplify_table(section);
            std::cout << "wrote " << config.output_dir << "/amplify.json\n";
        } else if (report->parsed()) {
            pelab::run_report(config);
            std::cout << "wrote " << config.output_dir << "/report.json\n";
        }
    } catch (const pelab::input_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const pelab::capability_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const pelab::resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const pelab::contract_error& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
