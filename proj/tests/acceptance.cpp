// Acceptance suite: one pass/fail line per criterion; exit code counts the
// failures. Runs with the dimension cap at 2^10 so everything stays dense,
// exact, and fast on a small machine.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "pelab/adversary.hpp"
#include "pelab/entdiag.hpp"
#include "pelab/experiment.hpp"
#include "pelab/families.hpp"
#include "pelab/locc.hpp"
#include "pelab/ops.hpp"
#include "pelab/spectral.hpp"

using namespace pelab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

struct NamedInstance {
    std::string name;
    EfiInstance inst;
};

std::vector<NamedInstance> acceptance_instances(int lambda = 4) {
    auto mk = [&](EfiFamilyKind family, double theta, int n, std::uint64_t seed) {
        EfiSpec s;
        s.family = family;
        s.theta = theta;
        s.n_qubits = n;
        s.seed = seed;
        s.lambda = lambda;
        return make_instance(s);
    };
    return {
        {"orthogonal", mk(EfiFamilyKind::orthogonal, 0.0, 1, 0)},
        {"angle(pi/6)", mk(EfiFamilyKind::angle, 0.5235987755982988, 1, 0)},
        {"angle(pi/4)", mk(EfiFamilyKind::angle, 0.78539816339744831, 1, 0)},
        {"angle(pi/3)", mk(EfiFamilyKind::angle, 1.0471975511965977, 1, 0)},
        {"keyed_subset(n=2,seed=20250808)", mk(EfiFamilyKind::keyed_subset, 0.0, 2, 20250808)},
    };
}

void criterion_1_halving() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (const NamedInstance& ni : acceptance_instances()) {
        const FamilyPair pair = build_pair(ni.inst);
        const double td_rho = trace_distance(ni.inst.rho0, ni.inst.rho1);
        const double td_pair = trace_distance(pair.psi, pair.phi);
        const double err = std::abs(td_pair - 0.5 * td_rho);
        if (err > 1e-9) {
            ok = false;
            detail += ni.name + " err=" + std::to_string(err) + " ";
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 5.0) {
        ok = false;
        detail += "runtime " + std::to_string(secs) + "s >= 5s";
    }
    std::ostringstream d;
    d << "5 instances, |TD(psi,phi) - TD(rho)/2| <= 1e-9, " << std::fixed << secs << "s";
    report(1, "halving identity", ok, detail.empty() ? d.str() : detail);
}

void criterion_2_psi_separable() {
    bool ok = true;
    std::string detail;
    for (const NamedInstance& ni : acceptance_instances()) {
        const FamilyPair pair = build_pair(ni.inst);
        const PptReport ppt = ppt_check(pair.psi, pair.cut);
        if (ppt.min_eigenvalue < -1e-9) {
            ok = false;
            detail += ni.name + " PT min eig " + std::to_string(ppt.min_eigenvalue) + " ";
        }
        const PrepareResult prep = run_prepare_psi(ni.inst);
        if (prep.certificate.value != 0 || prep.transcript.epr_count != 0) {
            ok = false;
            detail += ni.name + " nonzero EPR cost ";
        }
        if (prep.transcript.fidelity < 1.0 - 1e-10) {
            ok = false;
            detail += ni.name + " fidelity " + std::to_string(prep.transcript.fidelity) + " ";
        }
    }
    report(2, "psi separability and zero-cost preparation", ok, detail);
}

void criterion_3_distill() {
    bool ok = true;
    std::string detail;
    for (const NamedInstance& ni : acceptance_instances()) {
        const double td = trace_distance(ni.inst.rho0, ni.inst.rho1);
        const DistillResult res = run_distill_phi(ni.inst);
        const double predicted = 1.0 - 0.5 * (1.0 - td);
        if (std::abs(res.transcript.fidelity - predicted) > 1e-9) {
            ok = false;
            detail += ni.name + " fidelity deviates ";
        }
        if (ni.name == "orthogonal" && std::abs(res.transcript.fidelity - 1.0) > 1e-12) {
            ok = false;
            detail += "orthogonal not exact ";
        }
    }
    // amplified instances: 2*lambda copies push the error below 2^-lambda
    int amplified_checked = 0;
    for (const NamedInstance& ni : acceptance_instances()) {
        for (int lambda : {2, 3, 4}) {
            const int copies = 2 * lambda;
            const std::int64_t qubits =
                static_cast<std::int64_t>(ni.inst.rho0.qubits()) * copies + 2;
            if (qubits > 62 || (std::int64_t{1} << qubits) > dim_cap()) continue;
            const EfiInstance amped = amplify_statistical(ni.inst, copies);
            const DistillResult res = run_distill_phi(amped);
            const double bound = 1.0 - std::pow(2.0, -lambda);
            ++amplified_checked;
            if (res.transcript.fidelity + 1e-12 < bound) {
                ok = false;
                detail += ni.name + " lambda=" + std::to_string(lambda) + " fid " +
                          std::to_string(res.transcript.fidelity) + " < " +
                          std::to_string(bound) + " ";
            }
        }
    }
    if (amplified_checked < 8) {
        ok = false;
        detail += "too few amplified cases fit the cap ";
    }
    report(3, "distillation fidelity (exact and amplified)", ok,
           detail.empty() ? std::to_string(amplified_checked) + " amplified cases" : detail);
}

void criterion_4_helstrom_optimality() {
    bool ok = true;
    std::string detail;
    CounterRng rng(0xACC4, 1);
    int checked = 0;
    for (int round = 0; round < 50; ++round) {
        const std::int64_t dim = (round % 3 == 0) ? 2 : ((round % 3 == 1) ? 4 : 8);
        const DensityMatrix rho = oracle::random_density(dim, static_cast<int>(dim), rng);
        const DensityMatrix sig =
            oracle::random_density(dim, 1 + static_cast<int>(rng.next_below(4)), rng);
        const double td = trace_distance(rho, sig);
        const Distinguisher opt = helstrom_povm(rho, sig);
        const double adv = advantage_exact(opt, rho, sig, false).exact;
        if (std::abs(adv - td) > 1e-10) {
            ok = false;
            detail += "pair " + std::to_string(round) + " |adv-td|=" +
                      std::to_string(std::abs(adv - td)) + " ";
        }
        // library sweep: nothing beats the optimum
        const int qubits = qubit_count_for_dim(dim);
        std::vector<Distinguisher> library;
        library.push_back(constant_distinguisher(dim));
        library.push_back(
            local_measure_distinguisher(std::string(static_cast<size_t>(qubits), 'Z'),
                                        LocalRule::first_bit));
        library.push_back(
            local_measure_distinguisher(std::string(static_cast<size_t>(qubits), 'X'),
                                        LocalRule::parity));
        library.push_back(random_circuit_distinguisher(qubits, 4, 100 + round));
        library.push_back(random_circuit_distinguisher(qubits, 6, 200 + round));
        for (const Distinguisher& d : library) {
            if (advantage_exact(d, rho, sig, false).exact > adv + 1e-9) {
                ok = false;
                detail += "library beat helstrom on pair " + std::to_string(round) + " ";
            }
        }
        ++checked;
    }
    report(4, "Helstrom optimality on randomized pairs", ok,
           detail.empty() ? std::to_string(checked) + " pairs" : detail);
}

void criterion_5_keyed() {
    bool ok = true;
    std::string detail;
    for (const NamedInstance& ni : acceptance_instances()) {
        if (!ni.inst.purification) continue;
        const KeyedFamily kf = build_keyed(ni.inst);
        const KeyedDistillResult res = run_distill_phi_keyed(kf);
        if (std::abs(res.accept_given_b0 - 1.0) > 1e-12) {
            ok = false;
            detail += ni.name + " Pr[0|b=0]=" + std::to_string(res.accept_given_b0) + " ";
        }
        if (std::abs(res.accept_given_b1 - res.overlap_reference) > 1e-10) {
            ok = false;
            detail += ni.name + " overlap mismatch ";
        }
        if (ni.name == "orthogonal" && res.accept_given_b1 > 1e-12) {
            ok = false;
            detail += "orthogonal false-accept nonzero ";
        }
    }
    report(5, "keyed efficient distillation", ok, detail);
}

void criterion_6_td_amplification() {
    bool ok = true;
    std::string detail;
    int checked = 0;
    for (const NamedInstance& ni : acceptance_instances()) {
        const double td1 = trace_distance(ni.inst.rho0, ni.inst.rho1);
        const int per_copy = ni.inst.rho0.qubits();
        for (int n = 1;; ++n) {
            const std::int64_t qubits = static_cast<std::int64_t>(per_copy) * n;
            if (qubits > 62 || (std::int64_t{1} << qubits) > dim_cap()) break;
            const EfiInstance amped = amplify_statistical(ni.inst, n);
            const double td_n = trace_distance(amped.rho0, amped.rho1);
            const double bound = td_amplification_bound(td1, n);
            ++checked;
            if (td_n + 1e-12 < bound) {
                ok = false;
                detail += ni.name + " n=" + std::to_string(n) + " td=" + std::to_string(td_n) +
                          " < " + std::to_string(bound) + " ";
            }
        }
    }
    report(6, "trace-distance amplification bound", ok,
           detail.empty() ? std::to_string(checked) + " tensor powers, zero violations"
                          : detail);
}

void criterion_7_hybrid() {
    bool ok = true;
    std::string detail;
    int checked = 0;
    for (const NamedInstance& ni :
         {acceptance_instances()[0], acceptance_instances()[2]}) {  // orthogonal, angle(pi/4)
        const FamilyPair pair = build_pair(ni.inst);
        for (int p : {2, 3}) {
            const DensityMatrix psi_p = tensor_power(pair.psi, p);
            const DensityMatrix phi_p = tensor_power(pair.phi, p);
            std::vector<Distinguisher> many;
            many.push_back(helstrom_povm(psi_p, phi_p));
            many.push_back(random_circuit_distinguisher(psi_p.qubits(), 4, 0xF00D));
            many.push_back(local_measure_distinguisher(
                std::string(static_cast<size_t>(psi_p.qubits()), 'Z'), LocalRule::parity));
            many.push_back(constant_distinguisher(psi_p.dim()));
            for (const Distinguisher& d : many) {
                const HybridReduction red = hybrid_reduce(d, pair, p);
                const double max_adj =
                    *std::max_element(red.sequence.per_adjacent_advantage.begin(),
                                      red.sequence.per_adjacent_advantage.end());
                ++checked;
                if (!(red.sequence.total_advantage <= red.sequence.sum_adjacent + 1e-9 &&
                      red.sequence.sum_adjacent <= p * max_adj + 1e-9)) {
                    ok = false;
                    detail += ni.name + " p=" + std::to_string(p) + " " + d.description + " ";
                }
            }
        }
    }
    report(7, "hybrid telescoping bound", ok,
           detail.empty() ? std::to_string(checked) + " (distinguisher, p) checks" : detail);
}

void criterion_8_gap_amplification() {
    bool ok = true;
    std::string detail;
    for (const NamedInstance& ni : {acceptance_instances()[0], acceptance_instances()[1]}) {
        const FamilyPair pair = build_pair(ni.inst);
        const double ln_phi = log_negativity(pair.phi, pair.cut);
        const CertifySummary base = certify(pair);
        for (int q : {1, 2, 3}) {
            const AmplifiedFamily amped = amplify(pair, q);
            const CertifySummary cert = certify(amped);
            if (cert.gap != q) {
                ok = false;
                detail += ni.name + " q=" + std::to_string(q) + " gap=" +
                          std::to_string(cert.gap) + " ";
            }
            if (cert.distill.epsilon > q * base.distill.epsilon + 1e-9) {
                ok = false;
                detail += ni.name + " epsilon_q too large ";
            }
            const double fid_one = 1.0 - base.distill.epsilon;
            if (std::pow(fid_one, q) + 1e-12 < 1.0 - q * base.distill.epsilon) {
                ok = false;
                detail += "Bernoulli check failed ";
            }
            if (!amped.phi_bar) {
                ok = false;
                detail += ni.name + " q=" + std::to_string(q) + " not materialized ";
                continue;
            }
            const double ln_bar = log_negativity(*amped.phi_bar, amped.cut);
            if (std::abs(ln_bar - q * ln_phi) > 1e-8) {
                ok = false;
                detail += ni.name + " additivity err " + std::to_string(ln_bar - q * ln_phi) +
                          " ";
            }
        }
    }
    report(8, "gap amplification and log-negativity additivity", ok, detail);
}

void criterion_9_monte_carlo() {
    const auto instances = acceptance_instances();
    const EfiInstance& angle = instances[2].inst;  // pi/4
    const Distinguisher helstrom = helstrom_povm(angle.rho0, angle.rho1);
    const std::string bases(1, 'Z');
    const Distinguisher local = local_measure_distinguisher(bases, LocalRule::first_bit);

    int within = 0;
    const int runs = 100;
    for (int r = 0; r < runs; ++r) {
        const Distinguisher& d = (r % 2 == 0) ? helstrom : local;
        const AdvantageReport rep = advantage_monte_carlo(
            d, angle.rho0, angle.rho1, 4096, 0xACC9000 + static_cast<std::uint64_t>(r));
        if (rep.empirical->within_4_std_error) ++within;
    }
    const bool ok = within >= 95;
    report(9, "Monte-Carlo consistency", ok,
           std::to_string(within) + "/" + std::to_string(runs) + " within 4 std errors");
}

void criterion_10_determinism() {
    ExperimentConfig config;
    config.efi.family = EfiFamilyKind::angle;
    config.efi.theta = 0.5235987755982988;
    config.efi.n_qubits = 1;
    config.lambda_range = {2, 3};
    config.amplify_q = {1, 2};
    config.copies_p = {2};
    DistinguisherSpec hel;
    DistinguisherSpec circuit;
    circuit.kind = "random_circuit";
    circuit.seed = 3;
    config.distinguishers = {hel, circuit};
    config.trials = 1000;
    config.seed = 777;
    config.dim_cap_value = 1024;
    config.output_dir = "/tmp/pelab_acceptance_det";

    auto produce = [&]() {
        fs::remove_all(config.output_dir);
        run_construct(config);
        run_distill(config);
        run_distinguish(config);
        run_amplify(config);
        run_report(config);
        std::ifstream in(fs::path(config.output_dir) / "report.json", std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::string first = produce();
    const std::string second = produce();
    const bool ok = !first.empty() && first == second;
    report(10, "byte-identical reports for identical config and seed", ok,
           ok ? std::to_string(first.size()) + " bytes" : "reports differ");
    fs::remove_all(config.output_dir);
}

}  // namespace

int main() {
    set_dim_cap(1 << 10);
    std::printf("acceptance run: dim cap %lld, exact density-matrix checks\n",
                static_cast<long long>(dim_cap()));
    criterion_1_halving();
    criterion_2_psi_separable();
    criterion_3_distill();
    criterion_4_helstrom_optimality();
    criterion_5_keyed();
    criterion_6_td_amplification();
    criterion_7_hybrid();
    criterion_8_gap_amplification();
    criterion_9_monte_carlo();
    criterion_10_determinism();
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    }
    return g_failures;
}
