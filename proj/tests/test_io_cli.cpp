#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "oracles.hpp"
#include "pelab/dmx_io.hpp"
#include "pelab/experiment.hpp"
#include "pelab/spectral.hpp"

using namespace pelab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExperimentConfig tiny_config(const std::string& out_dir) {
    ExperimentConfig c;
    c.efi.family = EfiFamilyKind::angle;
    c.efi.theta = 0.78539816339744831;
    c.efi.n_qubits = 1;
    c.lambda_range = {2, 3};
    c.amplify_q = {1, 2};
    c.copies_p = {2};
    DistinguisherSpec hel;
    DistinguisherSpec local;
    local.kind = "local_measure";
    DistinguisherSpec constant;
    constant.kind = "constant";
    c.distinguishers = {hel, local, constant};
    c.trials = 500;
    c.seed = 314;
    c.dim_cap_value = 1024;
    c.output_dir = out_dir;
    return c;
}

}  // namespace

TEST_CASE("dmx-json round trip is bit exact") {
    CounterRng rng(97, 50);
    for (int round = 0; round < 10; ++round) {
        const DensityMatrix rho = oracle::random_density(4, 1 + round % 4, rng);
        const std::string text = to_dmx_json(rho);
        const DensityMatrix back = from_dmx_json(text);
        // %.17g preserves doubles exactly through the round trip
        CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(back.qubits() == rho.qubits());
    }
}

TEST_CASE("dmx-json writer emits 17-significant-digit numbers") {
    Vector v(2);
    v << std::sqrt(1.0 / 3.0), -std::sqrt(2.0 / 3.0);
    const std::string text = to_dmx_json(DensityMatrix::from_pure(v));
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    CHECK(text.find("\"qubits\":1") != std::string::npos);
}

TEST_CASE("dmx-json loader rejects malformed input") {
    CHECK_THROWS_AS(from_dmx_json("not json"), input_error);
    CHECK_THROWS_AS(from_dmx_json("{\"qubits\":1,\"re\":[[1,0]]}"), input_error);
    CHECK_THROWS_AS(
        from_dmx_json("{\"qubits\":1,\"re\":[[1,0],[0,1]],\"im\":[[0,0],[0,0]]}"),
        input_error);  // trace 2
    CHECK_THROWS_AS(read_dmx_file("/tmp/pelab_no_such_file.json"), input_error);
}

TEST_CASE("config: defaults, file parsing, validation errors") {
    const ExperimentConfig c = tiny_config("/tmp/pelab_cfg");
    CHECK_NOTHROW(c.validate());

    ExperimentConfig empty_lambda = c;
    empty_lambda.lambda_range.clear();
    CHECK_THROWS_AS(empty_lambda.validate(), input_error);

    ExperimentConfig tiny_trials = c;
    tiny_trials.trials = 10;
    CHECK_THROWS_AS(tiny_trials.validate(), input_error);

    CHECK_THROWS_AS(ExperimentConfig::from_file("/tmp/pelab_no_config.json"), input_error);

    // round trip through JSON preserves the hash
    const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.config_hash() == c.config_hash());
}

TEST_CASE("report on an empty directory lists the missing sections") {
    ExperimentConfig c = tiny_config("/tmp/pelab_empty_out");
    fs::remove_all(c.output_dir);
    fs::create_directories(c.output_dir);
    try {
        run_report(c);
        FAIL("expected input_error");
    } catch (const input_error& e) {
        const std::string what = e.what();
        CHECK(what.find("construct") != std::string::npos);
        CHECK(what.find("distill") != std::string::npos);
        CHECK(what.find("distinguish") != std::string::npos);
        CHECK(what.find("amplify") != std::string::npos);
    }
}

TEST_CASE("full pipeline is deterministic: byte-identical report.json") {
    ExperimentConfig c = tiny_config("/tmp/pelab_det");
    fs::remove_all(c.output_dir);

    run_construct(c);
    run_distill(c);
    run_distinguish(c);
    run_amplify(c);
    run_report(c);
    const std::string first = slurp(fs::path(c.output_dir) / "report.json");
    const std::string first_csv = slurp(fs::path(c.output_dir) / "advantage.csv");

    run_construct(c);
    run_distill(c);
    run_distinguish(c);
    run_amplify(c);
    run_report(c);
    const std::string second = slurp(fs::path(c.output_dir) / "report.json");
    const std::string second_csv = slurp(fs::path(c.output_dir) / "advantage.csv");

    CHECK(first == second);
    CHECK(first_csv == second_csv);
    CHECK(first.find("config_hash") != std::string::npos);
    CHECK(first.find("tolerances") != std::string::npos);
    CHECK(first.find("dim_cap") != std::string::npos);
}

TEST_CASE("construct writes loadable state files consistent with the manifest") {
    ExperimentConfig c = tiny_config("/tmp/pelab_files");
    fs::remove_all(c.output_dir);
    const auto section = run_construct(c);
    for (const auto& row : section["rows"]) {
        const DensityMatrix psi =
            read_dmx_file((fs::path(c.output_dir) / row["psi_file"].get<std::string>()).string());
        const DensityMatrix phi =
            read_dmx_file((fs::path(c.output_dir) / row["phi_file"].get<std::string>()).string());
        CHECK(std::abs(trace_distance(psi, phi) - row["td_psi_phi"].get<double>()) <= 1e-12);
    }
}

#ifdef PELAB_CLI_PATH
TEST_CASE("CLI exit codes: success, config error, resource cap") {
    const std::string cli = PELAB_CLI_PATH;
    const std::string out = "/tmp/pelab_cli_out";
    fs::remove_all(out);

    int rc = std::system((cli + " construct --out " + out + " --dim-cap 512 > /dev/null 2>&1")
                             .c_str());
    CHECK(WEXITSTATUS(rc) == 0);

    rc = std::system((cli + " construct --config /tmp/pelab_missing.json > /dev/null 2>&1")
                         .c_str());
    CHECK(WEXITSTATUS(rc) == 2);

    // cap too small to even build the 3-qubit family states
    rc = std::system((cli + " construct --out " + out + " --dim-cap 4 > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 3);

    // report before the other sections exist
    fs::remove_all(out);
    fs::create_directories(out);
    rc = std::system((cli + " report --out " + out + " > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 2);
}
#endif
