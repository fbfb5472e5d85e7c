#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dse/errors.hpp"
#include "dse/harness.hpp"
#include "dse/metrics.hpp"
#include "dse/plot.hpp"

using namespace dse;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig =
    "algorithm = dse_sgd\n"
    "seed = 7\n"
    "topology.kind = ring\n"
    "topology.nodes = 4\n"
    "problem.kind = least_squares\n"
    "problem.dimension = 5\n"
    "problem.samples_per_node = 12\n"
    "run.tau = 2\n"
    "run.batch = 1\n"
    "run.iterations = 100\n"
    "gamma.mode = constant\n"
    "gamma.value = 0.01\n";

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dse_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    const auto config = harness::parse_config_text(kMinimalConfig);
    CHECK(config.algorithm == optimizers::Algorithm::dse_sgd);
    CHECK(config.n_nodes == 4);
    CHECK(config.tau == 2);
    CHECK(config.iterations == 100);
    CHECK(config.gamma_value == 0.01);
    CHECK(config.seed == 7);
}

TEST_CASE("validation lists violated invariants with key names") {
    std::string text = kMinimalConfig;
    text += "run.tau = 0\n";  // duplicate key
    CHECK_THROWS_AS(harness::parse_config_text(text), ConfigError);

    try {
        harness::parse_config_text(
            "algorithm = dse_sgd\n"
            "run.tau = 2\n"
            "run.iterations = 101\n"
            "problem.omega = -3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("T mod tau != 0") != std::string::npos);
        CHECK(what.find("problem.omega") != std::string::npos);
    }
}

TEST_CASE("parse errors carry line numbers") {
    try {
        harness::parse_config_text("algorithm = dse_sgd\nbogus line\n", "cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(harness::parse_config_text("no.such.key = 1\n"), ConfigError);
}

TEST_CASE("alpha = theory resolves through the estimated smoothness constant") {
    std::string text = kMinimalConfig;
    text += "alpha.mode = theory\n";
    const auto config = harness::parse_config_text(text);
    const auto prepared = harness::prepare(config);
    const double expected = 32.0 * prepared.L_hat * prepared.L_hat * 0.01 * 0.01 /
                            (4.0 * 1.0);
    CHECK(prepared.params.alpha.base == doctest::Approx(expected).epsilon(1e-15));
    CHECK(prepared.params.alpha.mode ==
          optimizers::AlphaSchedule::Mode::constant);
}

TEST_CASE("repeated runs produce byte-identical artifacts") {
    const auto dir = fresh_dir("repeat");
    const auto config = harness::parse_config_text(kMinimalConfig);
    const auto first = harness::run_to_dir(config, dir);
    const std::string csv_once = slurp(first.csv_path);
    const std::string ckpt_once = slurp(first.checkpoint_path);
    const auto second = harness::run_to_dir(config, dir);
    CHECK(slurp(second.csv_path) == csv_once);
    CHECK(slurp(second.checkpoint_path) == ckpt_once);
    fs::remove_all(dir);
}

TEST_CASE("artifact collision with different content is refused") {
    const auto dir = fresh_dir("collide");
    const auto config = harness::parse_config_text(kMinimalConfig);
    const fs::path csv = dir / ("run-" + harness::config_hash_hex(config) + ".csv");
    {
        std::ofstream out(csv);
        out << "something else\n";
    }
    CHECK_THROWS_AS(harness::run_to_dir(config, dir), IoError);
    fs::remove_all(dir);
}

TEST_CASE("checkpoint round trip is bit-exact and loss is recomputable") {
    const auto dir = fresh_dir("ckpt");
    const auto config = harness::parse_config_text(kMinimalConfig);
    const auto artifacts = harness::run_to_dir(config, dir);
    const auto nodes = harness::read_checkpoint(artifacts.checkpoint_path);
    REQUIRE(nodes.size() == 4);

    const auto prepared = harness::prepare(config);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(nodes[0].size());
    for (const auto& x : nodes) mean += x;
    mean /= static_cast<double>(nodes.size());
    const double recomputed = metrics::global_loss(prepared.oracles, mean);

    // Logged loss, parsed back from its 17-significant-digit decimal form.
    const auto loss_column = metrics::read_csv_column(artifacts.csv_path, "loss");
    CHECK(recomputed == loss_column.values.back());
    fs::remove_all(dir);
}

TEST_CASE("gamma above the theory bound warns but runs") {
    std::string text = kMinimalConfig;
    text.replace(text.find("gamma.value = 0.01"), 18, "gamma.value = 0.90");
    const auto dir = fresh_dir("warn");
    const auto config = harness::parse_config_text(text);
    const auto artifacts = harness::run_to_dir(config, dir);
    REQUIRE(!artifacts.warnings.empty());
    CHECK(artifacts.warnings.front().find("theory bound") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("metrics cadence: explicit override and auto rule") {
    const auto dir = fresh_dir("cadence");
    std::string text = kMinimalConfig;
    text += "metrics.cadence = 10\n";
    const auto config = harness::parse_config_text(text);
    const auto artifacts = harness::run_to_dir(config, dir);
    // t = 0, 10, ..., 100.
    CHECK(artifacts.trajectory.rows.size() == 11);
    CHECK(artifacts.trajectory.rows.back().t == 100);
    for (const auto& row : artifacts.trajectory.rows)
        CHECK(row.comm_rounds == row.t / 2);
    fs::remove_all(dir);
}

TEST_CASE("sweep: grid runs, summary rows in grid order, failures recorded") {
    const auto dir = fresh_dir("sweep");
    std::string text = kMinimalConfig;
    text += "sweep.tau = 1,2\n";
    text += "sweep.seeds = 1,2\n";
    const auto spec = harness::parse_sweep_text(text);
    const auto result = harness::sweep(spec, dir, 1);
    REQUIRE(result.rows.size() == 4);
    int ok = 0;
    for (const auto& row : result.rows)
        if (row.status == "ok") ++ok;
    CHECK(ok == 4);
    const std::string summary = slurp(result.summary_path);
    CHECK(summary.find("tau,seed,status") != std::string::npos);

    // empty axes: one run (the base config)
    const auto dir2 = fresh_dir("sweep_single");
    const auto single = harness::sweep(harness::parse_sweep_text(kMinimalConfig),
                                       dir2, 1);
    CHECK(single.rows.size() == 1);
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("sweep keeps going when children diverge") {
    const auto dir = fresh_dir("sweep_fail");
    std::string text = kMinimalConfig;
    text.replace(text.find("gamma.value = 0.01"), 18, "gamma.value = 1000");
    text += "sweep.algorithm = dse_sgd,dlsgd\n";
    const auto spec = harness::parse_sweep_text(text);
    const auto result = harness::sweep(spec, dir, 1);
    REQUIRE(result.rows.size() == 2);
    for (const auto& row : result.rows) CHECK(row.status == "divergence");
    const std::string summary = slurp(result.summary_path);
    CHECK(summary.find("divergence") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("parallel sweep equals sequential sweep byte for byte") {
    std::string text = kMinimalConfig;
    text += "sweep.tau = 1,2,5\n";
    text += "sweep.seeds = 1,2,3\n";
    const auto spec = harness::parse_sweep_text(text);
    const auto dir_seq = fresh_dir("sweep_seq");
    const auto dir_par = fresh_dir("sweep_par");
    const auto sequential = harness::sweep(spec, dir_seq, 1);
    const auto parallel = harness::sweep(spec, dir_par, 4);
    CHECK(slurp(sequential.summary_path) == slurp(parallel.summary_path));
    for (std::size_t k = 0; k < sequential.rows.size(); ++k) {
        REQUIRE(sequential.rows[k].status == "ok");
        CHECK(slurp(sequential.rows[k].csv_path) ==
              slurp(parallel.rows[k].csv_path));
    }
    fs::remove_all(dir_seq);
    fs::remove_all(dir_par);
}

TEST_CASE("sweep caps the grid size") {
    std::string text = kMinimalConfig;
    text += "sweep.tau = 1,2\n";
    text += "sweep.seeds = 1,2,3\n";
    text += "sweep.cap = 5\n";
    CHECK_THROWS_AS(harness::parse_sweep_text(text), ConfigError);
}

TEST_CASE("validate reports the known ring quantities and mutates nothing") {
    const auto config = harness::parse_config_text(kMinimalConfig);
    const auto report = harness::validate_config(config);
    CHECK(std::abs(report.lambda - 1.0 / 3.0) <= 1e-10);
    CHECK(report.connected_ok);
    CHECK(report.doubly_stochastic_ok);
    CHECK(report.min_horizon_c2 > 0);
    const std::string text = report.to_text();
    CHECK(text.find("lambda") != std::string::npos);
    CHECK(text.find("PASS") != std::string::npos);

    // Complete graph: lambda = 0.
    std::string complete_text = kMinimalConfig;
    complete_text.replace(complete_text.find("topology.kind = ring"), 20,
                          "topology.kind = complete");
    const auto complete_report =
        harness::validate_config(harness::parse_config_text(complete_text));
    CHECK(complete_report.lambda <= 1e-12);

    // The theory example: L = 1 override, tau = 2, dse_mvr.
    std::string theory_text = kMinimalConfig;
    theory_text.replace(theory_text.find("algorithm = dse_sgd"), 19,
                        "algorithm = dse_mvr");
    theory_text += "theory.L = 1.0\n";
    const auto theory_report =
        harness::validate_config(harness::parse_config_text(theory_text));
    CHECK(theory_report.max_gamma ==
          doctest::Approx(0.022680).epsilon(1e-4));
}

TEST_CASE("mixing matrix export writes 17-digit rows") {
    const auto dir = fresh_dir("export_w");
    const auto config = harness::parse_config_text(kMinimalConfig);
    const fs::path path = dir / "w.csv";
    harness::export_mixing_csv(config, path);
    const std::string text = slurp(path);
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("plot: polylines per input and schema errors name the column") {
    const auto dir = fresh_dir("plot");
    const auto config = harness::parse_config_text(kMinimalConfig);
    const auto artifacts = harness::run_to_dir(config, dir);

    const fs::path single = dir / "single.svg";
    plot::plot_csvs({artifacts.csv_path}, "loss", single, true);
    const std::string svg = slurp(single);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);

    std::string other_text = kMinimalConfig;
    other_text.replace(other_text.find("algorithm = dse_sgd"), 19,
                       "algorithm = dlsgd  ");
    const auto other = harness::run_to_dir(
        harness::parse_config_text(other_text), dir);
    const fs::path compare = dir / "compare.svg";
    plot::plot_csvs({artifacts.csv_path, other.csv_path}, "loss", compare, false);
    const std::string two = slurp(compare);
    std::size_t count = 0;
    for (std::size_t pos = two.find("<polyline"); pos != std::string::npos;
         pos = two.find("<polyline", pos + 1))
        ++count;
    CHECK(count == 2);

    try {
        plot::plot_csvs({artifacts.csv_path}, "not_a_column", dir / "x.svg", false);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("not_a_column") != std::string::npos);
    }
    fs::remove_all(dir);
}
