#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dse/config.hpp"
#include "dse/metrics.hpp"
#include "dse/optimizers.hpp"
#include "dse/problems.hpp"
#include "dse/theory.hpp"
#include "dse/topology.hpp"

namespace dse::harness {

// Everything needed to drive a Runner, resolved from a RunConfig:
// topology, data shards, oracles, schedules (corollary/theory modes
// collapsed to constants) and the shared start iterate.
struct PreparedRun {
    topology::MixingMatrix mixing;
    problems::Dataset dataset;
    std::vector<problems::GradientOracle> oracles;
    optimizers::AlgoParams params;
    Eigen::VectorXd x0;
    std::int64_t cadence = 1;
    double L_hat = 0.0;
    std::vector<std::string> warnings;  // advisory only; runs proceed
};

PreparedRun prepare(const RunConfig& config);

struct RunArtifacts {
    std::filesystem::path csv_path;
    std::filesystem::path checkpoint_path;
    metrics::Trajectory trajectory;
    std::vector<std::string> warnings;
};

// Executes the run and writes `run-<confighash>.csv` and
// `run-<confighash>.ckpt` under outdir. Re-running with the same config is
// a no-op; a path collision with different content is an error.
RunArtifacts run_to_dir(const RunConfig& config,
                        const std::filesystem::path& outdir,
                        bool timing = false);

// Checkpoint surface: magic "DSE1", then N and d as 64-bit little-endian,
// then N rows of d doubles (node-major).
void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<Eigen::VectorXd>& node_params);
std::vector<Eigen::VectorXd> read_checkpoint(const std::filesystem::path& path);

// Writes bytes unless the file already holds exactly these bytes; throws
// IoError when it holds something else.
void write_artifact(const std::filesystem::path& path, const std::string& bytes);

struct ValidationReport {
    double L_hat = 0.0;
    double lambda = 0.0;
    double max_gamma = 0.0;
    double gamma0 = 0.0;
    double alpha_theory_value = 0.0;
    bool alpha_theory_admissible = true;
    std::int64_t min_horizon_c1 = 0;
    std::int64_t min_horizon_c2 = 0;
    bool doubly_stochastic_ok = false;
    bool connected_ok = false;
    bool gamma_within_bound = false;
    std::int64_t suggested_b = 1;
    std::int64_t suggested_tau_c2 = 1;
    std::int64_t suggested_tau_c3 = 1;

    std::string to_text() const;
};

// Diagnostic only: never writes or mutates anything.
ValidationReport validate_config(const RunConfig& config);

// W as CSV: N rows of N comma-separated entries, 17 significant digits.
void export_mixing_csv(const RunConfig& config,
                       const std::filesystem::path& path);

struct SweepSpec {
    RunConfig base;
    std::vector<std::int64_t> taus;
    std::vector<int> batches;
    std::vector<double> omegas;
    std::vector<optimizers::Algorithm> algorithms;
    std::vector<std::uint64_t> seeds;
    std::int64_t cap = 1024;
};

SweepSpec parse_sweep_text(const std::string& text,
                           const std::string& origin = "<string>");
SweepSpec parse_sweep_file(const std::filesystem::path& path);

struct SweepRow {
    std::int64_t tau = 0;
    int batch = 0;
    double omega = 0.0;
    optimizers::Algorithm algorithm = optimizers::Algorithm::dse_sgd;
    std::uint64_t seed = 0;
    std::string status = "ok";
    double final_loss = 0.0;
    double final_grad_norm_sq = 0.0;
    double min_loss = 0.0;
    std::int64_t comm_rounds_total = 0;
    std::filesystem::path csv_path;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::filesystem::path summary_path;
};

// One run per grid point per seed; failures are recorded in the summary
// and the sweep continues. threads = 0 reads DSE_THREADS, falling back to
// the hardware count. The summary is written in grid order, so its bytes
// do not depend on the worker count.
SweepResult sweep(const SweepSpec& spec, const std::filesystem::path& outdir,
                  int threads = 0);

}  // namespace dse::harness
