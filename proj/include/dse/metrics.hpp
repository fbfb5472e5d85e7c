#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dse/problems.hpp"

namespace dse::metrics {

// One diagnostics row. loss and grad_norm_sq are evaluated at the average
// iterate; wall_nanos stays 0 unless timing is explicitly enabled so that
// artifacts are byte-reproducible.
struct MetricsRow {
    std::int64_t t = 0;
    std::int64_t comm_rounds = 0;
    double loss = 0.0;
    double grad_norm_sq = 0.0;
    double consensus_sq = 0.0;
    double gamma_t = 0.0;
    double alpha_t = 0.0;
    std::int64_t wall_nanos = 0;
};

struct Trajectory {
    std::vector<MetricsRow> rows;
    std::int64_t cadence = 1;

    const MetricsRow& final_row() const { return rows.back(); }
    double min_loss() const;
};

// sum_i ||x_i - mean||^2 over the columns of X (d x N).
double consensus_distance_sq(const Eigen::MatrixXd& x_columns);

// F(x) = (1/N) sum_i f_i(x).
double global_loss(std::span<const problems::GradientOracle> oracles,
                   const Eigen::VectorXd& x);

// ||(1/N) sum_i grad f_i(x)||^2.
double global_grad_norm_sq(std::span<const problems::GradientOracle> oracles,
                           const Eigen::VectorXd& x);

// (1/N) sum_i ||grad f_i(x) - grad F(x)||^2, the empirical heterogeneity.
double heterogeneity_sq(std::span<const problems::GradientOracle> oracles,
                        const Eigen::VectorXd& x);

// Empirical mean over M batch draws of ||g_batch(x) - grad f_i(x)||^2,
// batches of size b with replacement from the probe stream.
double noise_sq_estimate(const problems::GradientOracle& oracle,
                         const Eigen::VectorXd& x, int b, int M,
                         rng::Stream& stream);

// CSV surface: `# cadence=K` line, then the fixed column header, then one
// row per entry with 17 significant digits.
extern const char* const kCsvHeader;
std::string to_csv(const Trajectory& trajectory);
void write_csv(const Trajectory& trajectory, const std::filesystem::path& path);

struct CsvColumn {
    std::vector<double> t;
    std::vector<double> values;
};
// Reads one column (by header name) back from a metrics CSV. Throws IoError
// naming the column when it is missing.
CsvColumn read_csv_column(const std::filesystem::path& path,
                          const std::string& column);

}  // namespace dse::metrics
