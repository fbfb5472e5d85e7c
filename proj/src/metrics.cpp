#include "dse/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dse/errors.hpp"

namespace dse::metrics {

double Trajectory::min_loss() const {
    double best = std::numeric_limits<double>::infinity();
    for (const MetricsRow& row : rows) best = std::min(best, row.loss);
    return best;
}

double consensus_distance_sq(const Eigen::MatrixXd& x_columns) {
    const auto n = x_columns.cols();
    if (n < 1) throw ContractViolation("consensus_distance_sq: N >= 1");
    const Eigen::VectorXd mean = x_columns.rowwise().mean();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        total += (x_columns.col(i) - mean).squaredNorm();
    return total;
}

double global_loss(std::span<const problems::GradientOracle> oracles,
                   const Eigen::VectorXd& x) {
    double sum = 0.0;
    for (const auto& oracle : oracles) sum += oracle.full_loss(x);
    return sum / static_cast<double>(oracles.size());
}

double global_grad_norm_sq(std::span<const problems::GradientOracle> oracles,
                           const Eigen::VectorXd& x) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.size());
    for (const auto& oracle : oracles) sum += oracle.full_gradient(x);
    sum /= static_cast<double>(oracles.size());
    return sum.squaredNorm();
}

double heterogeneity_sq(std::span<const problems::GradientOracle> oracles,
                        const Eigen::VectorXd& x) {
    const auto n = oracles.size();
    std::vector<Eigen::VectorXd> grads;
    grads.reserve(n);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(x.size());
    for (const auto& oracle : oracles) {
        grads.push_back(oracle.full_gradient(x));
        mean += grads.back();
    }
    mean /= static_cast<double>(n);
    double total = 0.0;
    for (const auto& g : grads) total += (g - mean).squaredNorm();
    return total / static_cast<double>(n);
}

double noise_sq_estimate(const problems::GradientOracle& oracle,
                         const Eigen::VectorXd& x, int b, int M,
                         rng::Stream& stream) {
    if (M < 2) throw ContractViolation("noise_sq_estimate: M >= 2");
    const Eigen::VectorXd full = oracle.full_gradient(x);
    double total = 0.0;
    for (int m = 0; m < M; ++m) {
        const auto batch = problems::sample_batch(stream, oracle.shard_size(), b);
        total += (oracle.stochastic_gradient(x, batch) - full).squaredNorm();
    }
    return total / static_cast<double>(M);
}

const char* const kCsvHeader =
    "t,comm_rounds,loss,grad_norm_sq,consensus_sq,gamma_t,alpha_t,wall_nanos";

std::string to_csv(const Trajectory& trajectory) {
    std::string out;
    out.reserve(trajectory.rows.size() * 96 + 128);
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, "# cadence=%lld\n",
                  static_cast<long long>(trajectory.cadence));
    out += buffer;
    out += kCsvHeader;
    out += '\n';
    for (const MetricsRow& row : trajectory.rows) {
        std::snprintf(buffer, sizeof buffer,
                      "%lld,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%lld\n",
                      static_cast<long long>(row.t),
                      static_cast<long long>(row.comm_rounds), row.loss,
                      row.grad_norm_sq, row.consensus_sq, row.gamma_t,
                      row.alpha_t, static_cast<long long>(row.wall_nanos));
        out += buffer;
    }
    return out;
}

void write_csv(const Trajectory& trajectory, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    const std::string text = to_csv(trajectory);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

CsvColumn read_csv_column(const std::filesystem::path& path,
                          const std::string& column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) header.push_back(cell);
        break;
    }
    int column_index = -1;
    int t_index = -1;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == column) column_index = static_cast<int>(k);
        if (header[k] == "t") t_index = static_cast<int>(k);
    }
    if (column_index < 0)
        throw IoError("column '" + column + "' not found in " + path.string());
    if (t_index < 0) throw IoError("column 't' not found in " + path.string());

    CsvColumn out;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream row(line);
        std::string cell;
        int k = 0;
        double t_value = 0.0, value = 0.0;
        while (std::getline(row, cell, ',')) {
            if (k == t_index) t_value = std::stod(cell);
            if (k == column_index) value = std::stod(cell);
            ++k;
        }
        out.t.push_back(t_value);
        out.values.push_back(value);
    }
    return out;
}

}  // namespace dse::metrics
