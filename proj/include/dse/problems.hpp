#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dse/rng.hpp"

namespace dse::problems {

enum class ProblemKind {
    least_squares,           // 0.5 (a^T x - y)^2, convex sanity case
    sigmoid_regression,      // (sigmoid(a^T x) - y)^2, y in [0,1], non-convex
    softmax_classification,  // -log softmax_c(Z a), parameters stacked per class
};

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

struct Sample {
    Eigen::VectorXd features;
    double label = 0.0;  // real target, or class index for classification
};

struct Dataset {
    std::vector<Sample> samples;
    Eigen::VectorXd ground_truth;  // hidden parameter used to generate labels
    ProblemKind kind = ProblemKind::least_squares;
    int feature_dim = 0;
    int n_classes = 0;  // 0 unless classification
};

// Features i.i.d. standard normal; labels from a hidden parameter plus
// label_noise. Deterministic in (seed): sample k depends only on
// (seed, dataset-purpose, k).
Dataset generate_synthetic(std::uint64_t seed, int n_samples, int d,
                           ProblemKind kind, double label_noise,
                           int n_classes = 0);

struct LocalShard {
    int node_id = 0;
    std::vector<Sample> samples;  // order fixed after partitioning
};

// Cluster ids used by the Dirichlet partitioner: class labels for
// classification, label-quantile buckets (10 of them) for regression.
std::vector<int> partition_clusters(const Dataset& data);

// Per cluster, node proportions ~ Dirichlet(omega, ..., omega). Small omega
// skews shards (non-iid), large omega approaches uniform. Proportions are
// redrawn (bounded at 1000 attempts) until every node holds >= 1 sample.
std::vector<LocalShard> dirichlet_partition(const std::vector<Sample>& samples,
                                            const std::vector<int>& cluster_ids,
                                            double omega, int n_nodes,
                                            std::uint64_t seed);

// Differentiable per-node objective
//   f_i(x) = (1/n_i) sum_r loss(x; sample_r) + (mu/2) ||x||^2
// with deterministic full-shard evaluation (pairwise summation in sample
// order) and mini-batch stochastic gradients.
class GradientOracle {
public:
    GradientOracle(LocalShard shard, ProblemKind kind, int feature_dim,
                   double mu = 0.0, int n_classes = 0);

    int node_id() const { return shard_.node_id; }
    int shard_size() const { return static_cast<int>(shard_.samples.size()); }
    int dimension() const { return param_dim_; }
    ProblemKind kind() const { return kind_; }
    double mu() const { return mu_; }
    const LocalShard& shard() const { return shard_; }

    double sample_loss(const Eigen::VectorXd& x, int index) const;
    Eigen::VectorXd sample_gradient(const Eigen::VectorXd& x, int index) const;

    // (1/b) sum over the batch + mu x. Batch must be non-empty and in range.
    Eigen::VectorXd stochastic_gradient(const Eigen::VectorXd& x,
                                        std::span<const int> batch) const;

    // Exact mean over the whole shard; bit-reproducible.
    Eigen::VectorXd full_gradient(const Eigen::VectorXd& x) const;
    double full_loss(const Eigen::VectorXd& x) const;

    // Central differences of the full-shard loss, one coordinate at a time.
    Eigen::VectorXd finite_difference_gradient(const Eigen::VectorXd& x,
                                               double h) const;

    // Smoothness constant: exact for least squares, a per-sample curvature
    // bound otherwise.
    double estimate_L() const;

private:
    LocalShard shard_;
    ProblemKind kind_;
    int feature_dim_;
    int param_dim_;
    double mu_;
    int n_classes_;
};

// b indices uniform with replacement from [0, shard_size).
std::vector<int> sample_batch(rng::Stream& stream, int shard_size, int b);

// Shards for every node from one dataset. Ensures shard order node 0..N-1.
std::vector<GradientOracle> make_oracles(const Dataset& data,
                                         const std::vector<LocalShard>& shards,
                                         double mu);

// Smoothness constant of the global objective F = (1/N) sum f_i: the max of
// the per-node estimates.
double estimate_global_L(const std::vector<GradientOracle>& oracles);

// One sample per row: d feature columns then the label, 17 significant
// digits.
void write_samples_csv(const std::vector<Sample>& samples,
                       const std::filesystem::path& path);
std::vector<Sample> read_samples_csv(const std::filesystem::path& path);

}  // namespace dse::problems
