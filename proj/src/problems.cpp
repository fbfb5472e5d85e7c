#include "dse/problems.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dse/errors.hpp"

namespace dse::problems {

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::least_squares: return "least_squares";
        case ProblemKind::sigmoid_regression: return "sigmoid_regression";
        case ProblemKind::softmax_classification: return "softmax_classification";
    }
    return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& name) {
    if (name == "least_squares") return ProblemKind::least_squares;
    if (name == "sigmoid_regression") return ProblemKind::sigmoid_regression;
    if (name == "softmax_classification") return ProblemKind::softmax_classification;
    throw ConfigError("unknown problem kind: " + name);
}

namespace {

double stable_sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

Dataset generate_synthetic(std::uint64_t seed, int n_samples, int d,
                           ProblemKind kind, double label_noise,
                           int n_classes) {
    if (n_samples < 1) throw ContractViolation("generate_synthetic: n_samples >= 1");
    if (d < 1) throw ContractViolation("generate_synthetic: d >= 1");
    if (label_noise < 0.0) throw ContractViolation("generate_synthetic: label_noise >= 0");
    const bool classification = kind == ProblemKind::softmax_classification;
    if (classification && n_classes < 2)
        throw ContractViolation("generate_synthetic: classification needs n_classes >= 2");

    Dataset data;
    data.kind = kind;
    data.feature_dim = d;
    data.n_classes = classification ? n_classes : 0;

    const int param_dim = classification ? d * n_classes : d;
    rng::Stream truth(seed, 0, rng::Purpose::ground_truth, 0);
    data.ground_truth.resize(param_dim);
    for (int k = 0; k < param_dim; ++k) data.ground_truth(k) = truth.next_normal();

    data.samples.resize(static_cast<std::size_t>(n_samples));
    for (int s = 0; s < n_samples; ++s) {
        rng::Stream stream(seed, 0, rng::Purpose::dataset,
                           static_cast<std::uint64_t>(s));
        Sample& sample = data.samples[static_cast<std::size_t>(s)];
        sample.features.resize(d);
        for (int k = 0; k < d; ++k) sample.features(k) = stream.next_normal();
        switch (kind) {
            case ProblemKind::least_squares:
                sample.label = data.ground_truth.dot(sample.features) +
                               label_noise * stream.next_normal();
                break;
            case ProblemKind::sigmoid_regression: {
                double y = stable_sigmoid(data.ground_truth.dot(sample.features)) +
                           label_noise * stream.next_normal();
                sample.label = std::clamp(y, 0.0, 1.0);
                break;
            }
            case ProblemKind::softmax_classification: {
                int best = 0;
                double best_logit = -std::numeric_limits<double>::infinity();
                for (int c = 0; c < n_classes; ++c) {
                    const double logit =
                        data.ground_truth.segment(c * d, d).dot(sample.features);
                    if (logit > best_logit) {
                        best_logit = logit;
                        best = c;
                    }
                }
                // label_noise is the probability of replacing the true class
                // with a uniformly random one.
                if (label_noise > 0.0 && stream.next_unit() < label_noise)
                    best = static_cast<int>(
                        stream.next_below(static_cast<std::uint64_t>(n_classes)));
                sample.label = static_cast<double>(best);
                break;
            }
        }
    }
    return data;
}

std::vector<int> partition_clusters(const Dataset& data) {
    const int n = static_cast<int>(data.samples.size());
    std::vector<int> clusters(static_cast<std::size_t>(n), 0);
    if (data.kind == ProblemKind::softmax_classification) {
        for (int s = 0; s < n; ++s)
            clusters[static_cast<std::size_t>(s)] =
                static_cast<int>(data.samples[static_cast<std::size_t>(s)].label);
        return clusters;
    }
    // Regression analog of class labels: decile buckets of the label value.
    const int n_buckets = std::min(10, n);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return data.samples[static_cast<std::size_t>(a)].label <
               data.samples[static_cast<std::size_t>(b)].label;
    });
    for (int rank = 0; rank < n; ++rank) {
        const int bucket = static_cast<int>(
            (static_cast<long long>(rank) * n_buckets) / n);
        clusters[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] =
            std::min(bucket, n_buckets - 1);
    }
    return clusters;
}

std::vector<LocalShard> dirichlet_partition(const std::vector<Sample>& samples,
                                            const std::vector<int>& cluster_ids,
                                            double omega, int n_nodes,
                                            std::uint64_t seed) {
    if (!(omega > 0.0)) throw ContractViolation("dirichlet_partition: omega > 0");
    if (n_nodes < 1) throw ContractViolation("dirichlet_partition: n_nodes >= 1");
    if (samples.size() != cluster_ids.size())
        throw ContractViolation("dirichlet_partition: cluster ids size mismatch");
    const int n = static_cast<int>(samples.size());

    if (n_nodes == 1) {
        LocalShard shard;
        shard.node_id = 0;
        shard.samples = samples;
        return {shard};
    }

    const int n_clusters =
        1 + *std::max_element(cluster_ids.begin(), cluster_ids.end());
    std::vector<std::vector<int>> by_cluster(static_cast<std::size_t>(n_clusters));
    for (int s = 0; s < n; ++s)
        by_cluster[static_cast<std::size_t>(cluster_ids[static_cast<std::size_t>(s)])]
            .push_back(s);

    constexpr int kMaxAttempts = 1000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::vector<std::vector<int>> assignment(static_cast<std::size_t>(n_nodes));
        for (int c = 0; c < n_clusters; ++c) {
            auto indices = by_cluster[static_cast<std::size_t>(c)];
            if (indices.empty()) continue;
            rng::Stream shuffle_stream(seed, static_cast<std::uint64_t>(c),
                                       rng::Purpose::shuffle,
                                       static_cast<std::uint64_t>(attempt));
            for (std::size_t k = indices.size(); k > 1; --k) {
                const std::size_t j =
                    static_cast<std::size_t>(shuffle_stream.next_below(k));
                std::swap(indices[k - 1], indices[j]);
            }
            rng::Stream prop_stream(seed, static_cast<std::uint64_t>(c),
                                    rng::Purpose::partition,
                                    static_cast<std::uint64_t>(attempt));
            const auto proportions =
                rng::dirichlet_symmetric(prop_stream, omega, n_nodes);
            // Split the shuffled cluster at the cumulative proportions.
            const double total = static_cast<double>(indices.size());
            double cumulative = 0.0;
            std::size_t start = 0;
            for (int node = 0; node < n_nodes; ++node) {
                cumulative += proportions[static_cast<std::size_t>(node)];
                const std::size_t stop =
                    (node == n_nodes - 1)
                        ? indices.size()
                        : std::min(indices.size(),
                                   static_cast<std::size_t>(
                                       std::llround(cumulative * total)));
                for (std::size_t k = start; k < stop; ++k)
                    assignment[static_cast<std::size_t>(node)].push_back(indices[k]);
                start = std::max(start, stop);
            }
        }
        const bool every_node_covered =
            std::all_of(assignment.begin(), assignment.end(),
                        [](const auto& v) { return !v.empty(); });
        if (!every_node_covered) continue;

        std::vector<LocalShard> shards(static_cast<std::size_t>(n_nodes));
        for (int node = 0; node < n_nodes; ++node) {
            auto& shard = shards[static_cast<std::size_t>(node)];
            shard.node_id = node;
            auto& own = assignment[static_cast<std::size_t>(node)];
            std::sort(own.begin(), own.end());  // fixed order: dataset order
            shard.samples.reserve(own.size());
            for (int s : own)
                shard.samples.push_back(samples[static_cast<std::size_t>(s)]);
        }
        return shards;
    }
    throw PartitionFailure(
        "dirichlet_partition: could not give every node a sample in 1000 attempts");
}

GradientOracle::GradientOracle(LocalShard shard, ProblemKind kind,
                               int feature_dim, double mu, int n_classes)
    : shard_(std::move(shard)),
      kind_(kind),
      feature_dim_(feature_dim),
      param_dim_(kind == ProblemKind::softmax_classification
                     ? feature_dim * n_classes
                     : feature_dim),
      mu_(mu),
      n_classes_(n_classes) {
    if (shard_.samples.empty()) throw ContractViolation("oracle: shard must be non-empty");
    if (mu_ < 0.0) throw ContractViolation("oracle: mu >= 0");
    if (kind_ == ProblemKind::softmax_classification && n_classes_ < 2)
        throw ContractViolation("oracle: classification needs n_classes >= 2");
    for (const Sample& s : shard_.samples)
        if (s.features.size() != feature_dim_)
            throw ContractViolation("oracle: sample dimension mismatch");
}

double GradientOracle::sample_loss(const Eigen::VectorXd& x, int index) const {
    const Sample& s = shard_.samples[static_cast<std::size_t>(index)];
    switch (kind_) {
        case ProblemKind::least_squares: {
            const double r = s.features.dot(x) - s.label;
            return 0.5 * r * r;
        }
        case ProblemKind::sigmoid_regression: {
            const double r = stable_sigmoid(s.features.dot(x)) - s.label;
            return r * r;
        }
        case ProblemKind::softmax_classification: {
            Eigen::VectorXd logits(n_classes_);
            for (int c = 0; c < n_classes_; ++c)
                logits(c) = x.segment(c * feature_dim_, feature_dim_).dot(s.features);
            const double zmax = logits.maxCoeff();
            const double lse =
                zmax + std::log((logits.array() - zmax).exp().sum());
            return lse - logits(static_cast<int>(s.label));
        }
    }
    return 0.0;
}

Eigen::VectorXd GradientOracle::sample_gradient(const Eigen::VectorXd& x,
                                                int index) const {
    const Sample& s = shard_.samples[static_cast<std::size_t>(index)];
    switch (kind_) {
        case ProblemKind::least_squares:
            return (s.features.dot(x) - s.label) * s.features;
        case ProblemKind::sigmoid_regression: {
            const double sig = stable_sigmoid(s.features.dot(x));
            return (2.0 * (sig - s.label) * sig * (1.0 - sig)) * s.features;
        }
        case ProblemKind::softmax_classification: {
            Eigen::VectorXd logits(n_classes_);
            for (int c = 0; c < n_classes_; ++c)
                logits(c) = x.segment(c * feature_dim_, feature_dim_).dot(s.features);
            const double zmax = logits.maxCoeff();
            Eigen::VectorXd p = (logits.array() - zmax).exp();
            p /= p.sum();
            Eigen::VectorXd grad(param_dim_);
            for (int c = 0; c < n_classes_; ++c) {
                const double coeff =
                    p(c) - (c == static_cast<int>(s.label) ? 1.0 : 0.0);
                grad.segment(c * feature_dim_, feature_dim_) = coeff * s.features;
            }
            return grad;
        }
    }
    return Eigen::VectorXd::Zero(param_dim_);
}

namespace {

// Fixed-tree pairwise summation; identical trees give identical bits, and
// the full shard and a full-index batch reduce the same way.
template <typename Term>
Eigen::VectorXd pairwise_vector_sum(const Term& term, int lo, int hi, int dim) {
    if (hi - lo <= 8) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
        for (int k = lo; k < hi; ++k) acc += term(k);
        return acc;
    }
    const int mid = lo + (hi - lo) / 2;
    return pairwise_vector_sum(term, lo, mid, dim) +
           pairwise_vector_sum(term, mid, hi, dim);
}

template <typename Term>
double pairwise_scalar_sum(const Term& term, int lo, int hi) {
    if (hi - lo <= 8) {
        double acc = 0.0;
        for (int k = lo; k < hi; ++k) acc += term(k);
        return acc;
    }
    const int mid = lo + (hi - lo) / 2;
    return pairwise_scalar_sum(term, lo, mid) + pairwise_scalar_sum(term, mid, hi);
}

}  // namespace

Eigen::VectorXd GradientOracle::stochastic_gradient(
    const Eigen::VectorXd& x, std::span<const int> batch) const {
    if (batch.empty()) throw ContractViolation("stochastic_gradient: empty batch");
    for (int idx : batch)
        if (idx < 0 || idx >= shard_size())
            throw ContractViolation("stochastic_gradient: batch index out of range");
    const int b = static_cast<int>(batch.size());
    Eigen::VectorXd sum = pairwise_vector_sum(
        [&](int k) { return sample_gradient(x, batch[static_cast<std::size_t>(k)]); },
        0, b, param_dim_);
    return sum / static_cast<double>(b) + mu_ * x;
}

Eigen::VectorXd GradientOracle::full_gradient(const Eigen::VectorXd& x) const {
    const int n = shard_size();
    Eigen::VectorXd sum = pairwise_vector_sum(
        [&](int k) { return sample_gradient(x, k); }, 0, n, param_dim_);
    return sum / static_cast<double>(n) + mu_ * x;
}

double GradientOracle::full_loss(const Eigen::VectorXd& x) const {
    const int n = shard_size();
    const double sum =
        pairwise_scalar_sum([&](int k) { return sample_loss(x, k); }, 0, n);
    return sum / static_cast<double>(n) + 0.5 * mu_ * x.squaredNorm();
}

Eigen::VectorXd GradientOracle::finite_difference_gradient(
    const Eigen::VectorXd& x, double h) const {
    if (!(h > 0.0)) throw ContractViolation("finite_difference_gradient: h > 0");
    Eigen::VectorXd grad(param_dim_);
    Eigen::VectorXd probe = x;
    for (int k = 0; k < param_dim_; ++k) {
        const double original = probe(k);
        probe(k) = original + h;
        const double up = full_loss(probe);
        probe(k) = original - h;
        const double down = full_loss(probe);
        probe(k) = original;
        grad(k) = (up - down) / (2.0 * h);
    }
    return grad;
}

double GradientOracle::estimate_L() const {
    const int n = shard_size();
    double max_feature_sq = 0.0;
    for (const Sample& s : shard_.samples)
        max_feature_sq = std::max(max_feature_sq, s.features.squaredNorm());
    switch (kind_) {
        case ProblemKind::least_squares: {
            Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(feature_dim_, feature_dim_);
            for (const Sample& s : shard_.samples)
                gram.noalias() += s.features * s.features.transpose();
            gram /= static_cast<double>(n);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
                gram, Eigen::EigenvaluesOnly);
            return solver.eigenvalues().maxCoeff() + mu_;
        }
        case ProblemKind::sigmoid_regression: {
            // sup over z and y in [0,1] of |d^2/dz^2 (sigmoid(z)-y)^2|
            //   <= 2 sup(s')^2 + 2 sup|s''| = 1/8 + 1/(3 sqrt 3).
            const double curvature = 0.125 + 1.0 / (3.0 * std::sqrt(3.0));
            return curvature * max_feature_sq + mu_;
        }
        case ProblemKind::softmax_classification:
            // Hessian w.r.t. logits is diag(p) - p p^T, norm <= 1/2.
            return 0.5 * max_feature_sq + mu_;
    }
    return mu_;
}

std::vector<int> sample_batch(rng::Stream& stream, int shard_size, int b) {
    if (b < 1) throw ContractViolation("sample_batch: b >= 1");
    if (shard_size < 1) throw ContractViolation("sample_batch: shard_size >= 1");
    std::vector<int> batch(static_cast<std::size_t>(b));
    for (int k = 0; k < b; ++k)
        batch[static_cast<std::size_t>(k)] = static_cast<int>(
            stream.next_below(static_cast<std::uint64_t>(shard_size)));
    return batch;
}

std::vector<GradientOracle> make_oracles(const Dataset& data,
                                         const std::vector<LocalShard>& shards,
                                         double mu) {
    std::vector<GradientOracle> oracles;
    oracles.reserve(shards.size());
    for (const LocalShard& shard : shards)
        oracles.emplace_back(shard, data.kind, data.feature_dim, mu,
                             data.n_classes);
    return oracles;
}

double estimate_global_L(const std::vector<GradientOracle>& oracles) {
    double L = 0.0;
    for (const auto& oracle : oracles) L = std::max(L, oracle.estimate_L());
    return L;
}

void write_samples_csv(const std::vector<Sample>& samples,
                       const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    char buffer[64];
    for (const Sample& s : samples) {
        for (Eigen::Index k = 0; k < s.features.size(); ++k) {
            std::snprintf(buffer, sizeof buffer, "%.17g", s.features(k));
            out << buffer << ',';
        }
        std::snprintf(buffer, sizeof buffer, "%.17g", s.label);
        out << buffer << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Sample> read_samples_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::vector<Sample> samples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> values;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        if (values.size() < 2) throw IoError("malformed sample row: " + line);
        Sample s;
        s.features.resize(static_cast<Eigen::Index>(values.size()) - 1);
        for (std::size_t k = 0; k + 1 < values.size(); ++k)
            s.features(static_cast<Eigen::Index>(k)) = values[k];
        s.label = values.back();
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace dse::problems
