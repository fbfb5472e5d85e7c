#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace dse::topology {

// Undirected connected communication graph. Edges are stored once with
// i < j; self-loops live in the mixing matrix, not here.
struct Graph {
    int n_nodes = 0;
    std::vector<std::pair<int, int>> edges;

    std::vector<int> degrees() const;
    std::vector<std::vector<int>> adjacency_lists() const;
};

// Validates node count, edge endpoints, duplicates/self-loops and
// connectivity. Throws InvalidTopologyError.
Graph make_graph(int n_nodes, std::vector<std::pair<int, int>> edges);

bool is_connected(const Graph& g);

// Ring: node i adjacent to i-1 and i+1 (mod n). n >= 3.
Graph build_ring(int n);

// Complete graph on n >= 2 nodes.
Graph build_complete(int n);

// Symmetric doubly stochastic gossip matrix with its cached spectral
// quantity lambda = ||W - Q||, Q = (1/N) 11^T. Immutable after construction.
class MixingMatrix {
public:
    MixingMatrix(Eigen::MatrixXd w, double lambda)
        : w_(std::move(w)), lambda_(lambda) {}

    const Eigen::MatrixXd& w() const { return w_; }
    double lambda() const { return lambda_; }
    int size() const { return static_cast<int>(w_.rows()); }

private:
    Eigen::MatrixXd w_;
    double lambda_;
};

// Metropolis-Hastings weights: w_ij = 1/(max(deg i, deg j) + 1) on edges
// (the max-degree form keeps double stochasticity on irregular graphs and
// reduces to 1/(deg+1) on regular ones), w_ii = 1 - sum_j w_ij.
MixingMatrix metropolis_hastings_weights(const Graph& g);

// W = Q: every entry 1/n, lambda = 0.
MixingMatrix uniform_average_matrix(int n);

// ||W - Q|| for symmetric doubly stochastic W: the largest absolute
// eigenvalue of W on the subspace orthogonal to 1. Dense eigendecomposition
// for N <= 512, power iteration beyond.
double spectral_lambda(const Eigen::MatrixXd& w);

// Power-iteration route, exposed so the dense route can be cross-checked.
double spectral_lambda_power(const Eigen::MatrixXd& w,
                             int max_iterations = 1000,
                             double tolerance = 1e-10);

// Throws ContractViolation if W is not (numerically) symmetric doubly
// stochastic with entries in [0, 1]; tolerance 1e-12 on the sums.
void check_doubly_stochastic(const Eigen::MatrixXd& w);

}  // namespace dse::topology
