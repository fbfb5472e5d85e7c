#include "dse/topology.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "dse/errors.hpp"
#include "dse/rng.hpp"

namespace dse::topology {

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n_nodes), 0);
    for (const auto& [i, j] : edges) {
        ++deg[static_cast<std::size_t>(i)];
        ++deg[static_cast<std::size_t>(j)];
    }
    return deg;
}

std::vector<std::vector<int>> Graph::adjacency_lists() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_nodes));
    for (const auto& [i, j] : edges) {
        adj[static_cast<std::size_t>(i)].push_back(j);
        adj[static_cast<std::size_t>(j)].push_back(i);
    }
    return adj;
}

bool is_connected(const Graph& g) {
    if (g.n_nodes <= 0) return false;
    if (g.n_nodes == 1) return true;
    const auto adj = g.adjacency_lists();
    std::vector<char> seen(static_cast<std::size_t>(g.n_nodes), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == g.n_nodes;
}

Graph make_graph(int n_nodes, std::vector<std::pair<int, int>> edges) {
    if (n_nodes < 1) throw InvalidTopologyError("graph needs at least one node");
    std::set<std::pair<int, int>> unique;
    for (auto& [i, j] : edges) {
        if (i == j) throw InvalidTopologyError("self-loop in edge set");
        if (i < 0 || j < 0 || i >= n_nodes || j >= n_nodes)
            throw InvalidTopologyError("edge endpoint out of range");
        if (i > j) std::swap(i, j);
        if (!unique.insert({i, j}).second)
            throw InvalidTopologyError("duplicate edge in edge set");
    }
    Graph g;
    g.n_nodes = n_nodes;
    g.edges.assign(unique.begin(), unique.end());
    if (!is_connected(g)) throw InvalidTopologyError("graph is not connected");
    return g;
}

Graph build_ring(int n) {
    if (n < 3)
        throw InvalidTopologyError("ring topology needs n >= 3, got " + std::to_string(n));
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return make_graph(n, std::move(edges));
}

Graph build_complete(int n) {
    if (n < 2)
        throw InvalidTopologyError("complete topology needs n >= 2, got " + std::to_string(n));
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return make_graph(n, std::move(edges));
}

void check_doubly_stochastic(const Eigen::MatrixXd& w) {
    const auto n = w.rows();
    if (n != w.cols()) throw ContractViolation("mixing matrix must be square");
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = w(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw ContractViolation("mixing weight outside [0,1]");
            if (w(i, j) != w(j, i))
                throw ContractViolation("mixing matrix must be symmetric");
        }
        if (std::abs(w.row(i).sum() - 1.0) > 1e-12)
            throw ContractViolation("row sum deviates from 1 beyond 1e-12");
        if (std::abs(w.col(i).sum() - 1.0) > 1e-12)
            throw ContractViolation("column sum deviates from 1 beyond 1e-12");
    }
}

namespace {

Eigen::MatrixXd deviation_from_average(const Eigen::MatrixXd& w) {
    const auto n = w.rows();
    return w - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
}

constexpr int kDenseLimit = 512;

}  // namespace

double spectral_lambda(const Eigen::MatrixXd& w) {
    if (w.rows() != w.cols()) throw ContractViolation("spectral_lambda: matrix must be square");
    if (!w.isApprox(w.transpose(), 0.0))
        throw ContractViolation("spectral_lambda: matrix must be symmetric");
    if (w.rows() > kDenseLimit) return spectral_lambda_power(w);
    const Eigen::MatrixXd m = deviation_from_average(w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_lambda_power(const Eigen::MatrixXd& w, int max_iterations,
                             double tolerance) {
    if (w.rows() != w.cols()) throw ContractViolation("spectral_lambda: matrix must be square");
    const auto n = w.rows();
    const Eigen::MatrixXd m = deviation_from_average(w);
    rng::Stream stream(0x5bec7a11u, 0, rng::Purpose::probe, 0);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = stream.next_normal();
    z.normalize();
    double estimate = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd mz = m * z;
        const double norm = mz.norm();
        if (norm < tolerance) return 0.0;  // W = Q up to the tolerance
        const double previous = estimate;
        estimate = norm;  // ||Mz|| with ||z|| = 1 converges to |lambda_max|
        z = mz / norm;
        if (it > 0 && std::abs(estimate - previous) <= tolerance) break;
    }
    return estimate;
}

namespace {

MixingMatrix finalize(Eigen::MatrixXd w) {
    check_doubly_stochastic(w);
    const double lambda = spectral_lambda(w);
    if (!(lambda < 1.0 - 1e-12) && w.rows() > 1)
        throw ContractViolation("lambda must lie in [0,1) for a connected graph");
    return MixingMatrix(std::move(w), lambda);
}

}  // namespace

MixingMatrix metropolis_hastings_weights(const Graph& g) {
    if (!is_connected(g))
        throw InvalidTopologyError("Metropolis-Hastings weights need a connected graph");
    const auto deg = g.degrees();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(g.n_nodes, g.n_nodes);
    // One weight per unordered pair keeps the matrix symmetric bit-exactly.
    for (const auto& [i, j] : g.edges) {
        const double wij = 1.0 / (static_cast<double>(std::max(deg[static_cast<std::size_t>(i)],
                                                               deg[static_cast<std::size_t>(j)])) +
                                  1.0);
        w(i, j) = wij;
        w(j, i) = wij;
    }
    for (int i = 0; i < g.n_nodes; ++i) {
        double off = 0.0;
        for (int j = 0; j < g.n_nodes; ++j)
            if (j != i) off += w(i, j);
        w(i, i) = 1.0 - off;
    }
    return finalize(std::move(w));
}

MixingMatrix uniform_average_matrix(int n) {
    if (n < 1) throw InvalidTopologyError("uniform average matrix needs n >= 1");
    Eigen::MatrixXd w =
        Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    return finalize(std::move(w));
}

}  // namespace dse::topology
