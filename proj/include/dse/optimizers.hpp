#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dse/metrics.hpp"
#include "dse/problems.hpp"
#include "dse/topology.hpp"

namespace dse::optimizers {

enum class Algorithm { dse_mvr, dse_sgd, dsgd, dlsgd };

std::string to_string(Algorithm algo);
Algorithm algorithm_from_string(const std::string& name);

// gamma_t. Halving divides the base value by 2 at iterations T/2 and 3T/4.
struct GammaSchedule {
    enum class Mode { constant, halving };
    Mode mode = Mode::constant;
    double base = 0.0;
    std::int64_t horizon = 0;  // only used by halving

    double at(std::int64_t t) const;
};

// alpha_t for the MVR direction update. Decay multiplies by the factor once
// per completed communication round; the schedule itself stays a pure
// function of t.
struct AlphaSchedule {
    enum class Mode { constant, decay };
    Mode mode = Mode::constant;
    double base = 1.0;
    std::int64_t tau = 1;       // only used by decay
    double factor = 0.99;       // only used by decay

    double at(std::int64_t t) const;
};

struct AlgoParams {
    GammaSchedule gamma;
    AlphaSchedule alpha;
    std::int64_t tau = 1;
    int batch_size = 1;
    std::int64_t iterations = 0;  // T, with T mod tau = 0
    bool full_batch = false;      // batch = whole shard, in sample order
    // Algorithm-1 line 11: reset v to the full local gradient after every
    // communication (and initialize v_0 to it). Disabling switches both to
    // fresh mini-batches, which makes alpha = 1 reproduce DSE-SGD exactly.
    bool mvr_full_reset = true;
};

// Per-node state. x_ckpt / h_prev / y_prev freeze the previous
// communication round and stay constant between rounds.
struct NodeState {
    Eigen::VectorXd x, v, y, h;
    Eigen::VectorXd x_ckpt, h_prev, y_prev;
};

struct SwarmState {
    std::vector<NodeState> nodes;
    std::int64_t t = 0;
    std::int64_t comm_rounds = 0;

    Eigen::VectorXd mean_x() const;
    Eigen::VectorXd mean_v() const;
    Eigen::VectorXd mean_y() const;
    Eigen::VectorXd mean_h() const;
    Eigen::MatrixXd stack_x() const;  // d x N
};

// Largest multiple of tau that is <= t.
std::int64_t tau_prev(std::int64_t t, std::int64_t tau);

// One MVR local update: x <- x - gamma v, then
// v <- g(x_new; batch) + (1 - alpha)(v - g(x_old; batch)) with the SAME
// batch at both points (required for the variance-reduction telescoping).
void local_step_mvr(NodeState& node, const problems::GradientOracle& oracle,
                    double gamma, double alpha, std::span<const int> batch);

// What happens to the direction buffer inside a communication round.
enum class CommReset {
    none,          // leave v untouched (caller refreshes it)
    full_gradient  // DSE-MVR line 11: v = full local gradient at the new x
};

// Synchronous gossip round: h from the half-step, slow gradient tracking
// for y, slow partial averaging for x, then checkpoint rotation. Mixing
// reads frozen snapshots of every node's buffers.
void communicate(SwarmState& swarm, const topology::MixingMatrix& mixing,
                 std::span<const problems::GradientOracle> oracles,
                 double gamma_t, CommReset reset);

// Observation points for invariant checks; all callbacks optional.
struct RunHooks {
    // State at iteration t, before the step; gamma_t / alpha_{t+1} as used.
    std::function<void(const SwarmState&, double gamma_t, double alpha_next)>
        before_step;
    // Right after a communication round updated the buffers (t already
    // advanced).
    std::function<void(const SwarmState&)> after_comm;
    // State at t+1, every iteration.
    std::function<void(const SwarmState&)> after_step;
};

struct MetricsOptions {
    std::int64_t cadence = 1;  // log rows at t = 0, cadence, 2*cadence, ..., T
    bool timing = false;       // fill wall_nanos (breaks byte-reproducibility)
};

// Drives one algorithm over a swarm of nodes. Deterministic in
// (params, seed, x0): every batch is drawn from the node's
// (seed, node, batch, iterate-index) stream.
class Runner {
public:
    Runner(Algorithm algo, AlgoParams params, const topology::MixingMatrix& mixing,
           std::vector<problems::GradientOracle> oracles, std::uint64_t seed,
           Eigen::VectorXd x0);

    metrics::Trajectory run(const MetricsOptions& options = {},
                            const RunHooks* hooks = nullptr);

    const SwarmState& swarm() const { return swarm_; }
    int dimension() const { return dimension_; }

private:
    std::vector<int> draw_batch(int node, std::int64_t iterate_index) const;
    void refresh_sgd_direction(std::int64_t iterate_index);
    void check_finite(std::int64_t iteration) const;
    metrics::MetricsRow make_row(std::int64_t wall_nanos) const;

    Algorithm algo_;
    AlgoParams params_;
    topology::MixingMatrix mixing_;
    std::vector<problems::GradientOracle> oracles_;
    std::uint64_t seed_;
    int dimension_;
    SwarmState swarm_;
};

// Convenience wrappers with the per-algorithm names.
metrics::Trajectory run_dse_mvr(const AlgoParams& params,
                                const topology::MixingMatrix& mixing,
                                std::vector<problems::GradientOracle> oracles,
                                std::uint64_t seed, Eigen::VectorXd x0,
                                const MetricsOptions& options = {},
                                const RunHooks* hooks = nullptr);
metrics::Trajectory run_dse_sgd(const AlgoParams& params,
                                const topology::MixingMatrix& mixing,
                                std::vector<problems::GradientOracle> oracles,
                                std::uint64_t seed, Eigen::VectorXd x0,
                                const MetricsOptions& options = {},
                                const RunHooks* hooks = nullptr);
metrics::Trajectory run_dsgd(const AlgoParams& params,
                             const topology::MixingMatrix& mixing,
                             std::vector<problems::GradientOracle> oracles,
                             std::uint64_t seed, Eigen::VectorXd x0,
                             const MetricsOptions& options = {},
                             const RunHooks* hooks = nullptr);
metrics::Trajectory run_dlsgd(const AlgoParams& params,
                              const topology::MixingMatrix& mixing,
                              std::vector<problems::GradientOracle> oracles,
                              std::uint64_t seed, Eigen::VectorXd x0,
                              const MetricsOptions& options = {},
                              const RunHooks* hooks = nullptr);

}  // namespace dse::optimizers
