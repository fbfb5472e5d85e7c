#include "dse/optimizers.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <utility>

#include "dse/errors.hpp"

namespace dse::optimizers {

std::string to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::dse_mvr: return "dse_mvr";
        case Algorithm::dse_sgd: return "dse_sgd";
        case Algorithm::dsgd: return "dsgd";
        case Algorithm::dlsgd: return "dlsgd";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "dse_mvr") return Algorithm::dse_mvr;
    if (name == "dse_sgd") return Algorithm::dse_sgd;
    if (name == "dsgd") return Algorithm::dsgd;
    if (name == "dlsgd") return Algorithm::dlsgd;
    throw ConfigError("unknown algorithm: " + name);
}

double GammaSchedule::at(std::int64_t t) const {
    switch (mode) {
        case Mode::constant:
            return base;
        case Mode::halving: {
            double value = base;
            if (horizon > 0) {
                if (t >= horizon / 2) value /= 2.0;
                if (t >= (3 * horizon) / 4) value /= 2.0;
            }
            return value;
        }
    }
    return base;
}

double AlphaSchedule::at(std::int64_t t) const {
    switch (mode) {
        case Mode::constant:
            return base;
        case Mode::decay:
            return base * std::pow(factor, static_cast<double>(t / tau));
    }
    return base;
}

namespace {

Eigen::VectorXd mean_of(const std::vector<NodeState>& nodes,
                        Eigen::VectorXd NodeState::* field) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero((nodes.front().*field).size());
    for (const NodeState& node : nodes) sum += node.*field;
    return sum / static_cast<double>(nodes.size());
}

}  // namespace

Eigen::VectorXd SwarmState::mean_x() const { return mean_of(nodes, &NodeState::x); }
Eigen::VectorXd SwarmState::mean_v() const { return mean_of(nodes, &NodeState::v); }
Eigen::VectorXd SwarmState::mean_y() const { return mean_of(nodes, &NodeState::y); }
Eigen::VectorXd SwarmState::mean_h() const { return mean_of(nodes, &NodeState::h); }

Eigen::MatrixXd SwarmState::stack_x() const {
    Eigen::MatrixXd out(nodes.front().x.size(),
                        static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i)
        out.col(static_cast<Eigen::Index>(i)) = nodes[i].x;
    return out;
}

std::int64_t tau_prev(std::int64_t t, std::int64_t tau) {
    if (tau < 1) throw ContractViolation("tau_prev: tau >= 1");
    if (t < 0) throw ContractViolation("tau_prev: t >= 0");
    return t - t % tau;
}

void local_step_mvr(NodeState& node, const problems::GradientOracle& oracle,
                    double gamma, double alpha, std::span<const int> batch) {
    const Eigen::VectorXd x_old = node.x;
    node.x -= gamma * node.v;
    const Eigen::VectorXd g_new = oracle.stochastic_gradient(node.x, batch);
    const Eigen::VectorXd g_old = oracle.stochastic_gradient(x_old, batch);
    node.v = g_new + (1.0 - alpha) * (node.v - g_old);
}

void communicate(SwarmState& swarm, const topology::MixingMatrix& mixing,
                 std::span<const problems::GradientOracle> oracles,
                 double gamma_t, CommReset reset) {
    const std::size_t n = swarm.nodes.size();
    if (static_cast<std::size_t>(mixing.size()) != n)
        throw ContractViolation("communicate: mixing matrix size mismatch");
    if (oracles.size() != n)
        throw ContractViolation("communicate: oracle count mismatch");
    const Eigen::MatrixXd& w = mixing.w();

    // Accumulated descent over the round, from the half-step (never stored
    // into x).
    std::vector<Eigen::VectorXd> h_new(n), tracked(n), y_new(n), x_new(n);
    for (std::size_t i = 0; i < n; ++i) {
        const NodeState& node = swarm.nodes[i];
        h_new[i] = node.x_ckpt - (node.x - gamma_t * node.v);
    }
    // Slow gradient tracking: gossip y_prev + h_new - h_prev.
    for (std::size_t i = 0; i < n; ++i)
        tracked[i] = swarm.nodes[i].y_prev + h_new[i] - swarm.nodes[i].h_prev;
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(h_new[i].size());
        for (std::size_t j = 0; j < n; ++j) {
            const double wij = w(static_cast<Eigen::Index>(i),
                                 static_cast<Eigen::Index>(j));
            if (wij != 0.0) acc += wij * tracked[j];
        }
        y_new[i] = std::move(acc);
    }
    // Slow partial averaging: gossip x_ckpt - y_new.
    std::vector<Eigen::VectorXd> shifted(n);
    for (std::size_t j = 0; j < n; ++j)
        shifted[j] = swarm.nodes[j].x_ckpt - y_new[j];
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(shifted[i].size());
        for (std::size_t j = 0; j < n; ++j) {
            const double wij = w(static_cast<Eigen::Index>(i),
                                 static_cast<Eigen::Index>(j));
            if (wij != 0.0) acc += wij * shifted[j];
        }
        x_new[i] = std::move(acc);
    }

    for (std::size_t i = 0; i < n; ++i) {
        NodeState& node = swarm.nodes[i];
        node.x = x_new[i];
        node.h = h_new[i];
        node.y = y_new[i];
        node.x_ckpt = node.x;
        node.h_prev = node.h;
        node.y_prev = node.y;
    }
    if (reset == CommReset::full_gradient) {
        for (std::size_t i = 0; i < n; ++i)
            swarm.nodes[i].v = oracles[i].full_gradient(swarm.nodes[i].x);
    }
}

Runner::Runner(Algorithm algo, AlgoParams params,
               const topology::MixingMatrix& mixing,
               std::vector<problems::GradientOracle> oracles,
               std::uint64_t seed, Eigen::VectorXd x0)
    : algo_(algo),
      params_(std::move(params)),
      mixing_(mixing),
      oracles_(std::move(oracles)),
      seed_(seed),
      dimension_(static_cast<int>(x0.size())) {
    if (oracles_.empty()) throw ContractViolation("runner: needs at least one node");
    if (static_cast<std::size_t>(mixing_.size()) != oracles_.size())
        throw ContractViolation("runner: mixing matrix size mismatch");
    for (const auto& oracle : oracles_)
        if (oracle.dimension() != dimension_)
            throw ContractViolation("runner: oracle dimension mismatch");
    if (algo_ == Algorithm::dsgd) params_.tau = 1;  // communicates every step
    if (params_.tau < 1) throw ContractViolation("runner: tau >= 1");
    if (params_.batch_size < 1) throw ContractViolation("runner: batch size >= 1");
    if (params_.iterations < 0) throw ContractViolation("runner: T >= 0");
    if (params_.iterations % params_.tau != 0)
        throw ContractViolation("runner: T mod tau must be 0");

    const std::size_t n = oracles_.size();
    swarm_.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        NodeState& node = swarm_.nodes[i];
        node.x = x0;
        node.v = Eigen::VectorXd::Zero(dimension_);
        node.y = Eigen::VectorXd::Zero(dimension_);
        node.h = Eigen::VectorXd::Zero(dimension_);
        node.x_ckpt = x0;
        node.h_prev = Eigen::VectorXd::Zero(dimension_);
        node.y_prev = Eigen::VectorXd::Zero(dimension_);
    }
    swarm_.t = 0;
    swarm_.comm_rounds = 0;

    // Direction init: full local gradient for standard DSE-MVR (Alg. line 3),
    // a counter-0 mini-batch everywhere else.
    for (std::size_t i = 0; i < n; ++i) {
        NodeState& node = swarm_.nodes[i];
        if (algo_ == Algorithm::dse_mvr && params_.mvr_full_reset) {
            node.v = oracles_[i].full_gradient(node.x);
        } else {
            const auto batch = draw_batch(static_cast<int>(i), 0);
            node.v = oracles_[i].stochastic_gradient(node.x, batch);
        }
    }
}

std::vector<int> Runner::draw_batch(int node, std::int64_t iterate_index) const {
    const int shard_size = oracles_[static_cast<std::size_t>(node)].shard_size();
    if (params_.full_batch) {
        std::vector<int> all(static_cast<std::size_t>(shard_size));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    rng::Stream stream(seed_, static_cast<std::uint64_t>(node),
                       rng::Purpose::batch,
                       static_cast<std::uint64_t>(iterate_index));
    return problems::sample_batch(stream, shard_size, params_.batch_size);
}

void Runner::refresh_sgd_direction(std::int64_t iterate_index) {
    for (std::size_t i = 0; i < oracles_.size(); ++i) {
        const auto batch = draw_batch(static_cast<int>(i), iterate_index);
        swarm_.nodes[i].v =
            oracles_[i].stochastic_gradient(swarm_.nodes[i].x, batch);
    }
}

void Runner::check_finite(std::int64_t iteration) const {
    for (const NodeState& node : swarm_.nodes) {
        if (!node.x.allFinite() || !node.v.allFinite())
            throw DivergenceError(iteration,
                                  "non-finite parameter at iteration " +
                                      std::to_string(iteration));
    }
}

metrics::MetricsRow Runner::make_row(std::int64_t wall_nanos) const {
    metrics::MetricsRow row;
    row.t = swarm_.t;
    row.comm_rounds = swarm_.comm_rounds;
    const Eigen::VectorXd mean = swarm_.mean_x();
    row.loss = metrics::global_loss(oracles_, mean);
    row.grad_norm_sq = metrics::global_grad_norm_sq(oracles_, mean);
    row.consensus_sq = metrics::consensus_distance_sq(swarm_.stack_x());
    row.gamma_t = params_.gamma.at(swarm_.t);
    row.alpha_t = params_.alpha.at(swarm_.t);
    row.wall_nanos = wall_nanos;
    return row;
}

metrics::Trajectory Runner::run(const MetricsOptions& options,
                                const RunHooks* hooks) {
    const std::int64_t cadence = options.cadence >= 1 ? options.cadence : 1;
    const auto started = std::chrono::steady_clock::now();
    const auto elapsed_nanos = [&]() -> std::int64_t {
        if (!options.timing) return 0;
        return std::chrono::duration_cast<std::chrono::nanoseconds>(
                   std::chrono::steady_clock::now() - started)
            .count();
    };

    metrics::Trajectory trajectory;
    trajectory.cadence = cadence;
    trajectory.rows.push_back(make_row(elapsed_nanos()));

    const std::size_t n = oracles_.size();
    for (std::int64_t t = 0; t < params_.iterations; ++t) {
        const double gamma_t = params_.gamma.at(t);
        const double alpha_next = params_.alpha.at(t + 1);
        if (hooks && hooks->before_step) hooks->before_step(swarm_, gamma_t, alpha_next);

        const bool comm_now = (t + 1) % params_.tau == 0;
        switch (algo_) {
            case Algorithm::dse_mvr: {
                if (!comm_now) {
                    for (std::size_t i = 0; i < n; ++i) {
                        const auto batch = draw_batch(static_cast<int>(i), t + 1);
                        local_step_mvr(swarm_.nodes[i], oracles_[i], gamma_t,
                                       alpha_next, batch);
                    }
                } else if (params_.mvr_full_reset) {
                    communicate(swarm_, mixing_, oracles_, gamma_t,
                                CommReset::full_gradient);
                    ++swarm_.comm_rounds;
                } else {
                    // Degenerate mode: the MVR direction update runs at the
                    // communicated iterate instead of the full-gradient reset.
                    std::vector<Eigen::VectorXd> x_old(n);
                    for (std::size_t i = 0; i < n; ++i) x_old[i] = swarm_.nodes[i].x;
                    communicate(swarm_, mixing_, oracles_, gamma_t, CommReset::none);
                    ++swarm_.comm_rounds;
                    for (std::size_t i = 0; i < n; ++i) {
                        NodeState& node = swarm_.nodes[i];
                        const auto batch = draw_batch(static_cast<int>(i), t + 1);
                        const Eigen::VectorXd g_new =
                            oracles_[i].stochastic_gradient(node.x, batch);
                        const Eigen::VectorXd g_old =
                            oracles_[i].stochastic_gradient(x_old[i], batch);
                        node.v = g_new + (1.0 - alpha_next) * (node.v - g_old);
                    }
                }
                break;
            }
            case Algorithm::dse_sgd: {
                if (!comm_now) {
                    for (std::size_t i = 0; i < n; ++i)
                        swarm_.nodes[i].x -= gamma_t * swarm_.nodes[i].v;
                } else {
                    communicate(swarm_, mixing_, oracles_, gamma_t, CommReset::none);
                    ++swarm_.comm_rounds;
                }
                refresh_sgd_direction(t + 1);
                break;
            }
            case Algorithm::dsgd: {
                // X_{t+1} = (X_t - gamma G_t) W, one gossip every step.
                std::vector<Eigen::VectorXd> half(n);
                for (std::size_t i = 0; i < n; ++i)
                    half[i] = swarm_.nodes[i].x - gamma_t * swarm_.nodes[i].v;
                const Eigen::MatrixXd& w = mixing_.w();
                for (std::size_t i = 0; i < n; ++i) {
                    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dimension_);
                    for (std::size_t j = 0; j < n; ++j) {
                        const double wij = w(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(j));
                        if (wij != 0.0) acc += wij * half[j];
                    }
                    swarm_.nodes[i].x = std::move(acc);
                }
                ++swarm_.comm_rounds;
                refresh_sgd_direction(t + 1);
                break;
            }
            case Algorithm::dlsgd: {
                for (std::size_t i = 0; i < n; ++i)
                    swarm_.nodes[i].x -= gamma_t * swarm_.nodes[i].v;
                if (comm_now) {
                    // Plain partial averaging, no tracking buffers.
                    std::vector<Eigen::VectorXd> half(n);
                    for (std::size_t i = 0; i < n; ++i) half[i] = swarm_.nodes[i].x;
                    const Eigen::MatrixXd& w = mixing_.w();
                    for (std::size_t i = 0; i < n; ++i) {
                        Eigen::VectorXd acc = Eigen::VectorXd::Zero(dimension_);
                        for (std::size_t j = 0; j < n; ++j) {
                            const double wij = w(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(j));
                            if (wij != 0.0) acc += wij * half[j];
                        }
                        swarm_.nodes[i].x = std::move(acc);
                    }
                    ++swarm_.comm_rounds;
                }
                refresh_sgd_direction(t + 1);
                break;
            }
        }

        swarm_.t = t + 1;
        check_finite(t);
        if (hooks) {
            if (comm_now && hooks->after_comm &&
                (algo_ == Algorithm::dse_mvr || algo_ == Algorithm::dse_sgd))
                hooks->after_comm(swarm_);
            if (hooks->after_step) hooks->after_step(swarm_);
        }
        if ((t + 1) % cadence == 0 || t + 1 == params_.iterations)
            trajectory.rows.push_back(make_row(elapsed_nanos()));
    }
    return trajectory;
}

namespace {

metrics::Trajectory run_with(Algorithm algo, const AlgoParams& params,
                             const topology::MixingMatrix& mixing,
                             std::vector<problems::GradientOracle> oracles,
                             std::uint64_t seed, Eigen::VectorXd x0,
                             const MetricsOptions& options,
                             const RunHooks* hooks) {
    Runner runner(algo, params, mixing, std::move(oracles), seed, std::move(x0));
    return runner.run(options, hooks);
}

}  // namespace

metrics::Trajectory run_dse_mvr(const AlgoParams& params,
                                const topology::MixingMatrix& mixing,
                                std::vector<problems::GradientOracle> oracles,
                                std::uint64_t seed, Eigen::VectorXd x0,
                                const MetricsOptions& options,
                                const RunHooks* hooks) {
    return run_with(Algorithm::dse_mvr, params, mixing, std::move(oracles), seed,
                    std::move(x0), options, hooks);
}

metrics::Trajectory run_dse_sgd(const AlgoParams& params,
                                const topology::MixingMatrix& mixing,
                                std::vector<problems::GradientOracle> oracles,
                                std::uint64_t seed, Eigen::VectorXd x0,
                                const MetricsOptions& options,
                                const RunHooks* hooks) {
    return run_with(Algorithm::dse_sgd, params, mixing, std::move(oracles), seed,
                    std::move(x0), options, hooks);
}

metrics::Trajectory run_dsgd(const AlgoParams& params,
                             const topology::MixingMatrix& mixing,
                             std::vector<problems::GradientOracle> oracles,
                             std::uint64_t seed, Eigen::VectorXd x0,
                             const MetricsOptions& options, const RunHooks* hooks) {
    return run_with(Algorithm::dsgd, params, mixing, std::move(oracles), seed,
                    std::move(x0), options, hooks);
}

metrics::Trajectory run_dlsgd(const AlgoParams& params,
                              const topology::MixingMatrix& mixing,
                              std::vector<problems::GradientOracle> oracles,
                              std::uint64_t seed, Eigen::VectorXd x0,
                              const MetricsOptions& options, const RunHooks* hooks) {
    return run_with(Algorithm::dlsgd, params, mixing, std::move(oracles), seed,
                    std::move(x0), options, hooks);
}

}  // namespace dse::optimizers
