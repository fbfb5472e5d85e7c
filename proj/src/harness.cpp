#include "dse/harness.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "dse/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace dse::harness {

namespace {

topology::MixingMatrix build_mixing(const RunConfig& config) {
    const topology::Graph graph = config.topology_kind == "ring"
                                      ? topology::build_ring(config.n_nodes)
                                      : topology::build_complete(config.n_nodes);
    return topology::metropolis_hastings_weights(graph);
}

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

}  // namespace

PreparedRun prepare(const RunConfig& config) {
    topology::MixingMatrix mixing = build_mixing(config);
    const double lambda = mixing.lambda();

    const int total_samples = config.n_nodes * config.samples_per_node;
    problems::Dataset dataset = problems::generate_synthetic(
        config.seed, total_samples, config.dimension, config.problem_kind,
        config.label_noise, config.n_classes);
    const auto clusters = problems::partition_clusters(dataset);
    const auto shards = problems::dirichlet_partition(
        dataset.samples, clusters, config.omega, config.n_nodes, config.seed);
    auto oracles = problems::make_oracles(dataset, shards, config.l2);

    if (config.full_batch) {
        int min_shard = oracles.front().shard_size();
        for (const auto& oracle : oracles)
            min_shard = std::min(min_shard, oracle.shard_size());
        if (config.batch > min_shard)
            throw ConfigError("run.batch = " + std::to_string(config.batch) +
                              " exceeds the smallest shard (" +
                              std::to_string(min_shard) +
                              ") with full-batch semantics requested");
    }

    const double L_hat = config.L_override > 0.0
                             ? config.L_override
                             : problems::estimate_global_L(oracles);

    optimizers::AlgoParams params;
    params.tau = config.tau;
    params.batch_size = config.batch;
    params.iterations = config.iterations;
    params.full_batch = config.full_batch;
    params.mvr_full_reset = config.mvr_full_reset;

    if (config.gamma_mode == "constant") {
        params.gamma = {optimizers::GammaSchedule::Mode::constant,
                        config.gamma_value, config.iterations};
    } else if (config.gamma_mode == "halving") {
        params.gamma = {optimizers::GammaSchedule::Mode::halving,
                        config.gamma_value, config.iterations};
    } else {  // corollary
        const theory::Preset preset = theory::corollary_preset(
            config.gamma_corollary, config.iterations, config.n_nodes,
            config.batch, L_hat, config.tau, lambda);
        params.gamma = {optimizers::GammaSchedule::Mode::constant, preset.gamma,
                        config.iterations};
    }

    if (config.alpha_mode == "constant") {
        params.alpha = {optimizers::AlphaSchedule::Mode::constant,
                        config.alpha_value, config.tau, 0.99};
    } else if (config.alpha_mode == "decay") {
        params.alpha = {optimizers::AlphaSchedule::Mode::decay,
                        config.alpha_value, config.tau, 0.99};
    } else if (config.alpha_mode == "theory") {
        const double alpha = theory::alpha_theory(L_hat, params.gamma.base,
                                                  config.n_nodes, config.batch);
        params.alpha = {optimizers::AlphaSchedule::Mode::constant, alpha,
                        config.tau, 0.99};
    } else {  // corollary
        const theory::Preset preset = theory::corollary_preset(
            config.alpha_corollary, config.iterations, config.n_nodes,
            config.batch, L_hat, config.tau, lambda);
        params.alpha = {optimizers::AlphaSchedule::Mode::constant, preset.alpha,
                        config.tau, 0.99};
    }

    PreparedRun prepared{std::move(mixing), std::move(dataset),
                         std::move(oracles), params,
                         Eigen::VectorXd(),    0,
                         L_hat,               {}};

    const int param_dim = prepared.oracles.front().dimension();
    rng::Stream init_stream(config.seed, 0, rng::Purpose::init, 0);
    prepared.x0.resize(param_dim);
    for (int k = 0; k < param_dim; ++k)
        prepared.x0(k) = 0.1 * init_stream.next_normal();

    prepared.cadence = config.metrics_cadence > 0
                           ? config.metrics_cadence
                           : (config.iterations <= 10000 ? 1 : config.tau);

    const double bound =
        config.algorithm == optimizers::Algorithm::dse_mvr
            ? theory::max_gamma_dse_mvr(L_hat, lambda, config.tau)
            : theory::max_gamma_dse_sgd(L_hat, lambda, config.tau);
    if (params.gamma.base > bound) {
        prepared.warnings.push_back(
            "gamma = " + format_double(params.gamma.base) +
            " exceeds the theory bound " + format_double(bound) +
            " (L = " + format_double(L_hat) +
            ", lambda = " + format_double(lambda) + "); run proceeds");
    }
    return prepared;
}

void write_artifact(const std::filesystem::path& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream existing;
        existing << in.rdbuf();
        if (existing.str() == bytes) return;  // identical content, keep it
        throw IoError("artifact " + path.string() +
                      " already exists with different content; remove it first");
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<Eigen::VectorXd>& node_params) {
    if (node_params.empty()) throw ContractViolation("checkpoint: no nodes");
    const std::uint64_t n = node_params.size();
    const std::uint64_t d = static_cast<std::uint64_t>(node_params.front().size());
    for (const auto& x : node_params)
        if (static_cast<std::uint64_t>(x.size()) != d)
            throw ContractViolation("checkpoint: inconsistent dimensions");

    std::string bytes;
    bytes.reserve(4 + 16 + n * d * 8);
    bytes.append("DSE1", 4);
    const auto append_u64 = [&](std::uint64_t v) {
        char raw[8];
        std::memcpy(raw, &v, 8);
        bytes.append(raw, 8);
    };
    append_u64(n);
    append_u64(d);
    for (const auto& x : node_params) {
        for (std::uint64_t k = 0; k < d; ++k) {
            char raw[8];
            const double v = x(static_cast<Eigen::Index>(k));
            std::memcpy(raw, &v, 8);
            bytes.append(raw, 8);
        }
    }
    write_artifact(path, bytes);
}

std::vector<Eigen::VectorXd> read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "DSE1", 4) != 0)
        throw IoError("bad checkpoint magic in " + path.string());
    const auto read_u64 = [&]() {
        std::uint64_t v = 0;
        if (!in.read(reinterpret_cast<char*>(&v), 8))
            throw IoError("truncated checkpoint: " + path.string());
        return v;
    };
    const std::uint64_t n = read_u64();
    const std::uint64_t d = read_u64();
    std::vector<Eigen::VectorXd> out(n, Eigen::VectorXd(static_cast<Eigen::Index>(d)));
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t k = 0; k < d; ++k) {
            double v = 0.0;
            if (!in.read(reinterpret_cast<char*>(&v), 8))
                throw IoError("truncated checkpoint: " + path.string());
            out[i](static_cast<Eigen::Index>(k)) = v;
        }
    }
    return out;
}

RunArtifacts run_to_dir(const RunConfig& config,
                        const std::filesystem::path& outdir, bool timing) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);
    PreparedRun prepared = prepare(config);

    optimizers::Runner runner(config.algorithm, prepared.params, prepared.mixing,
                              prepared.oracles, config.seed, prepared.x0);
    optimizers::MetricsOptions options;
    options.cadence = prepared.cadence;
    options.timing = timing;
    metrics::Trajectory trajectory = runner.run(options);

    const std::string stem = "run-" + config_hash_hex(config);
    RunArtifacts artifacts;
    artifacts.csv_path = outdir / (stem + ".csv");
    artifacts.checkpoint_path = outdir / (stem + ".ckpt");
    artifacts.trajectory = std::move(trajectory);
    artifacts.warnings = std::move(prepared.warnings);

    write_artifact(artifacts.csv_path, metrics::to_csv(artifacts.trajectory));
    std::vector<Eigen::VectorXd> node_params;
    node_params.reserve(runner.swarm().nodes.size());
    for (const auto& node : runner.swarm().nodes) node_params.push_back(node.x);
    write_checkpoint(artifacts.checkpoint_path, node_params);
    return artifacts;
}

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    out << "L_hat = " << format_double(L_hat) << "\n";
    out << "lambda = " << format_double(lambda) << "\n";
    out << "max_gamma = " << format_double(max_gamma) << "\n";
    out << "gamma0 = " << format_double(gamma0) << "  ["
        << (gamma_within_bound ? "within" : "ABOVE") << " theory bound]\n";
    out << "alpha_theory = " << format_double(alpha_theory_value)
        << (alpha_theory_admissible ? "" : "  [outside (0,1]]") << "\n";
    out << "min_horizon corollary 1 = " << min_horizon_c1 << "\n";
    out << "min_horizon corollary 2/3 = " << min_horizon_c2 << "\n";
    out << "suggested b (corollary 2/3 large-batch) = " << suggested_b << "\n";
    out << "suggested tau (corollary 2) = " << suggested_tau_c2 << "\n";
    out << "suggested tau (corollary 3) = " << suggested_tau_c3 << "\n";
    out << "doubly_stochastic = " << (doubly_stochastic_ok ? "PASS" : "FAIL") << "\n";
    out << "connected = " << (connected_ok ? "PASS" : "FAIL") << "\n";
    return out.str();
}

ValidationReport validate_config(const RunConfig& config) {
    ValidationReport report;
    const topology::Graph graph =
        config.topology_kind == "ring" ? topology::build_ring(config.n_nodes)
                                       : topology::build_complete(config.n_nodes);
    report.connected_ok = topology::is_connected(graph);
    const topology::MixingMatrix mixing = topology::metropolis_hastings_weights(graph);
    try {
        topology::check_doubly_stochastic(mixing.w());
        report.doubly_stochastic_ok = true;
    } catch (const ContractViolation&) {
        report.doubly_stochastic_ok = false;
    }
    report.lambda = mixing.lambda();

    PreparedRun prepared = prepare(config);
    report.L_hat = prepared.L_hat;
    report.gamma0 = prepared.params.gamma.base;
    report.max_gamma =
        config.algorithm == optimizers::Algorithm::dse_mvr
            ? theory::max_gamma_dse_mvr(report.L_hat, report.lambda, config.tau)
            : theory::max_gamma_dse_sgd(report.L_hat, report.lambda, config.tau);
    report.gamma_within_bound = report.gamma0 <= report.max_gamma;
    report.alpha_theory_value =
        32.0 * report.L_hat * report.L_hat * report.gamma0 * report.gamma0 /
        (static_cast<double>(config.n_nodes) * static_cast<double>(config.batch));
    report.alpha_theory_admissible =
        report.alpha_theory_value > 0.0 && report.alpha_theory_value <= 1.0;
    report.min_horizon_c1 = theory::min_horizon(1, config.n_nodes, config.batch,
                                                config.tau, report.lambda);
    report.min_horizon_c2 = theory::min_horizon(2, config.n_nodes, config.batch,
                                                config.tau, report.lambda);
    report.suggested_b =
        theory::suggested_batch_size(config.iterations, config.n_nodes);
    report.suggested_tau_c2 =
        theory::suggested_tau(2, config.iterations, config.n_nodes);
    report.suggested_tau_c3 =
        theory::suggested_tau(3, config.iterations, config.n_nodes);
    return report;
}

void export_mixing_csv(const RunConfig& config,
                       const std::filesystem::path& path) {
    const topology::MixingMatrix mixing = build_mixing(config);
    std::string bytes;
    char buffer[64];
    for (int i = 0; i < mixing.size(); ++i) {
        for (int j = 0; j < mixing.size(); ++j) {
            std::snprintf(buffer, sizeof buffer, "%.17g", mixing.w()(i, j));
            bytes += buffer;
            bytes += (j + 1 == mixing.size()) ? '\n' : ',';
        }
    }
    write_artifact(path, bytes);
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
    std::vector<T> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        std::size_t begin = item.find_first_not_of(" \t");
        std::size_t end = item.find_last_not_of(" \t");
        if (begin == std::string::npos) continue;
        out.push_back(parse(item.substr(begin, end - begin + 1)));
    }
    return out;
}

}  // namespace

SweepSpec parse_sweep_text(const std::string& text, const std::string& origin) {
    SweepSpec spec;
    spec.base = parse_config_text(text, origin);

    // Second pass for the sweep.* keys (the config parser skips them).
    std::stringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.rfind("sweep.", 0) != 0) continue;
        try {
            if (key == "sweep.tau") {
                spec.taus = parse_list<std::int64_t>(
                    value, [](const std::string& s) { return std::stoll(s); });
            } else if (key == "sweep.b") {
                spec.batches = parse_list<int>(
                    value, [](const std::string& s) { return std::stoi(s); });
            } else if (key == "sweep.omega") {
                spec.omegas = parse_list<double>(
                    value, [](const std::string& s) { return std::stod(s); });
            } else if (key == "sweep.algorithm") {
                spec.algorithms = parse_list<optimizers::Algorithm>(
                    value, [](const std::string& s) {
                        return optimizers::algorithm_from_string(s);
                    });
            } else if (key == "sweep.seeds") {
                spec.seeds = parse_list<std::uint64_t>(
                    value, [](const std::string& s) { return std::stoull(s); });
            } else if (key == "sweep.cap") {
                spec.cap = std::stoll(value);
            } else {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": unknown sweep key `" + key + "`");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": malformed list for `" + key + "`");
        }
    }
    if (spec.seeds.empty()) spec.seeds = {spec.base.seed};

    std::size_t product = spec.seeds.size();
    product *= std::max<std::size_t>(1, spec.taus.size());
    product *= std::max<std::size_t>(1, spec.batches.size());
    product *= std::max<std::size_t>(1, spec.omegas.size());
    product *= std::max<std::size_t>(1, spec.algorithms.size());
    if (product > static_cast<std::size_t>(spec.cap))
        throw ConfigError(origin + ": sweep grid has " + std::to_string(product) +
                          " points, cap is " + std::to_string(spec.cap));
    return spec;
}

SweepSpec parse_sweep_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_sweep_text(buffer.str(), path.string());
}

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("DSE_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

SweepResult sweep(const SweepSpec& spec, const std::filesystem::path& outdir,
                  int threads) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);

    const std::vector<std::int64_t> taus =
        spec.taus.empty() ? std::vector<std::int64_t>{spec.base.tau} : spec.taus;
    const std::vector<int> batches =
        spec.batches.empty() ? std::vector<int>{spec.base.batch} : spec.batches;
    const std::vector<double> omegas =
        spec.omegas.empty() ? std::vector<double>{spec.base.omega} : spec.omegas;
    const std::vector<optimizers::Algorithm> algorithms =
        spec.algorithms.empty()
            ? std::vector<optimizers::Algorithm>{spec.base.algorithm}
            : spec.algorithms;

    struct GridPoint {
        RunConfig config;
        SweepRow row;
    };
    std::vector<GridPoint> grid;
    for (const auto tau : taus)
        for (const int b : batches)
            for (const double omega : omegas)
                for (const auto algo : algorithms)
                    for (const auto seed : spec.seeds) {
                        GridPoint point;
                        point.config = spec.base;
                        point.config.tau = tau;
                        point.config.batch = b;
                        point.config.omega = omega;
                        point.config.algorithm = algo;
                        point.config.seed = seed;
                        point.row.tau = tau;
                        point.row.batch = b;
                        point.row.omega = omega;
                        point.row.algorithm = algo;
                        point.row.seed = seed;
                        grid.push_back(std::move(point));
                    }

    const int workers =
        std::min<int>(resolve_threads(threads), static_cast<int>(grid.size()));
    std::mutex next_mutex;
    std::size_t next_index = 0;
    const auto work = [&]() {
        for (;;) {
            std::size_t index;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next_index >= grid.size()) return;
                index = next_index++;
            }
            GridPoint& point = grid[index];
            try {
                const RunArtifacts artifacts = run_to_dir(point.config, outdir);
                const metrics::MetricsRow& final_row =
                    artifacts.trajectory.final_row();
                point.row.status = "ok";
                point.row.final_loss = final_row.loss;
                point.row.final_grad_norm_sq = final_row.grad_norm_sq;
                point.row.min_loss = artifacts.trajectory.min_loss();
                point.row.comm_rounds_total = final_row.comm_rounds;
                point.row.csv_path = artifacts.csv_path;
            } catch (const DivergenceError&) {
                point.row.status = "divergence";
            } catch (const ConfigError&) {
                point.row.status = "config-error";
            } catch (const IoError&) {
                point.row.status = "io-error";
            } catch (const Error&) {
                point.row.status = "error";
            }
            if (point.row.status != "ok") {
                point.row.final_loss = std::numeric_limits<double>::quiet_NaN();
                point.row.final_grad_norm_sq =
                    std::numeric_limits<double>::quiet_NaN();
                point.row.min_loss = std::numeric_limits<double>::quiet_NaN();
                point.row.comm_rounds_total = 0;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int k = 0; k < workers; ++k) pool.emplace_back(work);
        for (auto& thread : pool) thread.join();
    }

    // Summary in grid order, independent of worker scheduling.
    std::string bytes;
    const bool many_taus = taus.size() > 1, many_b = batches.size() > 1;
    const bool many_omegas = omegas.size() > 1, many_algos = algorithms.size() > 1;
    {
        std::string header;
        if (many_taus) header += "tau,";
        if (many_b) header += "b,";
        if (many_omegas) header += "omega,";
        if (many_algos) header += "algorithm,";
        header +=
            "seed,status,final_loss,final_grad_norm_sq,min_loss,comm_rounds_total\n";
        bytes += header;
    }
    char buffer[96];
    for (const GridPoint& point : grid) {
        const SweepRow& row = point.row;
        if (many_taus) bytes += std::to_string(row.tau) + ",";
        if (many_b) bytes += std::to_string(row.batch) + ",";
        if (many_omegas) {
            std::snprintf(buffer, sizeof buffer, "%.17g,", row.omega);
            bytes += buffer;
        }
        if (many_algos) bytes += optimizers::to_string(row.algorithm) + ",";
        bytes += std::to_string(row.seed) + "," + row.status + ",";
        std::snprintf(buffer, sizeof buffer, "%.17g,%.17g,%.17g,",
                      row.final_loss, row.final_grad_norm_sq, row.min_loss);
        bytes += buffer;
        bytes += std::to_string(row.comm_rounds_total) + "\n";
    }

    SweepResult result;
    result.summary_path = outdir / "summary.csv";
    write_artifact(result.summary_path, bytes);
    for (GridPoint& point : grid) result.rows.push_back(std::move(point.row));
    return result;
}

}  // namespace dse::harness
