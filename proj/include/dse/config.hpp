#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dse/optimizers.hpp"
#include "dse/problems.hpp"

namespace dse::harness {

// A fully described experiment. Parsed from a line-oriented
// `key = value` document with dotted sections (see README for the schema).
struct RunConfig {
    optimizers::Algorithm algorithm = optimizers::Algorithm::dse_sgd;
    std::uint64_t seed = 0;

    std::string topology_kind = "ring";  // ring | complete
    int n_nodes = 4;

    problems::ProblemKind problem_kind = problems::ProblemKind::least_squares;
    int dimension = 10;
    int samples_per_node = 50;
    double omega = 1e6;
    double label_noise = 0.0;
    int n_classes = 0;
    double l2 = 0.0;

    std::int64_t tau = 1;
    int batch = 1;
    std::int64_t iterations = 100;
    bool full_batch = false;
    bool mvr_full_reset = true;

    std::string gamma_mode = "constant";  // constant | halving | corollary
    double gamma_value = 0.01;
    int gamma_corollary = 2;

    std::string alpha_mode = "constant";  // constant | decay | theory | corollary
    double alpha_value = 1.0;
    int alpha_corollary = 2;

    std::int64_t metrics_cadence = 0;  // 0 = auto: 1 if T <= 10^4, else tau
    double L_override = 0.0;           // 0 = estimate from the data

    // Canonical re-serialization; artifact names hash this.
    std::string canonical_text() const;
};

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin = "<string>");
RunConfig parse_config_file(const std::filesystem::path& path);

// FNV-1a over the canonical text.
std::uint64_t config_hash(const RunConfig& config);
std::string config_hash_hex(const RunConfig& config);

}  // namespace dse::harness
