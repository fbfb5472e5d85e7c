#pragma once

#include <cstdint>

namespace dse::theory {

// Largest admissible constant step size for DSE-MVR:
//   min{ 1/(8 L tau), (1-lambda^2)^2 / (64 sqrt(6) lambda^2 L tau) }.
// The second bound vanishes (is +inf) at lambda = 0, so a complete graph is
// always admissible.
double max_gamma_dse_mvr(double L, double lambda, std::int64_t tau);

// DSE-SGD variant: min{ 1/(4 sqrt(2) L tau),
//                       (1-lambda^2)^2 / (32 sqrt(6) lambda^2 L tau) }.
double max_gamma_dse_sgd(double L, double lambda, std::int64_t tau);

// Control parameter alpha = 32 L^2 gamma^2 / (N b). Throws TheoryViolation
// when the value leaves (0, 1].
double alpha_theory(double L, double gamma, std::int64_t n_nodes,
                    std::int64_t batch_size);

// Minimum horizon T for the corollary presets:
//   id 1: max{ 512 N^2 tau^3, 192^3 N^2 lambda^6 tau^3 / (1-lambda^2)^6 }
//   id 2, 3: max{ 64 N b tau^2, 192^2 N lambda^4 b tau^2 / (1-lambda^2)^4 }
// Returned as the ceiling of the real bound.
std::int64_t min_horizon(int corollary_id, std::int64_t n_nodes,
                         std::int64_t batch_size, std::int64_t tau,
                         double lambda);

struct Preset {
    double gamma = 0.0;
    double alpha = 0.0;
};

// Corollary presets:
//   id 1: gamma = N^(2/3) / (L T^(1/3)), alpha = N^(1/3) T^(-2/3)
//   id 2, 3: gamma = sqrt(b N) / (L sqrt(T)), alpha = 1/T
// Throws TheoryViolation (naming the required minimum) when T is below
// min_horizon for the corollary; tau/lambda default to the weakest case.
Preset corollary_preset(int corollary_id, std::int64_t T, std::int64_t n_nodes,
                        std::int64_t batch_size, double L, std::int64_t tau = 1,
                        double lambda = 0.0);

// The corollaries' big-O choices for b and tau with constant 1, rounded up
// to integers >= 1. Suggestions only; runs always use a fixed b and tau.
std::int64_t suggested_batch_size(std::int64_t T, std::int64_t n_nodes);
std::int64_t suggested_tau(int corollary_id, std::int64_t T,
                           std::int64_t n_nodes);

}  // namespace dse::theory
