#include "dse/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dse/errors.hpp"

namespace dse::theory {

namespace {

void check_inputs(double L, double lambda, std::int64_t tau) {
    if (!(L > 0.0)) throw ContractViolation("max_gamma: L must be positive");
    if (tau < 1) throw ContractViolation("max_gamma: tau >= 1");
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw ContractViolation("max_gamma: lambda must lie in [0,1)");
}

double network_bound(double lambda, double L, std::int64_t tau, double scale) {
    if (lambda == 0.0) return std::numeric_limits<double>::infinity();
    const double one_minus = 1.0 - lambda * lambda;
    return (one_minus * one_minus) /
           (scale * std::sqrt(6.0) * lambda * lambda * L *
            static_cast<double>(tau));
}

}  // namespace

double max_gamma_dse_mvr(double L, double lambda, std::int64_t tau) {
    check_inputs(L, lambda, tau);
    const double base = 1.0 / (8.0 * L * static_cast<double>(tau));
    return std::min(base, network_bound(lambda, L, tau, 64.0));
}

double max_gamma_dse_sgd(double L, double lambda, std::int64_t tau) {
    check_inputs(L, lambda, tau);
    const double base = 1.0 / (4.0 * std::sqrt(2.0) * L * static_cast<double>(tau));
    return std::min(base, network_bound(lambda, L, tau, 32.0));
}

double alpha_theory(double L, double gamma, std::int64_t n_nodes,
                    std::int64_t batch_size) {
    if (!(L > 0.0) || gamma < 0.0 || n_nodes < 1 || batch_size < 1)
        throw ContractViolation("alpha_theory: invalid inputs");
    const double alpha = 32.0 * L * L * gamma * gamma /
                         (static_cast<double>(n_nodes) *
                          static_cast<double>(batch_size));
    if (alpha > 1.0)
        throw TheoryViolation("alpha_theory: 32 L^2 gamma^2 / (N b) = " +
                              std::to_string(alpha) +
                              " exceeds 1; shrink gamma");
    return alpha;
}

std::int64_t min_horizon(int corollary_id, std::int64_t n_nodes,
                         std::int64_t batch_size, std::int64_t tau,
                         double lambda) {
    if (n_nodes < 1 || batch_size < 1 || tau < 1)
        throw ContractViolation("min_horizon: invalid inputs");
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw ContractViolation("min_horizon: lambda must lie in [0,1)");
    const double n = static_cast<double>(n_nodes);
    const double b = static_cast<double>(batch_size);
    const double tau_d = static_cast<double>(tau);
    const double lam2 = lambda * lambda;
    const double one_minus = 1.0 - lam2;
    double bound = 0.0;
    switch (corollary_id) {
        case 1: {
            const double first = 512.0 * n * n * tau_d * tau_d * tau_d;
            const double second = std::pow(192.0, 3) * n * n * lam2 * lam2 * lam2 *
                                  tau_d * tau_d * tau_d / std::pow(one_minus, 6);
            bound = std::max(first, second);
            break;
        }
        case 2:
        case 3: {
            const double first = 64.0 * n * b * tau_d * tau_d;
            const double second = 192.0 * 192.0 * n * lam2 * lam2 * b * tau_d *
                                  tau_d / std::pow(one_minus, 4);
            bound = std::max(first, second);
            break;
        }
        default:
            throw ContractViolation("min_horizon: unknown corollary id " +
                                    std::to_string(corollary_id));
    }
    return static_cast<std::int64_t>(std::ceil(bound));
}

Preset corollary_preset(int corollary_id, std::int64_t T, std::int64_t n_nodes,
                        std::int64_t batch_size, double L, std::int64_t tau,
                        double lambda) {
    if (!(L > 0.0)) throw ContractViolation("corollary_preset: L must be positive");
    if (T < 1) throw ContractViolation("corollary_preset: T >= 1");
    const std::int64_t minimum =
        min_horizon(corollary_id, n_nodes, batch_size, tau, lambda);
    if (T < minimum)
        throw TheoryViolation("corollary " + std::to_string(corollary_id) +
                              " needs T >= " + std::to_string(minimum) +
                              ", got " + std::to_string(T));
    const double n = static_cast<double>(n_nodes);
    const double t = static_cast<double>(T);
    Preset preset;
    switch (corollary_id) {
        case 1:
            preset.gamma = std::pow(n, 2.0 / 3.0) / (L * std::cbrt(t));
            preset.alpha = std::cbrt(n) * std::pow(t, -2.0 / 3.0);
            break;
        case 2:
        case 3:
            preset.gamma = std::sqrt(static_cast<double>(batch_size) * n) /
                           (L * std::sqrt(t));
            preset.alpha = 1.0 / t;
            break;
        default:
            throw ContractViolation("corollary_preset: unknown corollary id " +
                                    std::to_string(corollary_id));
    }
    return preset;
}

std::int64_t suggested_batch_size(std::int64_t T, std::int64_t n_nodes) {
    if (T < 1 || n_nodes < 1)
        throw ContractViolation("suggested_batch_size: invalid inputs");
    const double value =
        std::cbrt(static_cast<double>(T)) / static_cast<double>(n_nodes);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(value)));
}

std::int64_t suggested_tau(int corollary_id, std::int64_t T,
                           std::int64_t n_nodes) {
    if (T < 1 || n_nodes < 1) throw ContractViolation("suggested_tau: invalid inputs");
    const double t = static_cast<double>(T);
    const double n = static_cast<double>(n_nodes);
    double value = 1.0;
    switch (corollary_id) {
        case 1:
            value = 2.0;  // tau = O(1) > 1
            break;
        case 2:
            value = std::sqrt(t) / std::pow(n, 2.0 / 3.0);
            break;
        case 3:
            value = std::pow(t, 0.25) / std::pow(n, 0.75);
            break;
        default:
            throw ContractViolation("suggested_tau: unknown corollary id " +
                                    std::to_string(corollary_id));
    }
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(value)));
}

}  // namespace dse::theory
