#include "dse/rng.hpp"

#include <cmath>

#include "dse/errors.hpp"

namespace dse::rng {

std::uint64_t Stream::next_below(std::uint64_t n) {
    if (n == 0) throw ContractViolation("next_below: n must be positive");
    // 128-bit multiply-shift keeps the map unbiased enough for any n that
    // fits in 53 bits; shard sizes and class counts are far below that.
    const std::uint64_t x = next_u64();
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(x) * n) >> 64);
}

double Stream::next_normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // 1 - u keeps the argument of log strictly positive.
    const double u1 = 1.0 - next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

double Stream::next_gamma(double shape) {
    if (!(shape > 0.0)) throw ContractViolation("next_gamma: shape must be positive");
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a+1) * U^(1/a)
        const double u = next_unit();
        return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_unit();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> dirichlet_symmetric(Stream& stream, double alpha, int n) {
    if (!(alpha > 0.0)) throw ContractViolation("dirichlet: alpha must be positive");
    if (n < 1) throw ContractViolation("dirichlet: n must be positive");
    std::vector<double> p(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (double& v : p) {
        v = stream.next_gamma(alpha);
        sum += v;
    }
    if (sum <= 0.0) {
        // All gammas underflowed (possible for very small alpha); fall back
        // to a single uniform winner so the draw stays a valid simplex point.
        const std::uint64_t w = stream.next_below(static_cast<std::uint64_t>(n));
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = (i == w) ? 1.0 : 0.0;
        return p;
    }
    for (double& v : p) v /= sum;
    return p;
}

}  // namespace dse::rng
