#include <doctest.h>

#include <cmath>
#include <vector>

#include "dse/rng.hpp"

using dse::rng::Purpose;
using dse::rng::Stream;

TEST_CASE("streams are pure functions of their address") {
    Stream a(42, 3, Purpose::batch, 17);
    Stream b(42, 3, Purpose::batch, 17);
    for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("changing any address slot changes the stream") {
    const auto first = [](Stream s) { return s.next_u64(); };
    const std::uint64_t base = first(Stream(42, 3, Purpose::batch, 17));
    CHECK(base != first(Stream(43, 3, Purpose::batch, 17)));
    CHECK(base != first(Stream(42, 4, Purpose::batch, 17)));
    CHECK(base != first(Stream(42, 3, Purpose::dataset, 17)));
    CHECK(base != first(Stream(42, 3, Purpose::batch, 18)));
}

TEST_CASE("next_unit stays in [0,1) and looks uniform") {
    Stream s(7, 0, Purpose::probe, 0);
    double sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const double u = s.next_unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // mean of U[0,1): sd of the mean is 1/sqrt(12 n) ~ 9.1e-4675? no: ~0.00091
    CHECK(std::abs(sum / n - 0.5) < 5.0 * (1.0 / std::sqrt(12.0 * n)));
}

TEST_CASE("normal deviates have the right first two moments") {
    Stream s(11, 0, Purpose::probe, 0);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = s.next_normal();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("gamma deviates match their mean") {
    for (const double shape : {0.1, 0.6, 1.0, 2.5, 9.0}) {
        Stream s(13, 0, Purpose::probe, static_cast<std::uint64_t>(shape * 10));
        const int n = 100000;
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += s.next_gamma(shape);
        // E = shape, Var = shape; 5 standard errors.
        const double se = std::sqrt(shape / n);
        CHECK(std::abs(sum / n - shape) < 5.0 * se);
    }
}

TEST_CASE("dirichlet draws live on the simplex") {
    Stream s(17, 0, Purpose::partition, 0);
    for (const double alpha : {0.1, 1.0, 1e6}) {
        const auto p = dse::rng::dirichlet_symmetric(s, alpha, 8);
        double total = 0.0;
        for (double v : p) {
            CHECK(v >= 0.0);
            total += v;
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
}
