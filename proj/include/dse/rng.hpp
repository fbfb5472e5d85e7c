#pragma once

#include <cstdint>
#include <vector>

namespace dse::rng {

// 64-bit finalizer from SplitMix64 (Vigna). Bijective mixing of the state.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Keying slots for independent streams. Every random decision in the
// simulator is drawn from a stream addressed by
// (master_seed, node_id, purpose, counter); re-running any single node's
// computation in isolation reproduces its in-run values.
enum class Purpose : std::uint64_t {
    dataset = 1,      // feature/label generation, counter = sample index
    ground_truth = 2, // hidden parameter, counter = 0
    partition = 3,    // Dirichlet proportions, counter = retry attempt
    shuffle = 4,      // per-class sample shuffle, counter = retry attempt
    batch = 5,        // mini-batch indices, counter = iterate index
    init = 6,         // shared x0, counter = 0
    probe = 7,        // test-only Monte-Carlo redraws
};

// Counter-based stream: a keyed SplitMix64 sequence. The key is a pure
// function of the four addressing values, so streams never overlap and can
// be reconstructed independently of execution order.
class Stream {
public:
    Stream(std::uint64_t master_seed, std::uint64_t node_id, Purpose purpose,
           std::uint64_t counter) {
        std::uint64_t k = mix64(master_seed);
        k = mix64(k ^ (node_id * 0x9e3779b97f4a7c15ULL));
        k = mix64(k ^ (static_cast<std::uint64_t>(purpose) * 0xbf58476d1ce4e5b9ULL));
        k = mix64(k ^ (counter * 0x94d049bb133111ebULL));
        state_ = k;
    }

    std::uint64_t next_u64() { return mix64(state_ += 0x9e3779b97f4a7c15ULL); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t next_below(std::uint64_t n);

    // Standard normal via Box-Muller; the second deviate of each pair is
    // cached inside the stream.
    double next_normal();

    // Gamma(shape, 1) via Marsaglia-Tsang, with the power boost for
    // shape < 1.
    double next_gamma(double shape);

private:
    std::uint64_t state_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// Dirichlet(alpha, ..., alpha) draw of length n via normalized gammas.
std::vector<double> dirichlet_symmetric(Stream& stream, double alpha, int n);

}  // namespace dse::rng
