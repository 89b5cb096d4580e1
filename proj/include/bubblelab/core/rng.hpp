#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace bubblelab {

/// Deterministic, platform-stable random stream keyed by (master_seed,
/// stream_id).
///
/// Construction mixes the two keys through SplitMix64 and seeds a
/// std::mt19937_64, whose output sequence is fixed by the C++ standard.
/// Uniforms take the top 53 bits of one engine word, shifted to lie strictly
/// inside (0,1); normals apply the inverse normal CDF to one uniform. Every
/// variate therefore consumes exactly one engine word, so a sequence of draws
/// is invariant to how it is partitioned into chunks, and identical
/// (master_seed, stream_id) pairs reproduce identical sequences on any
/// platform and worker count.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    /// One uniform variate, strictly inside (0,1).
    [[nodiscard]] double uniform();
    /// One standard normal variate (inverse-CDF transform of uniform()).
    [[nodiscard]] double normal();
    /// +1 or -1 with probability 1/2 each.
    [[nodiscard]] int rademacher();
    /// Uniform integer in [0, n) (rejection-free 64-bit multiply-shift).
    [[nodiscard]] std::size_t uniform_index(std::size_t n);

    [[nodiscard]] std::vector<double> normals(std::size_t n);
    [[nodiscard]] std::vector<double> uniforms(std::size_t n);

    [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

}  // namespace bubblelab
