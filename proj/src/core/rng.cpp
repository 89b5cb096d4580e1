#include "bubblelab/core/rng.hpp"

#include <boost/math/distributions/normal.hpp>

namespace bubblelab {

namespace {

// SplitMix64 (Steele, Lea & Flood 2014): used only to decorrelate the
// (master_seed, stream_id) pair into a single engine seed.
std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    const std::uint64_t a = splitmix64(s);
    s ^= stream * 0xD1B54A32D192ED03ULL;
    const std::uint64_t b = splitmix64(s);
    s = a ^ (b + 0x9E3779B97F4A7C15ULL);
    return splitmix64(s);
}

const boost::math::normal_distribution<double>& std_normal() {
    static const boost::math::normal_distribution<double> dist(0.0, 1.0);
    return dist;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id), engine_(mix_seed(master_seed, stream_id)) {}

double RngStream::uniform() {
    // Top 53 bits + half-step offset: values in {(k+0.5)*2^-53, k=0..2^53-1},
    // strictly inside (0,1) so the inverse CDF is always finite.
    const std::uint64_t word = engine_();
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return boost::math::quantile(std_normal(), uniform()); }

int RngStream::rademacher() { return (engine_() & 1ULL) ? 1 : -1; }

std::size_t RngStream::uniform_index(std::size_t n) {
    // Lemire multiply-shift; bias is O(n / 2^64), negligible for bootstrap use.
    const unsigned __int128 m =
        static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(n);
    return static_cast<std::size_t>(m >> 64);
}

std::vector<double> RngStream::normals(std::size_t n) {
    std::vector<double> out(n);
    for (auto& x : out) x = normal();
    return out;
}

std::vector<double> RngStream::uniforms(std::size_t n) {
    std::vector<double> out(n);
    for (auto& x : out) x = uniform();
    return out;
}

}  // namespace bubblelab
