#pragma once

#include <cstdint>
#include <random>

namespace cwcs {

// SplitMix64 step (Steele/Lea/Flood mixing constants). Used only to derive
// independent stream seeds; the streams themselves run std::mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic stream seed keyed by (master seed, purpose salt, stream index).
// Keying by index (never by scheduling order) is what makes parallel runs
// reproducible for any worker count.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t salt,
                                        std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= salt * 0xff51afd7ed558ccdULL;
    std::uint64_t b = splitmix64(s);
    s ^= index * 0xc4ceb9fe1a85ec53ULL;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ c;
}

// Purpose salts for the experiment streams.
namespace stream_salt {
inline constexpr std::uint64_t trial = 0x747269616cULL;
inline constexpr std::uint64_t frame = 0x6672616d65ULL;
inline constexpr std::uint64_t gamma_draw = 0x67616d6d61ULL;
inline constexpr std::uint64_t perturb = 0x70657274ULL;
inline constexpr std::uint64_t probe = 0x70726f6265ULL;
}  // namespace stream_salt

// One independent random stream.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}
    RngStream(std::uint64_t master, std::uint64_t salt, std::uint64_t index)
        : eng_(derive_stream_seed(master, salt, index)) {}

    // Bipolar symbol from the top bit of the raw engine output.
    int bipolar() { return (eng_() >> 63) ? 1 : -1; }

    double uniform01() {  // in [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal(double sigma) { return sigma * normal_(eng_); }

    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace cwcs
