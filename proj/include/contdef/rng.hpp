#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace contdef {

// Deterministic, portable random primitives for the simulator.
//
// Every noise source in a run gets its own named stream ("proc-x-7",
// "meas-range-10-6", ...) whose seed is derived from the run seed and the
// stream name. Adding or removing one source never perturbs the draws of
// another, which keeps regression fixtures stable. Monte Carlo run seeds are
// derived from (base_seed, run_index) by the same mixing function.

// SplitMix64 step (Steele et al.). Advances the state and returns one word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// FNV-1a over the bytes of a stream name.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::string_view name) {
    std::uint64_t s = run_seed ^ fnv1a64(name);
    return splitmix64(s);
}

// Run 0 reuses the base seed unchanged so a single-run campaign and a direct
// simulation with that seed are the same run; later runs are mixed.
inline std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t run_index) {
    if (run_index == 0) return base_seed;
    std::uint64_t s = base_seed ^ (0xD1B54A32D192ED03ULL * run_index);
    return splitmix64(s);
}

// One independent stream of standard-normal draws (SplitMix64 + Box-Muller).
// Not thread-safe; use one stream per noise source.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : state_(seed) {}

    NormalStream(std::uint64_t run_seed, std::string_view name)
        : state_(derive_stream_seed(run_seed, name)) {}

    // Uniform in (0, 1].
    double uniform() {
        const std::uint64_t bits = splitmix64(state_);
        return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal draw.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double stddev) { return stddev == 0.0 ? 0.0 : stddev * normal(); }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace contdef
