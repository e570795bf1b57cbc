#pragma once

#include <cstdint>
#include <random>

namespace tgk {

// splitmix64 finalizer; decorrelates seeds of derived substreams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic random source. All library randomness goes through this class
// so a given seed reproduces results bit for bit across runs: uniforms come
// straight off the engine and normals through the inverse CDF, which keeps
// the stream stateless (std::normal_distribution caches a spare variate and
// is implementation-defined besides).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(mix64(seed)) {}

    // Independent child stream for work item `index` of a seeded task.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix64(seed) ^ mix64(index + 0x9E3779B97F4A7C15ull));
    }

    // Uniform on (0,1); never returns an exact endpoint.
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal();  // standard normal via inverse CDF

    std::uint64_t next_u64() { return eng_(); }

    // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 eng_;
};

}  // namespace tgk
