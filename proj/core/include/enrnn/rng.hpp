#pragma once
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace enrnn {

// Seeded generator with platform-independent draw semantics: doubles are
// built from the top 53 bits of mt19937_64 output, so the same seed yields
// the same stream on every build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on [lo, hi)
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t r = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return r < n ? r : n - 1;
    }

    // Derives an independent substream from (seed, tag); used to keep data
    // generation, parameter init etc. on separate deterministic streams.
    static Rng stream(std::uint64_t seed, std::string_view tag) {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return Rng(splitmix(seed ^ h));
    }

    std::mt19937_64& engine() { return engine_; }
    const std::mt19937_64& engine() const { return engine_; }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace enrnn
