#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace phaselab {

// splitmix64 finalizer (Vigna's constants). Used as the documented
// seed-mixing function: disorder sample k of a plan draws its couplings
// from seed  base_seed XOR splitmix64(k).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t sample_seed(std::uint64_t base_seed, std::uint64_t k) noexcept {
    return base_seed ^ splitmix64(k);
}

// Deterministic random stream with a pinned algorithm end to end:
// std::mt19937_64 (fully specified by the standard, unlike the
// std::*_distribution adapters) plus fixed uniform and Box-Muller
// transforms. Identical seeds give identical streams everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t u64() { return engine_(); }

    // Uniform in (0, 1]: 53 random bits, never zero, so log() is safe.
    double uniform01() {
        return static_cast<double>((u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform index in [0, n) via 128-bit multiply-shift.
    int index(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(u64()) *
                                 static_cast<unsigned __int128>(n)) >> 64);
    }

    // Standard normal via Box-Muller; consumes two uniforms per pair.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * pi() * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static constexpr double pi() { return 3.14159265358979323846; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace phaselab
