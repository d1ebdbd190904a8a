#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kacphi {

// splitmix64: standard 64-bit mixer, used to derive independent stream seeds
// (e.g. per replica) from one base seed without correlated low bits.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d49b329c62263ULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
    splitmix64(s);
    return splitmix64(s);
}

// mt19937_64 core with hand-rolled variate maps. The maps are spelled out
// (rather than std::*_distribution) so a seed pins the trajectory bit-for-bit
// independent of the standard library implementation.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0x1234abcdULL) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // uniform on (0,1]: never returns 0, safe for log()
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    // uniform on [0,1)
    double uniform_co() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

    // integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection-free enough for our n << 2^64; use rejection
        // to keep exact uniformity.
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

    // standard normal via Box-Muller (deterministic draw order, 2 uniforms each)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace kacphi
