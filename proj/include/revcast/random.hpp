#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace revcast {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Order-sensitive seed combination; independent of any processing order.
template <class... Parts>
std::uint64_t mix_seed(std::uint64_t seed, Parts... parts) {
    std::uint64_t h = splitmix64(seed);
    ((h = splitmix64(h ^ static_cast<std::uint64_t>(parts))), ...);
    return h;
}

/// Standard Student-t draw; infinite (or huge) dof degenerates to N(0, 1).
class StudentTSampler {
public:
    explicit StudentTSampler(double dof)
        : dof_(dof), normal_(dof_is_normal(dof)), chi_(normal_ ? 1.0 : dof) {}

    template <class Engine>
    double operator()(Engine& rng) {
        const double z = gauss_(rng);
        if (normal_) return z;
        return z / std::sqrt(chi_(rng) / dof_);
    }

private:
    static bool dof_is_normal(double dof) { return !std::isfinite(dof) || dof > 1e7; }

    double dof_;
    bool normal_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
    std::chi_squared_distribution<double> chi_;
};

}  // namespace revcast
