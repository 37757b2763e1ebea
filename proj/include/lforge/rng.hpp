#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lforge/errors.hpp"

namespace lforge {

/// splitmix64 finalizer. Fixed 64-bit mixer used to derive sub-stream seeds
/// from a master seed so that parallel streams are uncorrelated.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Seed of sub-stream `stream` under `master`. Chain calls for nested splits,
/// e.g. derive_seed(derive_seed(master, trial), role).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return mix64(master ^ mix64(stream));
}

/// Deterministic random source. The engine (mt19937_64) is fully specified by
/// the standard; the distributions are hand-rolled because the std ones are
/// implementation-defined and would break bit-reproducibility across stdlibs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller. Two uniforms per draw, no cached twin,
    /// so the draw count per sample is fixed.
    double normal() {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// Uniform integer in [0, n). Unbiased (rejection sampling).
    std::uint64_t index(std::uint64_t n) {
        if (n == 0) {
            throw DomainError("Rng::index: n must be positive");
        }
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) {
                return r % n;
            }
        }
    }

    /// Uniformly random k-subset of {0,...,m_total-1} via partial
    /// Fisher-Yates shuffle; returned ascending.
    std::vector<int> sample_subset(int m_total, int k) {
        if (k < 0 || k > m_total) {
            throw DomainError("Rng::sample_subset: k out of range");
        }
        std::vector<int> pool(static_cast<std::size_t>(m_total));
        for (int i = 0; i < m_total; ++i) {
            pool[static_cast<std::size_t>(i)] = i;
        }
        for (int t = 0; t < k; ++t) {
            const auto offset = static_cast<int>(index(static_cast<std::uint64_t>(m_total - t)));
            std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(t + offset)]);
        }
        std::vector<int> subset(pool.begin(), pool.begin() + k);
        std::sort(subset.begin(), subset.end());
        return subset;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace lforge
