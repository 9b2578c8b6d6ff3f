#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cdp {

// Seedable, splittable random stream. Child streams are derived from the
// parent seed and a salt only, never from the parent's draw position, so a
// split is reproducible regardless of how many values were consumed before it.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

    std::uint64_t seed() const { return seed_; }

    Rng split(std::uint64_t salt) const { return Rng(mix(seed_ + 0x9e3779b97f4a7c15ull * (salt + 1))); }

    Rng split(std::string_view name) const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return split(h);
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

    // Uniform integer in [0, n).
    std::uint64_t integer(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform() < p;
    }

    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        return std::poisson_distribution<int>(mean)(gen_);
    }

    int binomial(int n, double p) {
        if (n <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return n;
        return std::binomial_distribution<int>(n, p)(gen_);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace cdp
