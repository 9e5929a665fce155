#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace exlab {

/// Independent random streams. Each tag gets its own key space so that two
/// operations never share draws unless they ask for the same (tag, index).
enum class Stream : std::uint64_t {
    Series = 1,
    ScalingPresample = 2,
    TailPath = 3,
    SpectralPath = 4,
    Cluster = 5,
    ExtremalIndex = 6,
    LimitProcess = 7,
    LaplaceEmpirical = 8,
    LaplaceTail = 9,
    LaplaceSpectral = 10,
    LaplaceSuperposition = 11,
    LaplacePgf = 12,
    Lemma1Blocks = 13,
    Lemma1Tail = 14,
    ConditionMFull = 15,
    ConditionMBlocks = 16,
    ConditionAC = 17,
    RiskProbe = 18,
    EmpiricalTail = 19,
    Misc = 99,
};

namespace detail {

__extension__ using uint128 = unsigned __int128;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// SplitMix gamma derivation: odd, with enough bit transitions.
constexpr std::uint64_t mix_gamma(std::uint64_t z) noexcept {
    z = mix64(z) | 1ULL;
    const auto transitions = std::popcount(z ^ (z >> 1));
    return transitions < 24 ? z ^ 0xaaaaaaaaaaaaaaaaULL : z;
}

}  // namespace detail

/// Counter-based generator: draw i of stream (seed, tag, index) is a pure
/// function mix(key + i * gamma). Replication r of any Monte Carlo loop owns
/// the stream (seed, tag, r), so results do not depend on which worker thread
/// evaluates it or in which order.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, Stream tag, std::uint64_t index) noexcept {
        const std::uint64_t base =
            detail::mix64(seed ^ detail::mix64(static_cast<std::uint64_t>(tag) * 0x9e3779b97f4a7c15ULL));
        const std::uint64_t keyed = detail::mix64(base + detail::mix64(index + 0x632be59bd9b4e019ULL));
        key_ = keyed;
        gamma_ = detail::mix_gamma(keyed ^ 0xd1b54a32d192ed03ULL);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        ++counter_;
        return detail::mix64(key_ + counter_ * gamma_);
    }

    std::uint64_t draws() const noexcept { return counter_; }

    /// Uniform on the open interval (0, 1); never returns 0 or 1.
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform index in [0, n).
    std::uint64_t index(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>((static_cast<detail::uint128>((*this)()) * n) >> 64);
    }

    /// Standard Frechet(alpha): P(X <= x) = exp(-x^-alpha), by inverse CDF.
    double frechet(double alpha) noexcept {
        const double e = -std::log(uniform());
        if (alpha == 1.0) return 1.0 / e;
        if (alpha == 2.0) return 1.0 / std::sqrt(e);
        return std::pow(e, -1.0 / alpha);
    }

    /// Pareto(alpha) on (1, inf): P(X > x) = x^-alpha.
    double pareto(double alpha) noexcept { return pareto_from_uniform(uniform(), alpha); }

    static double pareto_from_uniform(double u, double alpha) noexcept {
        if (alpha == 1.0) return 1.0 / u;
        if (alpha == 2.0) return 1.0 / std::sqrt(u);
        return std::pow(u, -1.0 / alpha);
    }

    /// Poisson(mean) by sequential inversion. Intended for small means
    /// (the extremal index lies in (0, 1]); O(mean) work per draw.
    std::uint64_t poisson(double mean) noexcept {
        if (mean <= 0.0) return 0;
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf && p > 0.0) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

  private:
    std::uint64_t key_{};
    std::uint64_t gamma_{};
    std::uint64_t counter_{0};
};

}  // namespace exlab
