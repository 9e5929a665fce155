#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "exlab/parallel.hpp"
#include "exlab/rng.hpp"

namespace exlab {

/// Streaming mean/variance (Welford), mergeable in a fixed order.
class MomentAccumulator {
  public:
    void add(double x) noexcept {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }

    void merge(const MomentAccumulator& other) noexcept;

    std::size_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept {
        return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    }
    double std_error() const noexcept {
        return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
    }

  private:
    std::size_t count_{0};
    double mean_{0.0};
    double m2_{0.0};
};

struct MeanEstimate {
    double mean{0.0};
    double std_error{0.0};
    std::size_t count{0};
};

inline MeanEstimate to_estimate(const MomentAccumulator& acc) {
    return {acc.mean(), acc.std_error(), acc.count()};
}

/// Binomial standard error sqrt(p(1-p)/n).
inline double binomial_std_error(double p, std::size_t n) {
    return n == 0 ? 0.0 : std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

inline double combined_std_error(double a, double b) { return std::hypot(a, b); }

/// Fixed replication batch: batch b draws from CounterRng(seed, stream, b).
inline constexpr std::size_t kMonteCarloBatch = 2048;

/// Runs `reps` replications of fn(rng, out) where fn writes `width` values
/// into `out`; returns one accumulator per output slot. Deterministic in
/// (seed, stream, reps) regardless of worker count.
std::vector<MomentAccumulator> monte_carlo(
    std::size_t reps, std::size_t width, std::uint64_t seed, Stream stream,
    const std::function<void(CounterRng&, std::span<double>)>& fn);

struct KsResult {
    double statistic{0.0};
    double p_value{1.0};
    double effective_n{0.0};
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
    double statistic{0.0};
    std::size_t dof{0};
    double p_value{1.0};
    std::size_t bins{0};
};

/// Pearson goodness of fit with known parameters (dof = bins - 1).
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected);

/// Chi-square test of integer samples against Poisson(mean); adjacent cells
/// are pooled until each expected count is at least `min_expected`.
ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> samples, double mean,
                                   double min_expected = 5.0);

}  // namespace exlab
