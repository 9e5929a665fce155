#include "exlab/stats.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "exlab/error.hpp"

namespace exlab {

namespace {
std::atomic<unsigned> g_workers{0};
}

void set_worker_count(unsigned workers) noexcept { g_workers.store(workers); }

unsigned worker_count() noexcept {
    const unsigned requested = g_workers.load();
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    count_ += other.count_;
}

std::vector<MomentAccumulator> monte_carlo(
    std::size_t reps, std::size_t width, std::uint64_t seed, Stream stream,
    const std::function<void(CounterRng&, std::span<double>)>& fn) {
    const std::size_t batches = (reps + kMonteCarloBatch - 1) / kMonteCarloBatch;
    auto partial = parallel_map(batches, [&](std::size_t b) {
        std::vector<MomentAccumulator> acc(width);
        std::vector<double> out(width);
        CounterRng rng(seed, stream, b);
        const std::size_t begin = b * kMonteCarloBatch;
        const std::size_t end = std::min(reps, begin + kMonteCarloBatch);
        for (std::size_t i = begin; i < end; ++i) {
            fn(rng, out);
            for (std::size_t k = 0; k < width; ++k) acc[k].add(out[k]);
        }
        return acc;
    });
    std::vector<MomentAccumulator> total(width);
    for (const auto& part : partial)
        for (std::size_t k = 0; k < width; ++k) total[k].merge(part[k]);
    return total;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    constexpr double pi = std::numbers::pi;
    if (lambda < 1.18) {
        // Small-lambda form converges faster: P(K <= l) = sqrt(2 pi)/l sum exp(-(2k-1)^2 pi^2 / (8 l^2)).
        const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
        double sum = 0.0;
        for (int k = 1; k <= 6; ++k) sum += std::pow(y, (2 * k - 1) * (2 * k - 1));
        return 1.0 - std::sqrt(2.0 * pi) / lambda * sum;
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double ne) {
    const double root = std::sqrt(ne);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ValidationError("ks_one_sample: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, ks_p_value(d, n), n};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ValidationError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    return {d, ks_p_value(d, ne), ne};
}

ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.size() < 2)
        throw ValidationError("chi_square_gof: need at least two matching cells");
    double stat = 0.0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        if (expected[k] <= 0.0) throw ValidationError("chi_square_gof: non-positive expected count");
        const double diff = observed[k] - expected[k];
        stat += diff * diff / expected[k];
    }
    const std::size_t dof = observed.size() - 1;
    const boost::math::chi_squared dist(static_cast<double>(dof));
    return {stat, dof, boost::math::cdf(boost::math::complement(dist, stat)), observed.size()};
}

ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> samples, double mean,
                                   double min_expected) {
    if (samples.empty()) throw ValidationError("chi_square_poisson: no samples");
    if (!(mean > 0.0)) throw ValidationError("chi_square_poisson: mean must be positive");
    const double total = static_cast<double>(samples.size());
    const std::uint64_t kmax = *std::max_element(samples.begin(), samples.end());

    std::vector<double> observed;
    std::vector<double> expected;
    double obs_acc = 0.0;
    double exp_acc = 0.0;
    double pmf = std::exp(-mean);
    double cdf = 0.0;
    std::vector<double> counts(kmax + 1, 0.0);
    for (auto k : samples) counts[k] += 1.0;
    for (std::uint64_t k = 0;; ++k) {
        obs_acc += k <= kmax ? counts[k] : 0.0;
        exp_acc += total * pmf;
        cdf += pmf;
        const double tail = total * std::max(1.0 - cdf, 0.0);
        if (exp_acc >= min_expected && tail >= min_expected) {
            observed.push_back(obs_acc);
            expected.push_back(exp_acc);
            obs_acc = exp_acc = 0.0;
        } else if (tail < min_expected) {
            // Final cell collects everything from here to infinity.
            double rest = 0.0;
            for (std::uint64_t j = k + 1; j <= kmax; ++j) rest += counts[j];
            observed.push_back(obs_acc + rest);
            expected.push_back(exp_acc + tail);
            break;
        }
        pmf *= mean / static_cast<double>(k + 1);
    }
    // The last cell may still be small; fold it into its neighbour.
    while (expected.size() > 2 && expected.back() < min_expected) {
        expected[expected.size() - 2] += expected.back();
        observed[observed.size() - 2] += observed.back();
        expected.pop_back();
        observed.pop_back();
    }
    return chi_square_gof(observed, expected);
}

}  // namespace exlab
