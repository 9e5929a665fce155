#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "exlab/error.hpp"
#include "exlab/parallel.hpp"
#include "exlab/rng.hpp"
#include "exlab/stats.hpp"

namespace exlab {
namespace {

// Level for sampler sanity checks; several run per binary, so 1% would
// raise a false alarm every few dozen seeds.
constexpr double kSamplerLevel = 1e-3;

// Reference values from tests/oracles/derive_expected.py (scipy).
TEST(Kolmogorov, SurvivalMatchesScipy) {
    EXPECT_NEAR(kolmogorov_survival(0.5), 0.963945243665, 1e-10);
    EXPECT_NEAR(kolmogorov_survival(1.0), 0.269999671677, 1e-10);
    EXPECT_NEAR(kolmogorov_survival(1.36), 0.049485876755, 1e-10);
    EXPECT_NEAR(kolmogorov_survival(1.63), 0.009846364888, 1e-10);
    EXPECT_NEAR(kolmogorov_survival(2.0), 0.000670925256, 1e-10);
    EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(ChiSquare, PValueMatchesScipy) {
    // Two cells: statistic (o-e)^2/e sums to the target.
    const std::vector<double> obs{50.0 + std::sqrt(0.5 * 25.0), 50.0 - std::sqrt(0.5 * 25.0)};
    const std::vector<double> exp{50.0, 50.0};
    const auto r = chi_square_gof(obs, exp);
    EXPECT_EQ(r.dof, 1u);
    EXPECT_NEAR(r.statistic, 0.5, 1e-12);
    EXPECT_NEAR(r.p_value, 0.479500122187, 1e-10);

    const double a = std::sqrt(150.0);
    const auto r2 = chi_square_gof(std::vector<double>{100 + a, 100 - a, 100}, std::vector<double>{100, 100, 100});
    EXPECT_EQ(r2.dof, 2u);
    EXPECT_NEAR(r2.p_value, 0.223130160148, 1e-10);

    const double b = std::sqrt(553.5);
    const auto r5 = chi_square_gof(std::vector<double>{100 + b, 100 - b, 100, 100, 100, 100},
                                   std::vector<double>(6, 100.0));
    EXPECT_EQ(r5.dof, 5u);
    EXPECT_NEAR(r5.statistic, 11.07, 1e-10);
    EXPECT_NEAR(r5.p_value, 0.050009618622, 1e-10);
}

TEST(ChiSquare, RejectsMismatchedCells) {
    const std::vector<double> one{1.0};
    EXPECT_THROW(chi_square_gof(one, one), ValidationError);
    const std::vector<double> obs{1.0, 2.0};
    const std::vector<double> bad{1.0, 0.0};
    EXPECT_THROW(chi_square_gof(obs, bad), ValidationError);
}

TEST(ChiSquare, PoissonSamplesPass) {
    CounterRng rng(7, Stream::Misc, 0);
    std::vector<std::uint64_t> draws(20000);
    for (auto& d : draws) d = rng.poisson(0.75);
    const auto r = chi_square_poisson(draws, 0.75);
    EXPECT_GT(r.p_value, 0.01);
    EXPECT_GE(r.bins, 3u);
}

TEST(ChiSquare, WrongMeanFails) {
    CounterRng rng(7, Stream::Misc, 1);
    std::vector<std::uint64_t> draws(20000);
    for (auto& d : draws) d = rng.poisson(0.5);
    EXPECT_LT(chi_square_poisson(draws, 0.75).p_value, 1e-6);
}

TEST(KolmogorovSmirnov, UniformPasses) {
    CounterRng rng(3, Stream::Misc, 0);
    std::vector<double> u(5000);
    for (auto& x : u) x = rng.uniform();
    const auto r = ks_one_sample(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
    EXPECT_GT(r.p_value, 0.01);
    EXPECT_DOUBLE_EQ(r.effective_n, 5000.0);
}

TEST(KolmogorovSmirnov, ShiftedSampleFails) {
    CounterRng rng(3, Stream::Misc, 1);
    std::vector<double> a(3000), b(3000);
    for (auto& x : a) x = rng.uniform();
    for (auto& x : b) x = 0.1 + rng.uniform();
    EXPECT_LT(ks_two_sample(a, b).p_value, 1e-6);
}

TEST(KolmogorovSmirnov, StatisticOnKnownSamples) {
    // Empirical CDFs of {1,2,3} and {2.5} differ by at most 2/3 at x in [2, 2.5).
    const auto r = ks_two_sample({1.0, 2.0, 3.0}, {2.5});
    EXPECT_NEAR(r.statistic, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.effective_n, 0.75, 1e-15);
}

TEST(CounterRng, DeterministicPerKey) {
    CounterRng a(42, Stream::Series, 5), b(42, Stream::Series, 5), c(42, Stream::Series, 6),
        d(42, Stream::Cluster, 5);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
        EXPECT_NE(x, d());
    }
    EXPECT_EQ(a.draws(), 100u);
}

TEST(CounterRng, UniformStaysInOpenInterval) {
    CounterRng rng(1, Stream::Misc, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(CounterRng, IndexCoversRange) {
    CounterRng rng(1, Stream::Misc, 2);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto k = rng.index(5);
        ASSERT_LT(k, 5u);
        seen.insert(k);
    }
    EXPECT_EQ(seen.size(), 5u);
}

TEST(CounterRng, FrechetMatchesCdf) {
    for (double alpha : {1.0, 2.0, 1.5}) {
        CounterRng rng(11, Stream::Misc, static_cast<std::uint64_t>(alpha * 10));
        std::vector<double> x(20000);
        for (auto& v : x) v = rng.frechet(alpha);
        const auto r = ks_one_sample(x, [alpha](double v) { return v <= 0 ? 0.0 : std::exp(-std::pow(v, -alpha)); });
        EXPECT_GT(r.p_value, kSamplerLevel) << "alpha=" << alpha;
    }
}

TEST(CounterRng, ParetoMatchesCdf) {
    for (double alpha : {1.0, 2.0, 0.7}) {
        CounterRng rng(12, Stream::Misc, static_cast<std::uint64_t>(alpha * 10));
        std::vector<double> x(20000);
        for (auto& v : x) {
            v = rng.pareto(alpha);
            ASSERT_GT(v, 1.0);
        }
        const auto r = ks_one_sample(x, [alpha](double v) { return v <= 1 ? 0.0 : 1.0 - std::pow(v, -alpha); });
        EXPECT_GT(r.p_value, kSamplerLevel) << "alpha=" << alpha;
    }
}

TEST(Moments, MergeEqualsSequential) {
    MomentAccumulator all, left, right;
    CounterRng rng(5, Stream::Misc, 0);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform();
        all.add(x);
        (i < 300 ? left : right).add(x);
    }
    left.merge(right);
    EXPECT_EQ(left.count(), all.count());
    EXPECT_NEAR(left.mean(), all.mean(), 1e-14);
    EXPECT_NEAR(left.variance(), all.variance(), 1e-14);
}

TEST(Moments, BinomialStandardError) {
    EXPECT_DOUBLE_EQ(binomial_std_error(0.5, 100), 0.05);
    EXPECT_DOUBLE_EQ(binomial_std_error(1.0, 100), 0.0);
    EXPECT_DOUBLE_EQ(binomial_std_error(0.5, 0), 0.0);
}

TEST(MonteCarlo, IndependentOfWorkerCount) {
    auto run = [] {
        return monte_carlo(10000, 2, 99, Stream::Misc, [](CounterRng& rng, std::span<double> out) {
            out[0] = rng.uniform();
            out[1] = rng.frechet(1.0) > 2.0 ? 1.0 : 0.0;
        });
    };
    set_worker_count(1);
    const auto one = run();
    set_worker_count(4);
    const auto four = run();
    set_worker_count(0);
    ASSERT_EQ(one.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_EQ(one[k].count(), 10000u);
        EXPECT_EQ(one[k].mean(), four[k].mean());
        EXPECT_EQ(one[k].variance(), four[k].variance());
    }
    EXPECT_NEAR(one[0].mean(), 0.5, 4 * one[0].std_error());
    EXPECT_NEAR(one[1].mean(), 1.0 - std::exp(-0.5), 4 * one[1].std_error());
}

TEST(ParallelMap, PreservesOrderAndPropagatesErrors) {
    set_worker_count(3);
    const auto out = parallel_map(100, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i * i);
    EXPECT_THROW(parallel_map(50,
                              [](std::size_t i) {
                                  if (i == 17) throw std::runtime_error("boom");
                                  return i;
                              }),
                 std::runtime_error);
    set_worker_count(0);
}

}  // namespace
}  // namespace exlab
