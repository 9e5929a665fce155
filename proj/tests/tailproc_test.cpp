#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "exlab/error.hpp"
#include "exlab/models.hpp"
#include "exlab/stats.hpp"
#include "exlab/tailproc.hpp"

namespace exlab {
namespace {

TEST(CertifiedWindow, SmallestLagBelowTolerance) {
    EXPECT_EQ(certified_window(ModelSpec::iid(1.0)), 1);
    EXPECT_EQ(certified_window(ModelSpec::max_ar(0.5, 1.0)), 20);
    EXPECT_EQ(certified_window(ModelSpec::max_ar(0.5, 2.0)), 10);
    EXPECT_EQ(certified_window(ModelSpec::max_ar(0.9, 1.0)), 132);
    for (double a : {0.3, 0.5, 0.8, 0.95}) {
        for (double alpha : {0.7, 1.0, 2.0}) {
            const auto spec = ModelSpec::max_ar(a, alpha);
            const int m = certified_window(spec);
            EXPECT_LT(std::pow(a, m * alpha), 1e-6);
            if (m > 1) {
                EXPECT_GE(std::pow(a, (m - 1) * alpha), 1e-6);
            }
        }
    }
}

TEST(TailPathSampling, IidIsZeroOffLagZero) {
    CounterRng rng(1, Stream::TailPath, 0);
    for (int i = 0; i < 500; ++i) {
        const auto y = sample_tail_path(ModelSpec::iid(2.0, 2), 3, rng);
        ASSERT_GT(y.norm(0), 1.0);
        for (int j : {-3, -2, -1, 1, 2, 3}) ASSERT_EQ(y.norm(j), 0.0);
    }
}

TEST(TailPathSampling, SpectralRoundTripAndPairing) {
    const auto spec = ModelSpec::max_ar(0.6, 1.3, 3);
    CounterRng rng(2, Stream::TailPath, 0);
    for (int i = 0; i < 2000; ++i) {
        const auto theta = sample_tail_path(spec, 5, rng, Normalization::Spectral);
        ASSERT_EQ(theta.norm(0), 1.0);
        const auto y = sample_tail_path(spec, 5, rng, Normalization::Tail);
        const auto back = to_spectral(y);
        ASSERT_EQ(back.norm(0), 1.0);
        ASSERT_EQ(back.normalization(), Normalization::Spectral);

        const auto pair = sample_paired_paths(spec, 5, rng);
        ASSERT_GT(pair.pareto, 1.0);
        for (std::size_t k = 0; k < pair.tail.values().size(); ++k)
            ASSERT_EQ(pair.tail.values()[k], pair.pareto * pair.spectral.values()[k]);
    }
    EXPECT_THROW(to_spectral(TailPath(2, 1, Normalization::Tail)), ValidationError);
}

TEST(TailPathSampling, ForwardExceedanceCountIsGeometricSum) {
    const auto spec = ModelSpec::max_ar(0.5, 1.0);
    const int m = certified_window(spec);
    CounterRng rng(3, Stream::TailPath, 0);
    MomentAccumulator acc;
    for (int i = 0; i < 100000; ++i) {
        const auto y = sample_tail_path(spec, m, rng);
        std::size_t c = 0;
        for (int j = 0; j <= m; ++j) c += y.norm(j) > 1.0;
        acc.add(double(c));
    }
    EXPECT_NEAR(acc.mean(), 2.0, 3 * acc.std_error());
}

TEST(TailPathSampling, ExceedanceLagSymmetry) {
    for (auto [a, alpha] : {std::pair{0.5, 1.0}, std::pair{0.8, 1.0}, std::pair{0.5, 2.0}}) {
        const auto spec = ModelSpec::max_ar(a, alpha);
        CounterRng rng(4, Stream::TailPath, 0);
        std::vector<TailPath> paths;
        for (int i = 0; i < 50000; ++i) paths.push_back(sample_tail_path(spec, 3, rng));
        const auto prof = lag_exceedance_profile(paths);
        for (int j = 1; j <= 3; ++j) {
            EXPECT_NEAR(prof.at(j), prof.at(-j), 3 * combined_std_error(prof.se(j), prof.se(-j)))
                << "a=" << a << " j=" << j;
            EXPECT_NEAR(prof.at(j), std::pow(a, j * alpha), 3 * prof.se(j));
        }
        EXPECT_EQ(prof.at(0), 1.0);
    }
}

TEST(LagProfile, HandmadePath) {
    TailPath p(2, 2, Normalization::Tail);
    p.at(-2)[0] = 0.5;
    p.at(0)[1] = 3.0;
    p.at(1)[0] = 1.5;
    p.at(2)[1] = 1.0;
    EXPECT_EQ(exceedance_count(p), 2u);
    EXPECT_EQ(exceedance_count(p, 0.4), 4u);
    const auto prof = lag_exceedance_profile({p, p});
    EXPECT_EQ(prof.paths, 2u);
    EXPECT_EQ(prof.at(1), 1.0);
    EXPECT_EQ(prof.at(2), 0.0);
    EXPECT_EQ(prof.se(1), 0.0);
}

TEST(Cluster, IidAcceptsEveryDraw) {
    CounterRng rng(5, Stream::Cluster, 0);
    for (int i = 0; i < 200; ++i) {
        const auto c = sample_cluster(ModelSpec::iid(1.0), 1, rng);
        ASSERT_EQ(c.attempts, 1u);
        ASSERT_GT(c.v, 0.0);
        ASSERT_LT(c.v, 1.0);
        ASSERT_GT(c.z.norm(0), 1.0);
    }
    EXPECT_THROW(sample_cluster(ModelSpec::iid(1.0), 0, rng), ValidationError);
}

TEST(Cluster, AcceptanceRateIsExtremalIndex) {
    for (double a : {0.0, 0.3, 0.5, 0.8}) {
        for (double alpha : {1.0, 2.0}) {
            const auto spec = ModelSpec::max_ar(a, alpha);
            const int m = certified_window(spec);
            CounterRng rng(6, Stream::Cluster, std::uint64_t(a * 10 + alpha));
            std::size_t attempts = 0;
            const std::size_t accepted = 20000;
            for (std::size_t i = 0; i < accepted; ++i) {
                const auto c = sample_cluster(spec, m, rng);
                attempts += c.attempts;
                ASSERT_LE(c.z.norm(-1), 1.0);
                ASSERT_GT(c.z.norm(0), 1.0);
                for (int j = -m; j <= -1; ++j) ASSERT_LE(c.z.norm(j), 1.0);
            }
            const double rate = double(accepted) / double(attempts);
            const double theta = analytic_extremal_index(spec);
            EXPECT_NEAR(rate, theta, 3 * binomial_std_error(theta, attempts)) << "a=" << a << " alpha=" << alpha;
        }
    }
}

TEST(Cluster, BudgetExhaustionReportsAttempts) {
    // theta = 1 - 0.999^0.001, about 1e-6.
    const auto spec = ModelSpec::max_ar(0.999, 0.001);
    CounterRng rng(7, Stream::Cluster, 0);
    try {
        sample_cluster(spec, 5, rng, 100);
        FAIL() << "expected the budget to run out";
    } catch (const RejectionBudgetExceeded& e) {
        EXPECT_EQ(e.attempts(), 100u);
    }
}

// Y counts lags on both sides and is size-biased: E = (1 + a^alpha)/theta.
// The cluster path Z starts its cluster, so its forward count is 1/theta.
TEST(Cluster, MeanClusterSizeIsInverseTheta) {
    for (auto [a, alpha] : {std::pair{0.5, 1.0}, std::pair{0.5, 2.0}, std::pair{0.8, 1.0}}) {
        const auto spec = ModelSpec::max_ar(a, alpha);
        const int m = certified_window(spec);
        const double theta = analytic_extremal_index(spec);
        CounterRng rng(8, Stream::Cluster, 0);
        MomentAccumulator z_count, y_count;
        for (int i = 0; i < 50000; ++i) {
            z_count.add(double(exceedance_count(sample_cluster(spec, m, rng).z)));
            y_count.add(double(exceedance_count(sample_tail_path(spec, m, rng))));
        }
        EXPECT_NEAR(z_count.mean(), 1.0 / theta, 3 * z_count.std_error()) << "a=" << a;
        EXPECT_NEAR(y_count.mean(), (1.0 + std::pow(a, alpha)) / theta, 3 * y_count.std_error()) << "a=" << a;
    }
}

TEST(ExtremalIndexMc, MatchesClosedForm) {
    EXPECT_EQ(extremal_index_mc(ModelSpec::iid(1.0), 1, 10000, 1).theta, 1.0);
    for (auto [a, alpha] : {std::pair{0.5, 2.0}, std::pair{0.9, 1.0}}) {
        const auto spec = ModelSpec::max_ar(a, alpha);
        const auto est = extremal_index_mc(spec, certified_window(spec), 100000, 9);
        const double theta = 1.0 - std::pow(a, alpha);
        EXPECT_NEAR(est.theta, theta, 3 * binomial_std_error(theta, 100000));
        EXPECT_EQ(est.reps, 100000u);
    }
    EXPECT_THROW(extremal_index_mc(ModelSpec::iid(1.0), 0, 10, 1), ValidationError);
}

TEST(ExtremalIndexBlocks, UnitBlocksGiveOne) {
    std::vector<SpatioTemporalSeries> ens;
    const auto spec = ModelSpec::max_ar(0.5, 1.0, 1, 0.0, 3);
    for (std::size_t r = 0; r < 20; ++r) ens.push_back(simulate_series(spec, 5000, r));
    const auto est = extremal_index_blocks(ens, 1, norm_quantile(spec, 0.99));
    EXPECT_EQ(est.theta, 1.0);
    EXPECT_EQ(est.blocks_exceeding, est.exceedances);
    EXPECT_THROW(extremal_index_blocks(ens, 10, 1e300), TooFewEventsError);
    EXPECT_THROW(extremal_index_blocks(ens, 0, 1.0), ValidationError);
}

// Oracle (scipy script): [1 - (1-p)^r] / (r p) = 0.7899878657 at p = 1e-2, r = 50.
TEST(ExtremalIndexBlocks, IidMatchesBinomialIdentity) {
    const auto spec = ModelSpec::iid(1.0, 1, 10);
    const double p = 1e-2;
    const double level = 1.0 / -std::log1p(-p);
    std::vector<SpatioTemporalSeries> ens;
    for (std::size_t r = 0; r < 200; ++r) ens.push_back(simulate_series(spec, 10000, r));
    const auto est = extremal_index_blocks(ens, 50, level);
    EXPECT_EQ(est.blocks, 200u * 200u);
    EXPECT_NEAR(est.theta, 0.7899878657, 3 * est.std_error);
    EXPECT_GT(est.std_error, 0.0);
}

TEST(EmpiricalTailPath, TooFewExceedancesThrows) {
    const auto spec = ModelSpec::max_ar(0.5, 1.0);
    EXPECT_THROW(empirical_tail_path(spec, 1000, 2, norm_quantile(spec, 0.995), 3), TooFewEventsError);
    EXPECT_THROW(empirical_tail_path(spec, 1000, 2, -1.0, 3), ValidationError);
}

TEST(EmpiricalTailPath, IidOffLagMassVanishes) {
    const auto spec = ModelSpec::iid(1.0, 1, 4);
    double previous = 1.0;
    for (double q : {0.99, 0.999}) {
        const auto ens = empirical_tail_path(spec, 100000, 20, norm_quantile(spec, q), 2);
        std::size_t above = 0;
        for (const auto& p : ens.paths) above += p.norm(1) > 0.1;
        const double frac = double(above) / double(ens.paths.size());
        EXPECT_LT(frac, previous);
        previous = frac;
    }
    EXPECT_LT(previous, 0.02);
}

// Windows from one cluster are dependent, so the s.e. uses the number of
// cluster starts as the sample size.
TEST(EmpiricalTailPath, LagOneExceedanceNearOneHalf) {
    const auto spec = ModelSpec::max_ar(0.5, 1.0, 1, 0.0, 5);
    const auto ens = empirical_tail_path(spec, 100000, 50, norm_quantile(spec, 0.995), 3);
    std::size_t starts = 0;
    for (const auto& p : ens.paths) starts += p.norm(-1) <= 1.0 && p.norm(-2) <= 1.0 && p.norm(-3) <= 1.0;
    const auto prof = lag_exceedance_profile(ens.paths);
    const double se = binomial_std_error(0.5, starts);
    EXPECT_NEAR(prof.at(1), 0.5, 3 * se);
    EXPECT_NEAR(prof.at(-1), 0.5, 3 * se);
    EXPECT_EQ(ens.normalization, Normalization::Tail);
    EXPECT_GE(ens.exceedances, ens.paths.size());
}

}  // namespace
}  // namespace exlab
