#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "exlab/error.hpp"
#include "exlab/limit.hpp"
#include "exlab/stats.hpp"
#include "exlab/tailproc.hpp"

namespace exlab {
namespace {

struct Case {
    double a;
    double alpha;
};

const std::vector<Case> kModels{{0.0, 1.0}, {0.5, 1.0}, {0.5, 2.0}};

TEST(LimitProcess, ClusterCountIsPoisson) {
    for (const auto& c : kModels) {
        const auto spec = ModelSpec::max_ar(c.a, c.alpha);
        const int m = certified_window(spec);
        std::vector<std::uint64_t> counts;
        for (std::uint64_t i = 0; i < 10000; ++i) {
            CounterRng rng(11, Stream::LimitProcess, i);
            counts.push_back(sample_limit_process(spec, RiskFunctional::sup_norm(), 1.0, nullptr, m, rng).t_count);
        }
        const auto r = chi_square_poisson(counts, analytic_extremal_index(spec));
        EXPECT_GT(r.p_value, 0.01) << "a=" << c.a << " alpha=" << c.alpha;
    }
}

TEST(LimitProcess, ClusterTimesAreUniform) {
    const auto spec = ModelSpec::max_ar(0.5, 1.0);
    std::vector<double> times;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        CounterRng rng(12, Stream::LimitProcess, i);
        const auto s = sample_limit_process(spec, RiskFunctional::sup_norm(), 1.0, nullptr, 20, rng);
        for (const auto& cl : s.clusters) {
            times.push_back(cl.v);
            for (const auto& p : cl.points) ASSERT_GE(p.lag, 0);
        }
    }
    const auto r = ks_one_sample(times, [](double v) { return std::clamp(v, 0.0, 1.0); });
    EXPECT_GT(r.p_value, 0.01);
}

TEST(LimitProcess, BackwardLagsAddNothingUnderTheRiskBound) {
    const auto spec = ModelSpec::max_ar(0.5, 1.0, 3);
    const int m = certified_window(spec);
    const auto mark = MarkFunctional::affected_fraction();
    LimitOptions from_back;
    from_back.lag_from = -m;
    for (const auto& risk : {RiskFunctional::sup_norm(), RiskFunctional::coordinate(),
                             RiskFunctional::argmax_coordinate()}) {
        for (std::uint64_t i = 0; i < 1000; ++i) {
            CounterRng r1(13, Stream::LimitProcess, i), r2(13, Stream::LimitProcess, i);
            const auto fwd = sample_limit_process(spec, risk, 1.0, &mark, m, r1);
            const auto all = sample_limit_process(spec, risk, 1.0, &mark, m, r2, from_back);
            ASSERT_EQ(fwd.clusters, all.clusters) << risk.name() << " sample " << i;
            ASSERT_TRUE(superposition_to_pattern(fwd) == superposition_to_pattern(all));
        }
    }
}

TEST(LimitProcess, MarksMatchRecomputation) {
    const auto spec = ModelSpec::max_ar(0.5, 1.0, 4);
    const auto risk = RiskFunctional::coordinate();
    const auto mark = MarkFunctional::affected_fraction();
    for (std::uint64_t i = 0; i < 500; ++i) {
        CounterRng rng(14, Stream::LimitProcess, i);
        const auto s = sample_limit_process(spec, risk, 1.0, &mark, 20, rng);
        for (const auto& cl : s.clusters)
            for (const auto& p : cl.points) {
                ASSERT_TRUE(p.mark.has_value());
                ASSERT_EQ(*p.mark, eval_mark(mark, risk, 1.0, p.site, p.x));
                ASSERT_GT(risk(p.site, p.x), 1.0);
                ASSERT_EQ(p.x, std::vector<double>(cl.z.at(p.lag).begin(), cl.z.at(p.lag).end()));
            }
    }
}

TEST(LimitProcess, IidExpectedPointCountIsOne) {
    const auto spec = ModelSpec::iid(1.0);
    MomentAccumulator acc;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        CounterRng rng(15, Stream::LimitProcess, i);
        const auto s = sample_limit_process(spec, RiskFunctional::coordinate(), 1.0, nullptr, 1, rng);
        for (const auto& cl : s.clusters) ASSERT_EQ(cl.points.size(), 1u);
        acc.add(double(s.point_count()));
    }
    EXPECT_NEAR(acc.mean(), 1.0, 3 * acc.std_error());
}

TEST(LimitProcess, RetainedPointsPerClusterIsInverseTheta) {
    const auto spec = ModelSpec::max_ar(0.5, 1.0);
    MomentAccumulator per_cluster;
    for (std::uint64_t i = 0; i < 40000; ++i) {
        CounterRng rng(16, Stream::LimitProcess, i);
        const auto s = sample_limit_process(spec, RiskFunctional::sup_norm(), 1.0, nullptr, 20, rng);
        for (const auto& cl : s.clusters) per_cluster.add(double(cl.points.size()));
    }
    EXPECT_NEAR(per_cluster.mean(), 2.0, 3 * per_cluster.std_error());
}

TEST(LimitProcess, ThetaOverrideAndValidation) {
    const auto spec = ModelSpec::max_ar(0.5, 1.0);
    CounterRng rng(17, Stream::LimitProcess, 0);
    LimitOptions opts;
    opts.theta = 0.25;
    EXPECT_EQ(sample_limit_process(spec, RiskFunctional::sup_norm(), 1.0, nullptr, 20, rng, opts).theta, 0.25);
    EXPECT_THROW(sample_limit_process(spec, RiskFunctional::sup_norm(), 0.0, nullptr, 20, rng), ValidationError);
    opts.theta = 0.0;
    EXPECT_THROW(sample_limit_process(spec, RiskFunctional::sup_norm(), 1.0, nullptr, 20, rng, opts), ValidationError);
    TailPath z(2, 1, Normalization::Tail);
    EXPECT_THROW(threshold_cluster(z, RiskFunctional::sup_norm(), 1.0, nullptr, -3), ValidationError);
    EXPECT_THROW(threshold_cluster(z, RiskFunctional::sup_norm(), 1.0, nullptr, 1), ValidationError);
}

TEST(SuperpositionPattern, FlattensWithClusterIds) {
    SuperpositionSample empty;
    empty.sites = {"s0"};
    EXPECT_EQ(superposition_to_pattern(empty).size(), 0u);

    TailPath z(2, 1, Normalization::Tail);
    z.at(0)[0] = 4.0;
    z.at(1)[0] = 2.0;
    z.at(2)[0] = 1.0;
    SuperpositionSample s;
    s.sites = {"s0"};
    s.t_count = 1;
    LimitCluster cl;
    cl.v = 0.3;
    cl.points = threshold_cluster(z, RiskFunctional::sup_norm(), 1.0, nullptr, 0);
    cl.z = z;
    s.clusters.push_back(cl);
    ASSERT_EQ(s.point_count(), 2u);
    const auto p = superposition_to_pattern(s);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p.n, 0u);
    for (const auto& pt : p.points) {
        EXPECT_EQ(pt.t, 0.3);
        EXPECT_EQ(pt.cluster, 0u);
    }
}

}  // namespace
}  // namespace exlab
