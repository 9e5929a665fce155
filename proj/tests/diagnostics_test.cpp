#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "exlab/diagnostics.hpp"
#include "exlab/error.hpp"
#include "exlab/pointproc.hpp"

namespace exlab {
namespace {

TEST(Condition, Names) {
    EXPECT_EQ(to_string(Condition::MixingM), "M");
    EXPECT_EQ(to_string(Condition::AntiClusteringAC), "AC");
}

TEST(ConditionM, IidPasses) {
    const LaplaceSetup setup{ModelSpec::iid(1.0), RiskFunctional::sup_norm(), 1.0, 21};
    ConditionMOptions opts;
    opts.n_grid = {32, 1024};
    const auto rep = check_condition_M(setup, TestFunction::from_name("step"), opts);
    ASSERT_EQ(rep.cells.size(), 2u);
    EXPECT_TRUE(rep.verdict);
    EXPECT_FALSE(rep.note.empty());
    for (const auto& c : rep.cells) {
        EXPECT_EQ(c.blocks, c.n / c.r_n);
        EXPECT_GT(c.c_n, 0.0);
        EXPECT_LE(c.c_n, 1.0);
        EXPECT_GT(c.std_error, 0.0);
    }
}

TEST(ConditionM, ZeroFunctionIsExact) {
    const LaplaceSetup setup{ModelSpec::max_ar(0.5, 1.0), RiskFunctional::sup_norm(), 1.0, 22};
    ConditionMOptions opts;
    opts.n_grid = {100};
    const auto rep = check_condition_M(setup, TestFunction::from_name("zero"), opts);
    EXPECT_EQ(rep.cells[0].c_n, 1.0);
    EXPECT_EQ(rep.cells[0].d_n, 1.0);
    EXPECT_EQ(rep.cells[0].estimate, 0.0);
    EXPECT_TRUE(rep.verdict);
}

TEST(ConditionM, ValidatesOptions) {
    const LaplaceSetup setup{ModelSpec::iid(1.0), RiskFunctional::sup_norm(), 1.0, 23};
    const auto f = TestFunction::from_name("step");
    ConditionMOptions opts;
    EXPECT_THROW(check_condition_M(setup, f, opts), ValidationError);
    opts.n_grid = {100, 50};
    EXPECT_THROW(check_condition_M(setup, f, opts), ValidationError);
    opts.n_grid = {100};
    opts.reps = 499;
    EXPECT_THROW(check_condition_M(setup, f, opts), ValidationError);
}

TEST(ConditionAC, IidMatchesIndependentExceedances) {
    // P(X > a_n) = 1/n, so with 2 (r_n - m + 1) other times in range the
    // probability of a hit is 1 - (1 - 1/n)^(2 (r_n - m + 1)).
    ConditionACOptions opts;
    opts.n_grid = {1000};
    opts.m_grid = {1, 10, 40};
    opts.anchors = 20000;
    const auto rep = check_condition_AC(ModelSpec::iid(1.0), 1.0, opts, 24);
    ASSERT_EQ(rep.cells.size(), 3u);
    for (const auto& c : rep.cells) {
        const double expected = 1.0 - std::pow(1.0 - 1e-3, 2.0 * double(c.r_n - c.m + 1));
        EXPECT_GE(c.anchors, opts.anchors);
        EXPECT_NEAR(c.estimate, expected, 3 * c.std_error) << "m=" << c.m;
    }
}

TEST(ConditionAC, NonIncreasingInMAndZeroBeyondBlock) {
    ConditionACOptions opts;
    opts.n_grid = {1000, 10000};
    const std::size_t r_last = block_length(10000, opts.r_exponent);
    opts.m_grid = {1, 2, 5, 20, r_last + 1};
    opts.anchors = 3000;
    const auto rep = check_condition_AC(ModelSpec::max_ar(0.5, 1.0), 1.0, opts, 25);
    ASSERT_EQ(rep.cells.size(), 10u);
    for (std::size_t i = 0; i < rep.cells.size(); ++i) {
        const auto& c = rep.cells[i];
        EXPECT_GE(c.estimate, 0.0);
        EXPECT_LE(c.estimate, 1.0);
        if (c.m > c.r_n) {
            EXPECT_EQ(c.estimate, 0.0);
        }
        if (i % 5 != 0) {
            EXPECT_LE(c.estimate, rep.cells[i - 1].estimate);
        }
    }
    // The next exceedance is one step away with probability a^alpha = 1/2.
    EXPECT_GT(rep.cells[5].estimate, 0.5);
    EXPECT_TRUE(rep.verdict);
}

TEST(ConditionAC, ValidatesOptions) {
    ConditionACOptions opts;
    opts.n_grid = {1000};
    opts.m_grid = {0, 1};
    EXPECT_THROW(check_condition_AC(ModelSpec::iid(1.0), 1.0, opts, 1), ValidationError);
    opts.m_grid = {1};
    EXPECT_THROW(check_condition_AC(ModelSpec::iid(1.0), -1.0, opts, 1), ValidationError);
    opts.anchors = 0;
    EXPECT_THROW(check_condition_AC(ModelSpec::iid(1.0), 1.0, opts, 1), ValidationError);
}

}  // namespace
}  // namespace exlab
