#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "exlab/laplace.hpp"
#include "exlab/models.hpp"
#include "exlab/risk.hpp"

namespace exlab {

enum class Condition { MixingM, AntiClusteringAC };

std::string to_string(Condition c);

struct ConditionCell {
    std::size_t n{0};
    std::size_t r_n{0};
    /// Lag gap m (AC only).
    std::size_t m{0};
    double a_n{0.0};
    /// AC: conditional probability. M: c_n - d_n.
    double estimate{0.0};
    double std_error{0.0};
    // M only.
    double c_n{0.0};
    double c_n_se{0.0};
    double d_n{0.0};
    double d_n_se{0.0};
    std::size_t blocks{0};
    // AC only.
    std::size_t anchors{0};
    std::size_t anchor_groups{0};
};

struct ConditionReport {
    Condition condition{Condition::MixingM};
    std::vector<ConditionCell> cells;
    bool verdict{false};
    std::string verdict_rule;
    std::string note{"numerical diagnostic: evidence, not a proof"};
};

struct ConditionMOptions {
    std::vector<std::size_t> n_grid;
    double r_exponent{0.6};
    /// Series replications for c_n and fresh blocks per block index for d_n.
    std::size_t reps{500};
    double tolerance_se{3.0};
};

/// c_n(f) from full series, d_n(f) as the product of per-block expectations
/// each estimated from fresh stationary blocks. Verdict: |c_n - d_n| within
/// tolerance_se combined standard errors at every n.
ConditionReport check_condition_M(const LaplaceSetup& setup, const TestFunction& f,
                                  const ConditionMOptions& options);

struct ConditionACOptions {
    std::vector<std::size_t> n_grid;
    std::vector<std::size_t> m_grid;
    double r_exponent{0.6};
    /// Anchors (exceedances of a_n u) harvested per n.
    std::size_t anchors{2000};
    /// Verdict threshold at the largest n and largest m.
    double tolerance{0.01};
    double tolerance_se{3.0};
};

/// P(max_{m <= |t| <= r_n} ||X_t|| > a_n u | ||X_0|| > a_n u) on the (m, n)
/// grid. Every exceedance of a long series is an anchor; standard errors are
/// cluster-robust over groups of anchors closer than 2 r_n.
ConditionReport check_condition_AC(const ModelSpec& spec, double u, const ConditionACOptions& options,
                                   std::uint64_t seed);

}  // namespace exlab
