#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "exlab/models.hpp"
#include "exlab/risk.hpp"

namespace exlab {

enum class ScalingMethod { AnalyticFrechetTail, EmpiricalQuantile };

std::string to_string(ScalingMethod method);
ScalingMethod scaling_method_from_string(const std::string& name);

struct ScalingValue {
    std::size_t n{0};
    double value{0.0};
    ScalingMethod method{ScalingMethod::AnalyticFrechetTail};
    /// n = 1: P(||X_0|| > a) = 1 has no finite root; value is the lower bracket.
    bool degenerate{false};
    /// Set for n < 10, where the asymptotics carry no information.
    std::optional<std::string> warning;
};

struct ScalingOptions {
    /// Pre-sample size for EmpiricalQuantile.
    std::size_t presamples{1'000'000};
    /// Force the numeric root even when a closed form exists.
    bool force_root{false};
};

/// a_n with n P(||X_0|| > a_n) = 1.
ScalingValue compute_a_n(const ModelSpec& spec, std::size_t n, ScalingMethod method,
                         const ScalingOptions& options = {});

class ScalingSequence {
  public:
    ScalingSequence(const ModelSpec& spec, ScalingMethod method, ScalingOptions options = {})
        : spec_(spec), method_(method), options_(options) {}

    ScalingMethod method() const noexcept { return method_; }
    /// Computes (and caches) a_n.
    double operator()(std::size_t n);
    const std::vector<ScalingValue>& values() const noexcept { return values_; }

  private:
    ModelSpec spec_;
    ScalingMethod method_;
    ScalingOptions options_;
    std::vector<ScalingValue> values_;
};

/// Stationary pre-sample of ||X_0|| (long series on the ScalingPresample stream).
std::vector<double> presample_norms(const ModelSpec& spec, std::size_t count);

/// Block length r_n = floor(n^exponent). Rounds to the nearest integer first
/// when n^exponent is within 1e-9 relative of it, so that exact powers such
/// as (2^20)^0.5 do not lose one to floating-point error.
std::size_t block_length(std::size_t n, double exponent);

struct Point {
    /// Rescaled time j/n (or V_i in a limit sample).
    double t{0.0};
    /// 1-based time index j; 0 for limit samples.
    std::size_t time_index{0};
    std::size_t site{0};
    /// Rescaled spatial vector X_j / a_n.
    std::vector<double> x;
    std::optional<double> mark;
    std::optional<std::size_t> cluster;

    bool operator==(const Point&) const = default;
};

struct PointPattern {
    std::vector<Point> points;
    std::vector<std::string> sites;
    double u{1.0};
    /// Series length; 0 marks a limit-process pattern.
    std::size_t n{0};
    double a_n{1.0};

    std::size_t size() const noexcept { return points.size(); }
    bool operator==(const PointPattern&) const = default;
};

/// Points (j/n, s, X_j/a_n[, mark]) for every pair with r^(s)(X_j/a_n) > u.
PointPattern build_exceedance_pattern(const SpatioTemporalSeries& series, const RiskFunctional& risk,
                                      double u, double a_n, const MarkFunctional* mark = nullptr);

/// Number of pairs (j, s) with r^(s)(X_j) > a_n u, counted on the raw series.
std::size_t count_exceedances(const SpatioTemporalSeries& series, const RiskFunctional& risk, double u,
                              double a_n);

/// max_{k <= j <= l} ||X_j|| with 1-based inclusive indices; -infinity when
/// k > l. Throws std::out_of_range when k <= l and the range leaves [1, n].
double max_over_window(const SpatioTemporalSeries& series, std::size_t k, std::size_t l);

}  // namespace exlab
