#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "exlab/models.hpp"
#include "exlab/pointproc.hpp"
#include "exlab/risk.hpp"
#include "exlab/tailproc.hpp"

namespace exlab {

struct LimitPoint {
    std::size_t site{0};
    int lag{0};
    std::vector<double> x;
    std::optional<double> mark;

    bool operator==(const LimitPoint&) const = default;
};

struct LimitCluster {
    double v{0.5};
    std::vector<LimitPoint> points;
    /// The unthresholded cluster path, kept for mark and identity checks.
    TailPath z;

    bool operator==(const LimitCluster& o) const { return v == o.v && points == o.points; }
};

struct SuperpositionSample {
    std::size_t t_count{0};
    double theta{1.0};
    double u{1.0};
    int window{0};
    std::vector<std::string> sites;
    std::vector<LimitCluster> clusters;

    std::size_t point_count() const noexcept;
};

struct LimitOptions {
    /// First lag retained when thresholding; any value in [-m, 0] gives the
    /// same pattern under the risk bound.
    int lag_from{0};
    /// Overrides the analytic extremal index for the Poisson draw.
    std::optional<double> theta;
    std::size_t rejection_budget{kDefaultRejectionBudget};
};

/// Points (site, lag, Z_j[, mark]) of one cluster with r^(s)(Z_j) > u and
/// lag >= lag_from.
std::vector<LimitPoint> threshold_cluster(const TailPath& z, const RiskFunctional& risk, double u,
                                          const MarkFunctional* mark, int lag_from);

/// T ~ Poisson(theta) clusters with iid uniform times, each thresholded at u.
SuperpositionSample sample_limit_process(const ModelSpec& spec, const RiskFunctional& risk, double u,
                                         const MarkFunctional* mark, int window, CounterRng& rng,
                                         const LimitOptions& options = {});

/// Flattens to a PointPattern (t = V_i, cluster id in Point::cluster).
PointPattern superposition_to_pattern(const SuperpositionSample& sample);

}  // namespace exlab
