#include "exlab/limit.hpp"

#include "exlab/error.hpp"

namespace exlab {

std::size_t SuperpositionSample::point_count() const noexcept {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.points.size();
    return n;
}

std::vector<LimitPoint> threshold_cluster(const TailPath& z, const RiskFunctional& risk, double u,
                                          const MarkFunctional* mark, int lag_from) {
    if (lag_from < -z.window() || lag_from > 0)
        throw ValidationError("threshold_cluster: lag_from must lie in [-m, 0]");
    std::vector<LimitPoint> points;
    for (int j = lag_from; j <= z.window(); ++j) {
        const auto x = z.at(j);
        if (risk.bounded_by_norm() && z.norm(j) <= u) continue;
        for (std::size_t s = 0; s < z.site_count(); ++s) {
            if (!(risk(s, x) > u)) continue;
            LimitPoint p;
            p.site = s;
            p.lag = j;
            p.x.assign(x.begin(), x.end());
            if (mark) p.mark = mark->evaluate(risk, u, s, x);
            points.push_back(std::move(p));
        }
    }
    return points;
}

SuperpositionSample sample_limit_process(const ModelSpec& spec, const RiskFunctional& risk, double u,
                                         const MarkFunctional* mark, int window, CounterRng& rng,
                                         const LimitOptions& options) {
    if (!(u > 0.0)) throw ValidationError("sample_limit_process: u must be > 0");
    SuperpositionSample sample;
    sample.theta = options.theta.value_or(analytic_extremal_index(spec));
    if (!(sample.theta > 0.0)) throw ValidationError("sample_limit_process: theta must be > 0");
    sample.u = u;
    sample.window = window;
    sample.sites = spec.sites;
    sample.t_count = rng.poisson(sample.theta);
    sample.clusters.reserve(sample.t_count);
    for (std::size_t i = 0; i < sample.t_count; ++i) {
        ClusterSample c = sample_cluster(spec, window, rng, options.rejection_budget);
        LimitCluster cluster;
        cluster.v = c.v;
        cluster.points = threshold_cluster(c.z, risk, u, mark, options.lag_from);
        cluster.z = std::move(c.z);
        sample.clusters.push_back(std::move(cluster));
    }
    return sample;
}

PointPattern superposition_to_pattern(const SuperpositionSample& sample) {
    PointPattern pattern;
    pattern.sites = sample.sites;
    pattern.u = sample.u;
    pattern.n = 0;
    for (std::size_t i = 0; i < sample.clusters.size(); ++i) {
        for (const auto& lp : sample.clusters[i].points) {
            Point p;
            p.t = sample.clusters[i].v;
            p.site = lp.site;
            p.x = lp.x;
            p.mark = lp.mark;
            p.cluster = i;
            pattern.points.push_back(std::move(p));
        }
    }
    return pattern;
}

}  // namespace exlab
