#include "exlab/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "exlab/error.hpp"
#include "exlab/limit.hpp"
#include "exlab/pointproc.hpp"
#include "exlab/stats.hpp"
#include "exlab/tailproc.hpp"

namespace exlab {

double ValueProfile::operator()(double r) const noexcept {
    if (!(r > epsilon)) return 0.0;
    switch (kind) {
        case ValueProfileKind::Zero:
            return 0.0;
        case ValueProfileKind::Indicator:
            return beta;
        case ValueProfileKind::SmoothStep:
            return beta * std::min((r - epsilon) / width, 1.0);
        case ValueProfileKind::Ramp:
            return beta * std::min(r - epsilon, 1.0);
    }
    return 0.0;
}

TestFunction::TestFunction(std::string name, TimeProfile w, ValueProfile h, std::vector<double> site_weights)
    : name_(std::move(name)), w_(w), h_(h), site_weights_(std::move(site_weights)) {
    if (!(h_.epsilon > 0.0)) throw ValidationError("test function '" + name_ + "': epsilon must be > 0");
    if (!(h_.beta >= 0.0) || !std::isfinite(h_.beta))
        throw ValidationError("test function '" + name_ + "': beta must be finite and >= 0");
    if (h_.kind == ValueProfileKind::SmoothStep && !(h_.width > 0.0))
        throw ValidationError("test function '" + name_ + "': width must be > 0");
    for (double c : site_weights_)
        if (!(c >= 0.0) || !std::isfinite(c))
            throw ValidationError("test function '" + name_ + "': site weights must be finite and >= 0");
}

TestFunction TestFunction::from_name(const std::string& name) {
    const double ln2 = std::numbers::ln2;
    if (name == "zero") return {name, TimeProfile::Flat, {ValueProfileKind::Zero, 0.0, 0.5, 0.25}};
    if (name == "step") return {name, TimeProfile::Flat, {ValueProfileKind::SmoothStep, ln2, 0.5, 0.25}};
    if (name == "step-bump") return {name, TimeProfile::Bump, {ValueProfileKind::SmoothStep, ln2, 0.5, 0.25}};
    if (name == "ramp") return {name, TimeProfile::Flat, {ValueProfileKind::Ramp, 1.0, 0.5, 0.0}};
    if (name == "ramp-bump") return {name, TimeProfile::Bump, {ValueProfileKind::Ramp, 1.0, 0.5, 0.0}};
    if (name == "weighted")
        return {name, TimeProfile::Bump, {ValueProfileKind::SmoothStep, 2.0, 0.5, 0.25}, {1.0, 0.5, 0.25, 0.125}};
    if (name.rfind("indicator:", 0) == 0) {
        const std::string body = name.substr(10);
        const auto colon = body.find(':');
        try {
            const double beta = std::stod(body.substr(0, colon));
            const double eps = colon == std::string::npos ? 0.5 : std::stod(body.substr(colon + 1));
            return {name, TimeProfile::Flat, {ValueProfileKind::Indicator, beta, eps, 0.0}};
        } catch (const std::logic_error&) {
            throw ValidationError("test function: bad parameters in '" + name + "'");
        }
    }
    throw ValidationError("test function: unknown name '" + name + "'");
}

std::vector<TestFunction> TestFunction::library() {
    std::vector<TestFunction> out;
    for (const char* n : {"step", "step-bump", "ramp", "ramp-bump", "weighted"}) out.push_back(from_name(n));
    return out;
}

double TestFunction::time_weight(double t) const noexcept {
    return w_ == TimeProfile::Flat ? 1.0 : 4.0 * t * (1.0 - t);
}

double TestFunction::site_weight(std::size_t s) const noexcept {
    if (site_weights_.empty()) return 1.0;
    return s < site_weights_.size() ? site_weights_[s] : site_weights_.back();
}

double TestFunction::operator()(double t, std::size_t s, std::span<const double> x) const {
    return time_weight(t) * site_weight(s) * h_(sup_norm(x));
}

double thresholded_g(const TestFunction& g, const RiskFunctional& risk, double u, double t, std::size_t s,
                     std::span<const double> x) {
    return risk(s, x) > u ? g(t, s, x) : 0.0;
}

namespace {

// Sum over sites of c_s h(||x||) 1{r^(s)(x) > u} for one spatial vector.
double row_value(const TestFunction& g, const RiskFunctional& risk, double u, std::span<const double> x,
                 double norm) {
    const double h = g.value(norm);
    if (h == 0.0) return 0.0;
    if (risk.bounded_by_norm() && norm <= u) return 0.0;
    double total = 0.0;
    for (std::size_t s = 0; s < x.size(); ++s)
        if (risk(s, x) > u) total += g.site_weight(s);
    return total * h;
}

double min_epsilon(const std::vector<TestFunction>& gs) {
    double eps = std::numeric_limits<double>::infinity();
    for (const auto& g : gs) eps = std::min(eps, g.value_profile().epsilon);
    return eps;
}

LaplaceEstimate exp_of_mean(Provenance p, const std::string& name, const MomentAccumulator& acc, int window) {
    LaplaceEstimate est;
    est.provenance = p;
    est.test_function = name;
    est.value = std::exp(-acc.mean());
    est.std_error = est.value * acc.std_error();
    est.reps = acc.count();
    est.window = window;
    return est;
}

void check_setup(const LaplaceSetup& setup, std::size_t reps) {
    setup.spec.validate();
    if (!(setup.u > 0.0)) throw ValidationError("laplace: u must be > 0");
    if (reps == 0) throw ValidationError("laplace: reps must be >= 1");
}

}  // namespace

double thresholded_row_sum(const TestFunction& g, const RiskFunctional& risk, double u,
                           std::span<const double> x) {
    return row_value(g, risk, u, x, sup_norm(x));
}

double path_value_sum(const TailPath& path, const TestFunction& g, const RiskFunctional& risk, double u,
                      int first_lag, double v) {
    double total = 0.0;
    std::vector<double> scaled(path.site_count());
    for (int j = std::max(first_lag, -path.window()); j <= path.window(); ++j) {
        const double norm = v * path.norm(j);
        if (norm == 0.0) continue;
        const auto x = path.at(j);
        for (std::size_t k = 0; k < x.size(); ++k) scaled[k] = v * x[k];
        total += row_value(g, risk, u, scaled, norm);
    }
    return total;
}

double time_bracket(TimeProfile w, double g1, double g0) {
    if (g1 == g0) return 0.0;
    if (w == TimeProfile::Flat) return std::exp(-g1) - std::exp(-g0);
    auto f = [&](double t) {
        const double wt = 4.0 * t * (1.0 - t);
        return std::exp(-wt * g1) - std::exp(-wt * g0);
    };
    return boost::math::quadrature::gauss<double, 64>::integrate(f, 0.0, 1.0);
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::EmpiricalFiniteN:
            return "empirical-finite-n";
        case Provenance::LimitTail:
            return "limit-tail";
        case Provenance::LimitSpectral:
            return "limit-spectral";
        case Provenance::Superposition:
            return "superposition";
        case Provenance::BlockConditional:
            return "block-conditional";
    }
    return "unknown";
}

std::vector<LaplaceEstimate> empirical_laplace(const LaplaceSetup& setup, const std::vector<TestFunction>& gs,
                                               std::size_t n, std::size_t reps, std::optional<double> a_n) {
    check_setup(setup, reps);
    if (reps < 100) throw ValidationError("empirical_laplace: reps must be >= 100");
    if (n == 0) throw ValidationError("empirical_laplace: n must be >= 1");
    const double scale = a_n.value_or(compute_a_n(setup.spec, n, ScalingMethod::AnalyticFrechetTail).value);
    if (!(scale > 0.0)) throw ValidationError("empirical_laplace: a_n must be > 0");
    const double eps = min_epsilon(gs);
    const double skip = scale * (setup.risk.bounded_by_norm() ? std::max(setup.u, eps) : eps);
    const std::size_t width = setup.spec.site_count();
    const double inv_n = 1.0 / static_cast<double>(n);

    auto acc = monte_carlo(reps, gs.size(), setup.seed, Stream::LaplaceEmpirical,
                           [&](CounterRng& rng, std::span<double> out) {
                               SeriesGenerator gen(setup.spec, Stream::LaplaceEmpirical, rng());
                               std::fill(out.begin(), out.end(), 0.0);
                               std::vector<double> x(width);
                               for (std::size_t t = 1; t <= n; ++t) {
                                   const double norm = gen.next_norm();
                                   if (norm <= skip) continue;
                                   const auto row = gen.current();
                                   for (std::size_t k = 0; k < width; ++k) x[k] = row[k] / scale;
                                   const double time = static_cast<double>(t) * inv_n;
                                   for (std::size_t i = 0; i < gs.size(); ++i)
                                       out[i] += gs[i].time_weight(time) *
                                                 row_value(gs[i], setup.risk, setup.u, x, norm / scale);
                               }
                               for (double& s : out) s = std::exp(-s);
                           });

    std::vector<LaplaceEstimate> out;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        LaplaceEstimate est;
        est.provenance = Provenance::EmpiricalFiniteN;
        est.test_function = gs[i].name();
        est.value = acc[i].mean();
        est.std_error = acc[i].std_error();
        est.reps = acc[i].count();
        est.n = n;
        out.push_back(est);
    }
    return out;
}

std::vector<LaplaceEstimate> limit_laplace_tail(const LaplaceSetup& setup, const std::vector<TestFunction>& gs,
                                                int window, std::size_t reps) {
    check_setup(setup, reps);
    auto acc = monte_carlo(reps, gs.size(), setup.seed, Stream::LaplaceTail,
                           [&](CounterRng& rng, std::span<double> out) {
                               const TailPath path = analytic_tail_path(setup.spec, window, rng);
                               for (std::size_t i = 0; i < gs.size(); ++i) {
                                   const double g1 = path_value_sum(path, gs[i], setup.risk, setup.u, 1);
                                   const double g0 = path_value_sum(path, gs[i], setup.risk, setup.u, 0);
                                   out[i] = time_bracket(gs[i].time_profile(), g1, g0);
                               }
                           });
    std::vector<LaplaceEstimate> out;
    for (std::size_t i = 0; i < gs.size(); ++i)
        out.push_back(exp_of_mean(Provenance::LimitTail, gs[i].name(), acc[i], window));
    return out;
}

std::vector<LaplaceEstimate> limit_laplace_spectral(const LaplaceSetup& setup,
                                                    const std::vector<TestFunction>& gs, int window,
                                                    std::size_t reps, VStrategy strategy) {
    check_setup(setup, reps);
    const double alpha = setup.spec.alpha;
    auto acc = monte_carlo(reps, gs.size(), setup.seed, Stream::LaplaceSpectral,
                           [&](CounterRng& rng, std::span<double> out) {
                               const TailPath theta = analytic_spectral_path(setup.spec, window, rng);
                               const double uv = rng.uniform();
                               std::fill(out.begin(), out.end(), 0.0);
                               const int draws = strategy == VStrategy::AntitheticPareto ? 2 : 1;
                               for (int d = 0; d < draws; ++d) {
                                   const double v = CounterRng::pareto_from_uniform(d == 0 ? uv : 1.0 - uv, alpha);
                                   for (std::size_t i = 0; i < gs.size(); ++i) {
                                       const double g1 = path_value_sum(theta, gs[i], setup.risk, setup.u, 1, v);
                                       const double g0 = path_value_sum(theta, gs[i], setup.risk, setup.u, 0, v);
                                       out[i] += time_bracket(gs[i].time_profile(), g1, g0) / draws;
                                   }
                               }
                           });
    std::vector<LaplaceEstimate> out;
    for (std::size_t i = 0; i < gs.size(); ++i)
        out.push_back(exp_of_mean(Provenance::LimitSpectral, gs[i].name(), acc[i], window));
    return out;
}

namespace {

double cluster_sum(const LimitCluster& c, const TestFunction& g) {
    double total = 0.0;
    for (const auto& p : c.points) total += g.site_weight(p.site) * g.value(sup_norm(p.x));
    return g.time_weight(c.v) * total;
}

}  // namespace

std::vector<LaplaceEstimate> superposition_laplace(const LaplaceSetup& setup,
                                                   const std::vector<TestFunction>& gs, int window,
                                                   std::size_t reps) {
    check_setup(setup, reps);
    auto acc = monte_carlo(reps, gs.size(), setup.seed, Stream::LaplaceSuperposition,
                           [&](CounterRng& rng, std::span<double> out) {
                               const SuperpositionSample s =
                                   sample_limit_process(setup.spec, setup.risk, setup.u, nullptr, window, rng);
                               for (std::size_t i = 0; i < gs.size(); ++i) {
                                   double total = 0.0;
                                   for (const auto& c : s.clusters) total += cluster_sum(c, gs[i]);
                                   out[i] = std::exp(-total);
                               }
                           });
    std::vector<LaplaceEstimate> out;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        LaplaceEstimate est;
        est.provenance = Provenance::Superposition;
        est.variant = "direct";
        est.test_function = gs[i].name();
        est.value = acc[i].mean();
        est.std_error = acc[i].std_error();
        est.reps = acc[i].count();
        est.window = window;
        out.push_back(est);
    }
    return out;
}

std::vector<LaplaceEstimate> superposition_pgf_laplace(const LaplaceSetup& setup,
                                                       const std::vector<TestFunction>& gs, int window,
                                                       std::size_t reps) {
    check_setup(setup, reps);
    const double theta = analytic_extremal_index(setup.spec);
    auto acc = monte_carlo(reps, gs.size(), setup.seed, Stream::LaplacePgf,
                           [&](CounterRng& rng, std::span<double> out) {
                               ClusterSample c = sample_cluster(setup.spec, window, rng);
                               LimitCluster cluster;
                               cluster.v = c.v;
                               cluster.points = threshold_cluster(c.z, setup.risk, setup.u, nullptr, 0);
                               for (std::size_t i = 0; i < gs.size(); ++i)
                                   out[i] = std::exp(-cluster_sum(cluster, gs[i]));
                           });
    std::vector<LaplaceEstimate> out;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        LaplaceEstimate est;
        est.provenance = Provenance::Superposition;
        est.variant = "pgf";
        est.test_function = gs[i].name();
        est.value = std::exp(-theta * (1.0 - acc[i].mean()));
        est.std_error = est.value * theta * acc[i].std_error();
        est.reps = acc[i].count();
        est.window = window;
        out.push_back(est);
    }
    return out;
}

std::vector<Lemma1Result> block_conditional_laplace(const LaplaceSetup& setup, const TestFunction& g,
                                                    const std::vector<Lemma1Point>& points, std::size_t n,
                                                    std::size_t r_n, std::size_t series_reps,
                                                    std::size_t tail_reps, int window) {
    check_setup(setup, series_reps);
    if (tail_reps == 0) throw ValidationError("block_conditional_laplace: tail_reps must be >= 1");
    if (r_n == 0 || r_n > n) throw ValidationError("block_conditional_laplace: need 1 <= r_n <= n");
    for (const auto& p : points) {
        if (!(p.v > 0.0 && p.v <= 1.0)) throw ValidationError("block_conditional_laplace: v must lie in (0, 1]");
        if (!(p.t >= 0.0 && p.t <= 1.0)) throw ValidationError("block_conditional_laplace: t must lie in [0, 1]");
    }
    const double a_n = compute_a_n(setup.spec, n, ScalingMethod::AnalyticFrechetTail).value;
    const double theta = analytic_extremal_index(setup.spec);
    const std::size_t width = setup.spec.site_count();
    const std::size_t k = points.size();
    // Rows at or below this norm contribute nothing at any requested v; the
    // largest v has the lowest cut.
    double v_max = 0.0;
    for (const auto& p : points) v_max = std::max(v_max, p.v);
    const double contribute_level =
        a_n * (setup.risk.bounded_by_norm() ? std::max(setup.u, g.value_profile().epsilon) : g.value_profile().epsilon) /
        v_max;

    // Left side: one task per series, merged in series order.
    auto parts = parallel_map(series_reps, [&](std::size_t r) {
        std::vector<MomentAccumulator> acc(k);
        SeriesGenerator gen(setup.spec, Stream::Lemma1Blocks, r);
        std::vector<double> sums(k);
        std::vector<double> x(width);
        const std::size_t blocks = n / r_n;
        for (std::size_t b = 0; b < blocks; ++b) {
            std::fill(sums.begin(), sums.end(), 0.0);
            double block_max = 0.0;
            for (std::size_t i = 0; i < r_n; ++i) {
                const double norm = gen.next_norm();
                block_max = std::max(block_max, norm);
                if (norm <= contribute_level) continue;
                const auto row = gen.current();
                for (std::size_t p = 0; p < k; ++p) {
                    const double scale = points[p].v / a_n;
                    for (std::size_t c = 0; c < width; ++c) x[c] = row[c] * scale;
                    sums[p] += g.time_weight(points[p].t) * row_value(g, setup.risk, setup.u, x, norm * scale);
                }
            }
            if (block_max > a_n)
                for (std::size_t p = 0; p < k; ++p) acc[p].add(std::exp(-sums[p]));
        }
        return acc;
    });
    std::vector<MomentAccumulator> left(k);
    for (const auto& part : parts)
        for (std::size_t p = 0; p < k; ++p) left[p].merge(part[p]);
    if (k > 0 && left[0].count() < kMinConditioningEvents)
        throw TooFewEventsError("block_conditional_laplace: too few blocks with M_{r_n} > a_n", left[0].count(),
                                kMinConditioningEvents);

    // Right side: paired brackets on tail paths.
    auto right = monte_carlo(tail_reps, k, setup.seed, Stream::Lemma1Tail, [&](CounterRng& rng, std::span<double> out) {
        const TailPath path = analytic_tail_path(setup.spec, window, rng);
        for (std::size_t p = 0; p < k; ++p) {
            const double g1 = path_value_sum(path, g, setup.risk, setup.u, 1, points[p].v);
            const double g0 = path_value_sum(path, g, setup.risk, setup.u, 0, points[p].v);
            const double w = g.time_weight(points[p].t);
            out[p] = std::exp(-w * g1) - std::exp(-w * g0);
        }
    });

    std::vector<Lemma1Result> results;
    for (std::size_t p = 0; p < k; ++p) {
        Lemma1Result res;
        res.at = points[p];
        res.left.provenance = Provenance::BlockConditional;
        res.left.variant = "left";
        res.left.test_function = g.name();
        res.left.value = left[p].mean();
        res.left.std_error = left[p].std_error();
        res.left.reps = left[p].count();
        res.left.n = n;
        res.right.provenance = Provenance::BlockConditional;
        res.right.variant = "right";
        res.right.test_function = g.name();
        res.right.value = 1.0 - right[p].mean() / theta;
        res.right.std_error = right[p].std_error() / theta;
        res.right.reps = right[p].count();
        res.right.window = window;
        res.difference = res.left.value - res.right.value;
        res.combined_std_error = combined_std_error(res.left.std_error, res.right.std_error);
        res.conditioning_events = left[p].count();
        res.r_n = r_n;
        res.a_n = a_n;
        res.theta = theta;
        results.push_back(res);
    }
    return results;
}

}  // namespace exlab
