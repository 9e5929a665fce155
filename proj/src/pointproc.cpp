#include "exlab/pointproc.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/toms748_solve.hpp>

#include "exlab/error.hpp"
#include "exlab/parallel.hpp"

namespace exlab {

std::string to_string(ScalingMethod method) {
    return method == ScalingMethod::AnalyticFrechetTail ? "analytic" : "empirical";
}

ScalingMethod scaling_method_from_string(const std::string& name) {
    if (name == "analytic" || name == "AnalyticFrechetTail") return ScalingMethod::AnalyticFrechetTail;
    if (name == "empirical" || name == "EmpiricalQuantile") return ScalingMethod::EmpiricalQuantile;
    throw ValidationError("scaling: unknown method '" + name + "'");
}

namespace {

constexpr std::size_t kPresampleChunk = std::size_t{1} << 17;

double analytic_root(const ModelSpec& spec, std::size_t n) {
    const double scale = norm_tail_scale(spec);
    const double log_target = -std::log(static_cast<double>(n));
    // Work in y = log x: f(y) = log P(||X_0|| > e^y) - log(1/n), decreasing in y.
    auto f = [&](double y) {
        const double p = -std::expm1(-scale * std::exp(-spec.alpha * y));
        return std::log(p) - log_target;
    };
    double lo = std::log(DBL_EPSILON);
    double hi = 700.0 / std::max(spec.alpha, 1.0);
    if (f(hi) > 0.0) throw RootFindingError("compute_a_n: upper bracket does not enclose the root");
    std::uintmax_t iterations = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
    if (iterations >= 200) throw RootFindingError("compute_a_n: root finder did not converge");
    return std::exp(0.5 * (a + b));
}

}  // namespace

std::vector<double> presample_norms(const ModelSpec& spec, std::size_t count) {
    spec.validate();
    const std::size_t chunks = (count + kPresampleChunk - 1) / kPresampleChunk;
    auto parts = parallel_map(chunks, [&](std::size_t c) {
        const std::size_t len = std::min(kPresampleChunk, count - c * kPresampleChunk);
        SeriesGenerator gen(spec, Stream::ScalingPresample, c);
        std::vector<double> out(len);
        for (double& v : out) v = gen.next_norm();
        return out;
    });
    std::vector<double> all;
    all.reserve(count);
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

ScalingValue compute_a_n(const ModelSpec& spec, std::size_t n, ScalingMethod method,
                         const ScalingOptions& options) {
    spec.validate();
    if (n == 0) throw ValidationError("compute_a_n: n must be >= 1");
    ScalingValue out;
    out.n = n;
    out.method = method;
    if (n < 10) out.warning = "n = " + std::to_string(n) + " < 10: asymptotic scaling is not meaningful";
    if (n == 1) {
        out.value = DBL_EPSILON;
        out.degenerate = true;
        return out;
    }

    if (method == ScalingMethod::AnalyticFrechetTail) {
        if (spec.kind == ModelKind::IidFrechet && !options.force_root) {
            const double q = -std::log1p(-1.0 / static_cast<double>(n));
            out.value = std::pow(norm_tail_scale(spec) / q, 1.0 / spec.alpha);
        } else {
            out.value = analytic_root(spec, n);
        }
        return out;
    }

    if (n >= options.presamples)
        throw TooFewEventsError("compute_a_n: empirical quantile needs more pre-samples than n",
                                options.presamples, n + 1);
    std::vector<double> sample = presample_norms(spec, options.presamples);
    const double level = 1.0 - 1.0 / static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(sample.size())));
    k = std::clamp<std::size_t>(k, 1, sample.size()) - 1;
    std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(k), sample.end());
    out.value = sample[k];
    return out;
}

double ScalingSequence::operator()(std::size_t n) {
    for (const auto& v : values_)
        if (v.n == n) return v.value;
    values_.push_back(compute_a_n(spec_, n, method_, options_));
    return values_.back().value;
}

std::size_t block_length(std::size_t n, double exponent) {
    if (n == 0) throw ValidationError("block_length: n must be >= 1");
    if (!(exponent > 0.0 && exponent < 1.0)) throw ValidationError("block_length: exponent must lie in (0, 1)");
    const double raw = std::pow(static_cast<double>(n), exponent);
    const double nearest = std::round(raw);
    const double value = std::abs(raw - nearest) <= 1e-9 * nearest ? nearest : std::floor(raw);
    return std::max<std::size_t>(1, static_cast<std::size_t>(value));
}

PointPattern build_exceedance_pattern(const SpatioTemporalSeries& series, const RiskFunctional& risk,
                                      double u, double a_n, const MarkFunctional* mark) {
    if (!(u > 0.0)) throw ValidationError("pattern: u must be > 0");
    if (!(a_n > 0.0)) throw ValidationError("pattern: a_n must be > 0");
    PointPattern pattern;
    pattern.sites = series.sites;
    pattern.u = u;
    pattern.n = series.length;
    pattern.a_n = a_n;

    const std::size_t width = series.site_count();
    const double level = a_n * u;
    std::vector<double> scaled(width);
    for (std::size_t t = 0; t < series.length; ++t) {
        if (risk.bounded_by_norm() && series.norm(t) <= level) continue;
        const auto row = series.row(t);
        for (std::size_t k = 0; k < width; ++k) scaled[k] = row[k] / a_n;
        for (std::size_t s = 0; s < width; ++s) {
            if (!(risk(s, scaled) > u)) continue;
            Point p;
            p.time_index = t + 1;
            p.t = static_cast<double>(t + 1) / static_cast<double>(series.length);
            p.site = s;
            p.x = scaled;
            if (mark) p.mark = mark->evaluate(risk, u, s, scaled);
            pattern.points.push_back(std::move(p));
        }
    }
    return pattern;
}

std::size_t count_exceedances(const SpatioTemporalSeries& series, const RiskFunctional& risk, double u,
                              double a_n) {
    const double level = a_n * u;
    std::size_t count = 0;
    for (std::size_t t = 0; t < series.length; ++t) {
        const auto row = series.row(t);
        for (std::size_t s = 0; s < series.site_count(); ++s)
            if (risk(s, row) > level) ++count;
    }
    return count;
}

double max_over_window(const SpatioTemporalSeries& series, std::size_t k, std::size_t l) {
    if (k > l) return -std::numeric_limits<double>::infinity();
    if (k < 1 || l > series.length)
        throw std::out_of_range("max_over_window: [" + std::to_string(k) + ", " + std::to_string(l) +
                                "] outside [1, " + std::to_string(series.length) + "]");
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = k; j <= l; ++j) m = std::max(m, series.norm(j - 1));
    return m;
}

}  // namespace exlab
