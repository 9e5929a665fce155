#include "exlab/models.hpp"

#include <algorithm>
#include <cmath>

#include "exlab/error.hpp"

namespace exlab {

ModelSpec ModelSpec::iid(double alpha, std::size_t site_count, std::uint64_t seed) {
    ModelSpec spec;
    spec.kind = ModelKind::IidFrechet;
    spec.alpha = alpha;
    spec.sites = default_site_names(site_count);
    spec.seed = seed;
    return spec;
}

ModelSpec ModelSpec::max_ar(double a, double alpha, std::size_t site_count, double lambda,
                            std::uint64_t seed) {
    ModelSpec spec;
    spec.kind = ModelKind::SpatialMaxAR;
    spec.alpha = alpha;
    spec.a = a;
    spec.lambda = lambda;
    spec.sites = default_site_names(site_count);
    spec.seed = seed;
    return spec;
}

void ModelSpec::validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(a) || !std::isfinite(lambda))
        throw ValidationError("model: parameters must be finite");
    if (!(alpha > 0.0)) throw ValidationError("model.alpha: must be > 0");
    if (!(a >= 0.0 && a < 1.0)) throw ValidationError("model.a: must lie in [0, 1)");
    if (!(lambda >= 0.0 && lambda < 1.0)) throw ValidationError("model.lambda: must lie in [0, 1)");
    if (sites.empty()) throw ValidationError("model.sites: need at least one site");
    if (kind == ModelKind::IidFrechet && (a != 0.0 || lambda != 0.0))
        throw ValidationError("model: iid kind requires a = 0 and lambda = 0");
}

std::string to_string(ModelKind kind) {
    return kind == ModelKind::IidFrechet ? "iid" : "maxar";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "iid" || name == "IidFrechet") return ModelKind::IidFrechet;
    if (name == "maxar" || name == "SpatialMaxAR") return ModelKind::SpatialMaxAR;
    throw ValidationError("model.kind: unknown model '" + name + "'");
}

std::vector<std::string> default_site_names(std::size_t count) {
    std::vector<std::string> names;
    names.reserve(count);
    for (std::size_t s = 0; s < count; ++s) names.push_back("s" + std::to_string(s));
    return names;
}

double SpatioTemporalSeries::norm(std::size_t t) const noexcept {
    const auto r = row(t);
    return *std::max_element(r.begin(), r.end());
}

std::size_t burn_in_length(const ModelSpec& spec) {
    if (spec.a == 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(200.0 / (1.0 - spec.a)));
}

SeriesGenerator::SeriesGenerator(const ModelSpec& spec, Stream stream, std::uint64_t replication_id)
    : a_(spec.a),
      one_minus_a_(1.0 - spec.a),
      alpha_(spec.alpha),
      lambda_(spec.lambda),
      state_(spec.site_count(), 0.0),
      rng_(spec.seed, stream, replication_id),
      burn_in_(burn_in_length(spec)) {
    spec.validate();
    for (std::size_t i = 0; i < burn_in_; ++i) step();
}

void SeriesGenerator::step() {
    const double common = lambda_ > 0.0 ? lambda_ * rng_.frechet(alpha_) : 0.0;
    for (double& x : state_) {
        const double z = std::max(common, rng_.frechet(alpha_));
        x = std::max(a_ * x, one_minus_a_ * z);
    }
}

void SeriesGenerator::next(std::span<double> row) {
    step();
    std::copy(state_.begin(), state_.end(), row.begin());
}

double SeriesGenerator::next_norm() {
    step();
    return *std::max_element(state_.begin(), state_.end());
}

SpatioTemporalSeries simulate_series(const ModelSpec& spec, std::size_t n, std::uint64_t replication_id) {
    spec.validate();
    if (n == 0) throw ValidationError("simulate_series: n must be >= 1");
    SeriesGenerator gen(spec, Stream::Series, replication_id);
    SpatioTemporalSeries series;
    series.length = n;
    series.sites = spec.sites;
    series.burn_in_discarded = gen.burn_in();
    series.values.resize(n * spec.site_count());
    const std::size_t width = spec.site_count();
    for (std::size_t t = 0; t < n; ++t) gen.next({series.values.data() + t * width, width});
    return series;
}

double site_tail_scale(const ModelSpec& spec) {
    const double innovation = 1.0 + std::pow(spec.lambda, spec.alpha);
    if (spec.a == 0.0) return innovation;
    return innovation * std::pow(1.0 - spec.a, spec.alpha) / (1.0 - std::pow(spec.a, spec.alpha));
}

double norm_tail_scale(const ModelSpec& spec) {
    const double innovation =
        static_cast<double>(spec.site_count()) + (spec.lambda > 0.0 ? std::pow(spec.lambda, spec.alpha) : 0.0);
    if (spec.a == 0.0) return innovation;
    return innovation * std::pow(1.0 - spec.a, spec.alpha) / (1.0 - std::pow(spec.a, spec.alpha));
}

double norm_exceedance_probability(const ModelSpec& spec, double x) {
    if (x <= 0.0) return 1.0;
    return -std::expm1(-norm_tail_scale(spec) * std::pow(x, -spec.alpha));
}

double norm_quantile(const ModelSpec& spec, double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("norm_quantile: p must lie in (0, 1)");
    return std::pow(norm_tail_scale(spec) / -std::log(p), 1.0 / spec.alpha);
}

bool has_closed_form_tail(const ModelSpec& spec) noexcept { return spec.lambda == 0.0; }

TailPath analytic_spectral_path(const ModelSpec& spec, int window, CounterRng& rng) {
    spec.validate();
    if (window < 0) throw ValidationError("analytic_tail_path: window must be >= 0");
    if (!has_closed_form_tail(spec))
        throw UnsupportedModelError("no closed-form tail process registered for lambda > 0");

    TailPath path(window, spec.site_count(), Normalization::Spectral);
    const auto lead = static_cast<std::size_t>(rng.index(spec.site_count()));

    // Backward inheritance depth K with P(K >= j) = a^{j alpha}.
    int depth = 0;
    if (spec.a > 0.0) {
        const double k = std::floor(std::log(rng.uniform()) / (spec.alpha * std::log(spec.a)));
        depth = static_cast<int>(std::min(k, static_cast<double>(window)));
    }

    for (int j = 0; j <= window; ++j) path.at(j)[lead] = std::pow(spec.a, j);
    for (int j = 1; j <= depth; ++j) path.at(-j)[lead] = std::pow(spec.a, -j);
    return path;
}

TailPath analytic_tail_path(const ModelSpec& spec, int window, CounterRng& rng) {
    const TailPath theta = analytic_spectral_path(spec, window, rng);
    return theta.scaled(rng.pareto(spec.alpha), Normalization::Tail);
}

double analytic_extremal_index(const ModelSpec& spec) {
    spec.validate();
    return spec.a == 0.0 ? 1.0 : 1.0 - std::pow(spec.a, spec.alpha);
}

}  // namespace exlab
