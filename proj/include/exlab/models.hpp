#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exlab/rng.hpp"
#include "exlab/tail_path.hpp"

namespace exlab {

enum class ModelKind { IidFrechet, SpatialMaxAR };

/// Spatial max-autoregressive series with Frechet innovations:
///   Z_t(s) = max(lambda * V_t, W_t(s)),  V_t, W_t(s) iid standard Frechet(alpha)
///   X_t(s) = max(a * X_{t-1}(s), (1 - a) * Z_t(s)).
/// IidFrechet is the special case a = 0, lambda = 0.
struct ModelSpec {
    ModelKind kind{ModelKind::SpatialMaxAR};
    double alpha{1.0};
    double a{0.0};
    double lambda{0.0};
    std::vector<std::string> sites{"s0"};
    std::uint64_t seed{1};

    static ModelSpec iid(double alpha, std::size_t site_count = 1, std::uint64_t seed = 1);
    static ModelSpec max_ar(double a, double alpha, std::size_t site_count = 1, double lambda = 0.0,
                            std::uint64_t seed = 1);

    std::size_t site_count() const noexcept { return sites.size(); }

    /// Throws ValidationError on out-of-range or non-finite parameters.
    void validate() const;
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);
std::vector<std::string> default_site_names(std::size_t count);

/// n x |S| non-negative array, row t holding X_{t+1} (the series is 1-indexed
/// in time, storage is 0-indexed).
struct SpatioTemporalSeries {
    std::size_t length{0};
    std::vector<std::string> sites;
    std::vector<double> values;
    std::size_t burn_in_discarded{0};

    std::size_t site_count() const noexcept { return sites.size(); }
    std::span<const double> row(std::size_t t) const noexcept {
        return {values.data() + t * sites.size(), sites.size()};
    }
    double at(std::size_t t, std::size_t s) const noexcept { return values[t * sites.size() + s]; }
    double norm(std::size_t t) const noexcept;
};

/// Burn-in steps discarded before the first returned observation.
std::size_t burn_in_length(const ModelSpec& spec);

/// Streaming simulator; the constructor runs the burn-in so that the first
/// call to next() is (approximately) a draw from the stationary law.
class SeriesGenerator {
  public:
    SeriesGenerator(const ModelSpec& spec, Stream stream, std::uint64_t replication_id);

    /// Advances one time step and writes X_t into `row` (size |S|).
    void next(std::span<double> row);
    /// Advances one step and returns ||X_t|| (the row is kept internally).
    double next_norm();

    std::span<const double> current() const noexcept { return state_; }
    std::size_t burn_in() const noexcept { return burn_in_; }

  private:
    void step();

    double a_;
    double one_minus_a_;
    double alpha_;
    double lambda_;
    std::vector<double> state_;
    CounterRng rng_;
    std::size_t burn_in_;
};

SpatioTemporalSeries simulate_series(const ModelSpec& spec, std::size_t n, std::uint64_t replication_id);

/// Tail scale of a single coordinate: P(X_0(s) > x) = 1 - exp(-c x^-alpha).
double site_tail_scale(const ModelSpec& spec);
/// Tail scale of the sup norm: P(||X_0|| > x) = 1 - exp(-C x^-alpha).
double norm_tail_scale(const ModelSpec& spec);
double norm_exceedance_probability(const ModelSpec& spec, double x);
/// Quantile of ||X_0|| at probability p.
double norm_quantile(const ModelSpec& spec, double p);

bool has_closed_form_tail(const ModelSpec& spec) noexcept;

/// One spectral tail path Theta on lags [-m, m] (||Theta_0|| = 1 exactly).
/// Throws UnsupportedModelError when lambda > 0.
TailPath analytic_spectral_path(const ModelSpec& spec, int window, CounterRng& rng);

/// One tail path Y = P_alpha * Theta on lags [-m, m].
TailPath analytic_tail_path(const ModelSpec& spec, int window, CounterRng& rng);

/// theta = P(sup_{j >= 1} ||Y_j|| <= 1) = 1 - a^alpha.
double analytic_extremal_index(const ModelSpec& spec);

}  // namespace exlab
