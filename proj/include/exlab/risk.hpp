#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exlab/rng.hpp"

namespace exlab {

/// Supremum norm on E = [0, inf)^S; the norm used throughout.
double sup_norm(std::span<const double> x) noexcept;

enum class RiskKind { SupNorm, Coordinate, ArgmaxCoordinate, UserTable };

/// Site-dependent risk functional r^(s): E -> [0, inf), positively
/// homogeneous and continuous at the origin. Immutable after construction.
class RiskFunctional {
  public:
    using Callable = std::function<double(std::size_t site, std::span<const double> x)>;

    static RiskFunctional sup_norm();
    static RiskFunctional coordinate();
    /// x(s) * 1{x(s) >= x(s') for all s'}, with ties at the maximum given to
    /// the lowest site index so that exactly one site carries the value.
    static RiskFunctional argmax_coordinate();
    /// r^(s)(x) = max_{s'} W[s][s'] * x(s') for a non-negative |S| x |S| table.
    static RiskFunctional weight_table(std::vector<std::vector<double>> weights);
    /// Arbitrary user functional; probed for positive homogeneity at
    /// construction (relative tolerance 1e-9) and rejected otherwise.
    static RiskFunctional custom(std::string name, std::size_t site_count, Callable fn);

    /// Parses "sup", "coordinate", "argmax" or "table:w00,w01/w10,w11".
    static RiskFunctional from_name(const std::string& name, std::size_t site_count);

    RiskKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    /// Throws ValidationError for a site outside the vector.
    double operator()(std::size_t site, std::span<const double> x) const;

    /// True when r^(s)(x) <= ||x|| holds structurally (the built-in kinds),
    /// which lets callers skip rows with small norm.
    bool bounded_by_norm() const noexcept { return kind_ != RiskKind::UserTable; }

  private:
    RiskFunctional(RiskKind kind, std::string name, Callable fn)
        : kind_(kind), name_(std::move(name)), fn_(std::move(fn)) {}

    RiskKind kind_;
    std::string name_;
    Callable fn_;
};

double eval_risk(const RiskFunctional& risk, std::size_t site, std::span<const double> x);

/// Checks r^(s)(x)/||x|| against `max_ratio_tolerance` on random probes;
/// throws ValidationError when homogeneity fails.
void validate_homogeneity(const RiskFunctional& risk, std::size_t site_count, std::size_t probes,
                          std::uint64_t seed, double tolerance = 1e-9);

struct RiskBoundCertificate {
    double u_candidate{0.0};
    /// Largest observed r^(s)(x)/||x||: the smallest u certified on this probe set.
    double u_min{0.0};
    std::size_t probe_count{0};
};

/// Samples directions on the unit sphere of the sup norm (plus the axes and
/// the diagonal) and checks r^(s)(x) <= u * ||x||. Throws RiskBoundViolation
/// with the worst witness when the candidate fails.
RiskBoundCertificate certify_risk_bound(const RiskFunctional& risk, std::size_t site_count,
                                        double u_candidate, std::size_t probes, CounterRng& rng);

enum class MarkKind { SameAsRisk, AffectedFraction, UserTable };

/// Mark functional l^(s) attached to each exceedance.
class MarkFunctional {
  public:
    using Callable = std::function<double(std::size_t site, std::span<const double> x)>;

    static MarkFunctional same_as_risk();
    /// |S|^-1 * #{s~ : r^(s~)(x) > threshold}; threshold defaults to the
    /// exceedance level u passed at evaluation time.
    static MarkFunctional affected_fraction(std::optional<double> threshold = std::nullopt);
    static MarkFunctional custom(std::string name, Callable fn);
    static MarkFunctional from_name(const std::string& name);

    MarkKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    double evaluate(const RiskFunctional& risk, double u, std::size_t site,
                    std::span<const double> x) const;

  private:
    MarkFunctional(MarkKind kind, std::string name, std::optional<double> threshold, Callable fn)
        : kind_(kind), name_(std::move(name)), threshold_(threshold), fn_(std::move(fn)) {}

    MarkKind kind_;
    std::string name_;
    std::optional<double> threshold_;
    Callable fn_;
};

double eval_mark(const MarkFunctional& mark, const RiskFunctional& risk, double u, std::size_t site,
                 std::span<const double> x);

}  // namespace exlab
