#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exlab/models.hpp"
#include "exlab/risk.hpp"
#include "exlab/tail_path.hpp"

namespace exlab {

enum class TimeProfile { Flat, Bump };

enum class ValueProfileKind { Zero, Indicator, SmoothStep, Ramp };

/// h: [0, inf) -> [0, inf) with h(r) = 0 for r <= epsilon.
///   Indicator:  beta * 1{r > epsilon}
///   SmoothStep: beta * clamp((r - epsilon) / width, 0, 1)
///   Ramp:       beta * min((r - epsilon)^+, 1)
struct ValueProfile {
    ValueProfileKind kind{ValueProfileKind::Zero};
    double beta{0.0};
    double epsilon{0.5};
    double width{0.25};

    double operator()(double r) const noexcept;
};

/// Separable test function g(t, s, x) = w(t) * c_s * h(||x||).
class TestFunction {
  public:
    TestFunction(std::string name, TimeProfile w, ValueProfile h, std::vector<double> site_weights = {});

    /// Library names: zero, step, step-bump, ramp, ramp-bump, weighted, and
    /// "indicator:<beta>" / "indicator:<beta>:<epsilon>".
    static TestFunction from_name(const std::string& name);
    /// The five default functions used in comparison grids.
    static std::vector<TestFunction> library();

    const std::string& name() const noexcept { return name_; }
    TimeProfile time_profile() const noexcept { return w_; }
    const ValueProfile& value_profile() const noexcept { return h_; }
    bool is_zero() const noexcept { return h_.kind == ValueProfileKind::Zero || h_.beta == 0.0; }

    double time_weight(double t) const noexcept;
    double site_weight(std::size_t s) const noexcept;
    double value(double norm) const noexcept { return h_(norm); }
    double operator()(double t, std::size_t s, std::span<const double> x) const;

  private:
    std::string name_;
    TimeProfile w_;
    ValueProfile h_;
    std::vector<double> site_weights_;
};

/// g(t, s, x) if r^(s)(x) > u, else 0.
double thresholded_g(const TestFunction& g, const RiskFunctional& risk, double u, double t, std::size_t s,
                     std::span<const double> x);

/// sum_s c_s h(||x||) 1{r^(s)(x) > u} for one rescaled spatial vector.
double thresholded_row_sum(const TestFunction& g, const RiskFunctional& risk, double u,
                           std::span<const double> x);

/// sum_{j >= first_lag} sum_s c_s h(||v Y_j||) 1{r^(s)(v Y_j) > u}: the
/// time-free part of the thresholded sum over one path.
double path_value_sum(const TailPath& path, const TestFunction& g, const RiskFunctional& risk, double u,
                      int first_lag, double v = 1.0);

/// integral_0^1 exp(-w(t) g1) - exp(-w(t) g0) dt by 64-point Gauss-Legendre.
double time_bracket(TimeProfile w, double g1, double g0);

enum class Provenance { EmpiricalFiniteN, LimitTail, LimitSpectral, Superposition, BlockConditional };

std::string to_string(Provenance p);

struct LaplaceEstimate {
    Provenance provenance{Provenance::LimitTail};
    /// "direct" or "pgf" for Superposition; empty otherwise.
    std::string variant;
    std::string test_function;
    double value{1.0};
    double std_error{0.0};
    std::size_t reps{0};
    /// Series length for EmpiricalFiniteN, window m for the limit forms.
    std::size_t n{0};
    int window{0};
};

enum class VStrategy { ParetoSampling, AntitheticPareto };

struct LaplaceSetup {
    ModelSpec spec;
    RiskFunctional risk = RiskFunctional::sup_norm();
    double u{1.0};
    std::uint64_t seed{1};
};

/// Psi_{N_n(u)}(g) from `reps` independent series of length n. a_n defaults
/// to the analytic scaling.
std::vector<LaplaceEstimate> empirical_laplace(const LaplaceSetup& setup, const std::vector<TestFunction>& gs,
                                               std::size_t n, std::size_t reps,
                                               std::optional<double> a_n = std::nullopt);

/// exp(-integral E[exp(-sum_{j>=1}) - exp(-sum_{j>=0})] dt) over tail paths;
/// both sums use the same path.
std::vector<LaplaceEstimate> limit_laplace_tail(const LaplaceSetup& setup, const std::vector<TestFunction>& gs,
                                                int window, std::size_t reps);

/// Spectral form: v ~ Pareto(alpha) on (1, inf) paired with spectral paths.
std::vector<LaplaceEstimate> limit_laplace_spectral(const LaplaceSetup& setup,
                                                    const std::vector<TestFunction>& gs, int window,
                                                    std::size_t reps,
                                                    VStrategy strategy = VStrategy::ParetoSampling);

/// E[exp(-sum over retained points of g)] over superposition samples.
std::vector<LaplaceEstimate> superposition_laplace(const LaplaceSetup& setup,
                                                   const std::vector<TestFunction>& gs, int window,
                                                   std::size_t reps);

/// exp(-theta (1 - q)) with q = E[exp(-sum_j g(V, s, Z_j))] over clusters.
std::vector<LaplaceEstimate> superposition_pgf_laplace(const LaplaceSetup& setup,
                                                       const std::vector<TestFunction>& gs, int window,
                                                       std::size_t reps);

struct Lemma1Point {
    double v{1.0};
    double t{0.5};
};

struct Lemma1Result {
    Lemma1Point at;
    LaplaceEstimate left;
    LaplaceEstimate right;
    double difference{0.0};
    double combined_std_error{0.0};
    std::size_t conditioning_events{0};
    std::size_t r_n{0};
    double a_n{0.0};
    double theta{1.0};
};

inline constexpr std::size_t kMinConditioningEvents = 100;

/// Left: E[exp(-sum_j sum_s <g>_u(t, s, v X_j / a_n)) | M_{r_n} > a_n] over the
/// consecutive r_n-blocks of `series_reps` series of length n. Right:
/// 1 - theta^{-1} E[exp(-sum_{j>=1}) - exp(-sum_{j>=0})] at v Y over
/// `tail_reps` tail paths.
std::vector<Lemma1Result> block_conditional_laplace(const LaplaceSetup& setup, const TestFunction& g,
                                                    const std::vector<Lemma1Point>& points, std::size_t n,
                                                    std::size_t r_n, std::size_t series_reps,
                                                    std::size_t tail_reps, int window);

}  // namespace exlab
