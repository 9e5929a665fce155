#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace exlab {

/// Invalid input or configuration. The CLI maps this to exit status 2.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A closed form was requested for a model that has none registered.
class UnsupportedModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Too few exceedances or conditioning events to form an estimate.
class TooFewEventsError : public std::runtime_error {
  public:
    TooFewEventsError(const std::string& what, std::size_t observed, std::size_t required)
        : std::runtime_error(what + " (observed " + std::to_string(observed) + ", need " +
                             std::to_string(required) + ")"),
          observed_(observed),
          required_(required) {}

    std::size_t observed() const noexcept { return observed_; }
    std::size_t required() const noexcept { return required_; }

  private:
    std::size_t observed_;
    std::size_t required_;
};

/// Rejection sampler ran out of attempts. Carries the acceptance-rate estimate.
class RejectionBudgetExceeded : public std::runtime_error {
  public:
    RejectionBudgetExceeded(std::size_t attempts, double theta_estimate)
        : std::runtime_error("rejection budget of " + std::to_string(attempts) +
                             " draws exceeded; acceptance estimate " +
                             std::to_string(theta_estimate)),
          attempts_(attempts),
          theta_estimate_(theta_estimate) {}

    std::size_t attempts() const noexcept { return attempts_; }
    double theta_estimate() const noexcept { return theta_estimate_; }

  private:
    std::size_t attempts_;
    double theta_estimate_;
};

class RootFindingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The risk bound r^(s)(x) <= u * ||x|| failed on a probe.
class RiskBoundViolation : public std::runtime_error {
  public:
    RiskBoundViolation(double u_candidate, double worst_ratio, std::size_t site,
                       std::vector<double> witness)
        : std::runtime_error("risk bound violated: u = " + std::to_string(u_candidate) +
                             " but r(x)/||x|| reaches " + std::to_string(worst_ratio) +
                             " at site " + std::to_string(site)),
          u_candidate_(u_candidate),
          worst_ratio_(worst_ratio),
          site_(site),
          witness_(std::move(witness)) {}

    double u_candidate() const noexcept { return u_candidate_; }
    double worst_ratio() const noexcept { return worst_ratio_; }
    std::size_t site() const noexcept { return site_; }
    const std::vector<double>& witness() const noexcept { return witness_; }

  private:
    double u_candidate_;
    double worst_ratio_;
    std::size_t site_;
    std::vector<double> witness_;
};

}  // namespace exlab
