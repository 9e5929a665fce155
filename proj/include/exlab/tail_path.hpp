#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace exlab {

enum class Normalization { Tail, Spectral };

/// Two-sided window {Y_j : -m <= j <= m} of spatial vectors. Lags are stored
/// lag-major starting at -m.
class TailPath {
  public:
    TailPath() = default;
    TailPath(int window, std::size_t sites, Normalization normalization)
        : window_(window),
          sites_(sites),
          normalization_(normalization),
          values_(static_cast<std::size_t>(2 * window + 1) * sites, 0.0) {}

    int window() const noexcept { return window_; }
    std::size_t site_count() const noexcept { return sites_; }
    Normalization normalization() const noexcept { return normalization_; }
    void set_normalization(Normalization n) noexcept { normalization_ = n; }

    std::span<double> at(int lag) noexcept { return {values_.data() + offset(lag), sites_}; }
    std::span<const double> at(int lag) const noexcept {
        return {values_.data() + offset(lag), sites_};
    }

    double norm(int lag) const noexcept {
        const auto v = at(lag);
        return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    }

    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }

    /// Multiplies every lag by `factor` and relabels the normalization.
    TailPath scaled(double factor, Normalization normalization) const {
        TailPath out = *this;
        for (double& v : out.values_) v *= factor;
        out.normalization_ = normalization;
        return out;
    }

  private:
    std::size_t offset(int lag) const noexcept {
        return static_cast<std::size_t>(lag + window_) * sites_;
    }

    int window_{0};
    std::size_t sites_{0};
    Normalization normalization_{Normalization::Tail};
    std::vector<double> values_;
};

}  // namespace exlab
