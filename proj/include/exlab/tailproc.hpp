#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "exlab/models.hpp"
#include "exlab/rng.hpp"
#include "exlab/stats.hpp"
#include "exlab/tail_path.hpp"

namespace exlab {

/// Smallest m >= 1 with a^{m alpha} < tolerance (1 for a = 0).
int certified_window(const ModelSpec& spec, double tolerance = 1e-6);

/// One path in the requested normalization (delegates to the closed form).
TailPath sample_tail_path(const ModelSpec& spec, int window, CounterRng& rng,
                          Normalization normalization = Normalization::Tail);

/// Tail path Y and its spectral path Theta built from the same draw, with
/// Y_j = pareto * Theta_j.
struct PairedPaths {
    TailPath tail;
    TailPath spectral;
    double pareto{1.0};
};
PairedPaths sample_paired_paths(const ModelSpec& spec, int window, CounterRng& rng);

/// Divides every lag by ||Y_0||.
TailPath to_spectral(const TailPath& tail);

struct EmpiricalTailEnsemble {
    std::vector<TailPath> paths;
    double threshold{0.0};
    int window{0};
    Normalization normalization{Normalization::Tail};
    /// All exceedance times, including those too close to an edge to use.
    std::size_t exceedances{0};
};

inline constexpr std::size_t kMinEmpiricalExceedances = 200;

/// Windows around each t with ||X_t|| > threshold, divided by the threshold
/// (Tail) or by ||X_t|| (Spectral). Throws TooFewEventsError below 200 paths.
EmpiricalTailEnsemble empirical_tail_path(const std::vector<SpatioTemporalSeries>& ensemble,
                                          double threshold, int window,
                                          Normalization normalization = Normalization::Tail);

/// Same estimator on `reps` fresh series of length n drawn on the
/// EmpiricalTail stream, without keeping the series in memory.
EmpiricalTailEnsemble empirical_tail_path(const ModelSpec& spec, std::size_t n, std::size_t reps,
                                          double threshold, int window,
                                          Normalization normalization = Normalization::Tail);

struct ClusterSample {
    /// Uniform time label.
    double v{0.5};
    /// Z_j on lags [-m, m], tail normalization.
    TailPath z;
    /// Tail paths drawn to obtain this sample (accepted one included).
    std::size_t attempts{0};
};

inline constexpr std::size_t kDefaultRejectionBudget = 1'000'000;

/// Tail path conditioned on sup_{j <= -1} ||Y_j|| <= 1 by rejection. For the
/// max-AR closed form a path with backward mass has ||Y_{-1}|| > 1, so the
/// window check at lags [-m, -1] (m >= 1) is exact for all negative lags.
ClusterSample sample_cluster(const ModelSpec& spec, int window, CounterRng& rng,
                             std::size_t budget = kDefaultRejectionBudget);

struct ExtremalIndexEstimate {
    double theta{0.0};
    double std_error{0.0};
    std::size_t reps{0};
    int window{0};
};

/// P(max_{1 <= j <= m} ||Y_j|| <= 1) over `reps` tail paths.
ExtremalIndexEstimate extremal_index_mc(const ModelSpec& spec, int window, std::size_t reps,
                                        std::uint64_t seed);

struct BlockIndexEstimate {
    double theta{0.0};
    /// Series-level linearization (ratio of sums).
    double std_error{0.0};
    std::size_t blocks{0};
    std::size_t blocks_exceeding{0};
    std::size_t observations{0};
    std::size_t exceedances{0};
    std::size_t r_n{0};
    double a_n{0.0};
};

/// theta_n = P(M_{r_n} > a_n) / (r_n P(||X_0|| > a_n)) from block and marginal
/// frequencies over consecutive blocks. Throws TooFewEventsError when no
/// marginal exceedance is observed.
BlockIndexEstimate extremal_index_blocks(const std::vector<SpatioTemporalSeries>& ensemble,
                                         std::size_t r_n, double a_n);

/// Streaming version over `reps` fresh series of length n (ExtremalIndex stream).
BlockIndexEstimate extremal_index_blocks(const ModelSpec& spec, std::size_t n, std::size_t reps,
                                         std::size_t r_n, double a_n);

struct LagProfile {
    int window{0};
    /// P(||Y_j|| > level) for j = -m..m, index j + m.
    std::vector<double> probability;
    std::vector<double> std_error;
    std::size_t paths{0};

    double at(int lag) const { return probability.at(static_cast<std::size_t>(lag + window)); }
    double se(int lag) const { return std_error.at(static_cast<std::size_t>(lag + window)); }
};

LagProfile lag_exceedance_profile(const std::vector<TailPath>& paths, double level = 1.0);

/// #{j in [-m, m] : ||Y_j|| > level}.
std::size_t exceedance_count(const TailPath& path, double level = 1.0);

}  // namespace exlab
