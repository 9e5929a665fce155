#include "exlab/tailproc.hpp"

#include <algorithm>
#include <cmath>

#include "exlab/error.hpp"
#include "exlab/parallel.hpp"

namespace exlab {

int certified_window(const ModelSpec& spec, double tolerance) {
    spec.validate();
    if (!(tolerance > 0.0 && tolerance < 1.0)) throw ValidationError("certified_window: tolerance must lie in (0, 1)");
    if (spec.a == 0.0) return 1;
    // a^{m alpha} < tol  <=>  m > log(tol) / (alpha log a).
    const double bound = std::log(tolerance) / (spec.alpha * std::log(spec.a));
    int m = std::max(1, static_cast<int>(std::floor(bound)) + 1);
    while (m > 1 && std::pow(spec.a, (m - 1) * spec.alpha) < tolerance) --m;
    while (std::pow(spec.a, m * spec.alpha) >= tolerance) ++m;
    return m;
}

TailPath sample_tail_path(const ModelSpec& spec, int window, CounterRng& rng, Normalization normalization) {
    return normalization == Normalization::Spectral ? analytic_spectral_path(spec, window, rng)
                                                    : analytic_tail_path(spec, window, rng);
}

PairedPaths sample_paired_paths(const ModelSpec& spec, int window, CounterRng& rng) {
    PairedPaths out;
    out.spectral = analytic_spectral_path(spec, window, rng);
    out.pareto = rng.pareto(spec.alpha);
    out.tail = out.spectral.scaled(out.pareto, Normalization::Tail);
    return out;
}

TailPath to_spectral(const TailPath& tail) {
    const double norm0 = tail.norm(0);
    if (!(norm0 > 0.0)) throw ValidationError("to_spectral: ||Y_0|| must be > 0");
    // Divide rather than multiply by the reciprocal so that ||Theta_0|| = 1 exactly.
    TailPath out = tail;
    for (double& v : out.values()) v /= norm0;
    out.set_normalization(Normalization::Spectral);
    return out;
}

namespace {

void harvest_windows(const SpatioTemporalSeries& series, double threshold, int window,
                     Normalization normalization, std::vector<TailPath>& out, std::size_t& exceedances) {
    const std::size_t w = static_cast<std::size_t>(window);
    const std::size_t width = series.site_count();
    for (std::size_t t = 0; t < series.length; ++t) {
        const double norm = series.norm(t);
        if (!(norm > threshold)) continue;
        ++exceedances;
        if (t < w || t + w >= series.length) continue;
        TailPath path(window, width, normalization);
        const double scale = normalization == Normalization::Spectral ? norm : threshold;
        for (int j = -window; j <= window; ++j) {
            const auto row = series.row(static_cast<std::size_t>(static_cast<long>(t) + j));
            auto dst = path.at(j);
            for (std::size_t k = 0; k < width; ++k) dst[k] = row[k] / scale;
        }
        out.push_back(std::move(path));
    }
}

EmpiricalTailEnsemble finish_ensemble(std::vector<TailPath> paths, std::size_t exceedances, double threshold,
                                      int window, Normalization normalization) {
    if (paths.size() < kMinEmpiricalExceedances)
        throw TooFewEventsError("empirical_tail_path: too few exceedances", paths.size(),
                                kMinEmpiricalExceedances);
    EmpiricalTailEnsemble out;
    out.paths = std::move(paths);
    out.threshold = threshold;
    out.window = window;
    out.normalization = normalization;
    out.exceedances = exceedances;
    return out;
}

void check_empirical_args(double threshold, int window) {
    if (!(threshold > 0.0)) throw ValidationError("empirical_tail_path: threshold must be > 0");
    if (window < 0) throw ValidationError("empirical_tail_path: window must be >= 0");
}

}  // namespace

EmpiricalTailEnsemble empirical_tail_path(const std::vector<SpatioTemporalSeries>& ensemble, double threshold,
                                          int window, Normalization normalization) {
    check_empirical_args(threshold, window);
    std::vector<TailPath> paths;
    std::size_t exceedances = 0;
    for (const auto& series : ensemble) harvest_windows(series, threshold, window, normalization, paths, exceedances);
    return finish_ensemble(std::move(paths), exceedances, threshold, window, normalization);
}

EmpiricalTailEnsemble empirical_tail_path(const ModelSpec& spec, std::size_t n, std::size_t reps,
                                          double threshold, int window, Normalization normalization) {
    spec.validate();
    check_empirical_args(threshold, window);
    struct Part {
        std::vector<TailPath> paths;
        std::size_t exceedances{0};
    };
    auto parts = parallel_map(reps, [&](std::size_t r) {
        SpatioTemporalSeries series;
        series.length = n;
        series.sites = spec.sites;
        series.values.resize(n * spec.site_count());
        SeriesGenerator gen(spec, Stream::EmpiricalTail, r);
        for (std::size_t t = 0; t < n; ++t)
            gen.next({series.values.data() + t * spec.site_count(), spec.site_count()});
        Part part;
        harvest_windows(series, threshold, window, normalization, part.paths, part.exceedances);
        return part;
    });
    std::vector<TailPath> paths;
    std::size_t exceedances = 0;
    for (auto& part : parts) {
        exceedances += part.exceedances;
        std::move(part.paths.begin(), part.paths.end(), std::back_inserter(paths));
    }
    return finish_ensemble(std::move(paths), exceedances, threshold, window, normalization);
}

ClusterSample sample_cluster(const ModelSpec& spec, int window, CounterRng& rng, std::size_t budget) {
    if (window < 1) throw ValidationError("sample_cluster: window must be >= 1");
    if (budget == 0) throw ValidationError("sample_cluster: budget must be >= 1");
    for (std::size_t attempt = 1; attempt <= budget; ++attempt) {
        TailPath path = analytic_tail_path(spec, window, rng);
        bool accepted = true;
        for (int j = -window; j <= -1 && accepted; ++j) accepted = path.norm(j) <= 1.0;
        if (!accepted) continue;
        ClusterSample out;
        out.v = rng.uniform();
        out.z = std::move(path);
        out.attempts = attempt;
        return out;
    }
    throw RejectionBudgetExceeded(budget, 0.0);
}

ExtremalIndexEstimate extremal_index_mc(const ModelSpec& spec, int window, std::size_t reps, std::uint64_t seed) {
    spec.validate();
    if (window < 1) throw ValidationError("extremal_index_mc: window must be >= 1");
    if (reps == 0) throw ValidationError("extremal_index_mc: reps must be >= 1");
    auto acc = monte_carlo(reps, 1, seed, Stream::ExtremalIndex, [&](CounterRng& rng, std::span<double> out) {
        const TailPath path = analytic_tail_path(spec, window, rng);
        bool below = true;
        for (int j = 1; j <= window && below; ++j) below = path.norm(j) <= 1.0;
        out[0] = below ? 1.0 : 0.0;
    });
    ExtremalIndexEstimate est;
    est.theta = acc[0].mean();
    est.std_error = binomial_std_error(est.theta, reps);
    est.reps = reps;
    est.window = window;
    return est;
}

namespace {

struct BlockSums {
    std::size_t blocks{0};
    std::size_t blocks_exceeding{0};
    std::size_t exceedances{0};
    // Block-level sums for the ratio linearization: sum b, sum b e, sum e^2.
    double sum_be{0.0};
    double sum_ee{0.0};

    void add_block(std::size_t block_exceedances) {
        ++blocks;
        exceedances += block_exceedances;
        const double e = static_cast<double>(block_exceedances);
        if (block_exceedances > 0) {
            ++blocks_exceeding;
            sum_be += e;
        }
        sum_ee += e * e;
    }

    void merge(const BlockSums& o) {
        blocks += o.blocks;
        blocks_exceeding += o.blocks_exceeding;
        exceedances += o.exceedances;
        sum_be += o.sum_be;
        sum_ee += o.sum_ee;
    }
};

template <class NormAt>
BlockSums scan_blocks(std::size_t length, std::size_t r_n, double a_n, NormAt&& norm_at) {
    BlockSums sums;
    const std::size_t blocks = length / r_n;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < r_n; ++i)
            if (norm_at(b * r_n + i) > a_n) ++hits;
        sums.add_block(hits);
    }
    return sums;
}

BlockIndexEstimate finish_blocks(const BlockSums& s, std::size_t r_n, double a_n) {
    if (s.exceedances == 0)
        throw TooFewEventsError("extremal_index_blocks: no marginal exceedances observed", 0, 1);
    BlockIndexEstimate est;
    est.blocks = s.blocks;
    est.blocks_exceeding = s.blocks_exceeding;
    est.observations = s.blocks * r_n;
    est.exceedances = s.exceedances;
    est.r_n = r_n;
    est.a_n = a_n;
    // With N = blocks * r_n the ratio of frequencies reduces to B_exc / E.
    const double e_total = static_cast<double>(s.exceedances);
    est.theta = static_cast<double>(s.blocks_exceeding) / e_total;
    const double th = est.theta;
    const double sum_z2 = static_cast<double>(s.blocks_exceeding) - 2.0 * th * s.sum_be + th * th * s.sum_ee;
    const double k = static_cast<double>(s.blocks);
    est.std_error = k > 1 ? std::sqrt(std::max(sum_z2, 0.0) * k / (k - 1.0)) / e_total : 0.0;
    return est;
}

void check_block_args(std::size_t r_n, double a_n) {
    if (r_n == 0) throw ValidationError("extremal_index_blocks: r_n must be >= 1");
    if (!(a_n > 0.0)) throw ValidationError("extremal_index_blocks: a_n must be > 0");
}

}  // namespace

BlockIndexEstimate extremal_index_blocks(const std::vector<SpatioTemporalSeries>& ensemble, std::size_t r_n,
                                         double a_n) {
    check_block_args(r_n, a_n);
    BlockSums total;
    for (const auto& series : ensemble)
        total.merge(scan_blocks(series.length, r_n, a_n, [&](std::size_t t) { return series.norm(t); }));
    return finish_blocks(total, r_n, a_n);
}

BlockIndexEstimate extremal_index_blocks(const ModelSpec& spec, std::size_t n, std::size_t reps, std::size_t r_n,
                                         double a_n) {
    spec.validate();
    check_block_args(r_n, a_n);
    if (reps == 0) throw ValidationError("extremal_index_blocks: reps must be >= 1");
    auto parts = parallel_map(reps, [&](std::size_t r) {
        SeriesGenerator gen(spec, Stream::ExtremalIndex, r);
        std::size_t pos = 0;
        double current = 0.0;
        // Blocks are scanned in order, so each index is requested exactly once.
        return scan_blocks(n, r_n, a_n, [&](std::size_t t) {
            while (pos <= t) {
                current = gen.next_norm();
                ++pos;
            }
            return current;
        });
    });
    BlockSums total;
    for (const auto& p : parts) total.merge(p);
    return finish_blocks(total, r_n, a_n);
}

LagProfile lag_exceedance_profile(const std::vector<TailPath>& paths, double level) {
    LagProfile profile;
    if (paths.empty()) return profile;
    profile.window = paths.front().window();
    profile.paths = paths.size();
    const std::size_t lags = static_cast<std::size_t>(2 * profile.window + 1);
    std::vector<std::size_t> hits(lags, 0);
    for (const auto& path : paths) {
        if (path.window() != profile.window) throw ValidationError("lag_exceedance_profile: mixed windows");
        for (int j = -profile.window; j <= profile.window; ++j)
            if (path.norm(j) > level) ++hits[static_cast<std::size_t>(j + profile.window)];
    }
    for (std::size_t i = 0; i < lags; ++i) {
        const double p = static_cast<double>(hits[i]) / static_cast<double>(paths.size());
        profile.probability.push_back(p);
        profile.std_error.push_back(binomial_std_error(p, paths.size()));
    }
    return profile;
}

std::size_t exceedance_count(const TailPath& path, double level) {
    std::size_t count = 0;
    for (int j = -path.window(); j <= path.window(); ++j)
        if (path.norm(j) > level) ++count;
    return count;
}

}  // namespace exlab
