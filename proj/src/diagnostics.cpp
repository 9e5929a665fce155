#include "exlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "exlab/error.hpp"
#include "exlab/parallel.hpp"
#include "exlab/pointproc.hpp"
#include "exlab/stats.hpp"

namespace exlab {

std::string to_string(Condition c) { return c == Condition::MixingM ? "M" : "AC"; }

namespace {

std::uint64_t replication_key(std::uint64_t seed, Stream stream, std::uint64_t cell, std::uint64_t rep) {
    CounterRng key(seed, stream, cell);
    return detail::mix64(key() + rep);
}

void check_grid(const std::vector<std::size_t>& grid, const char* what) {
    if (grid.empty()) throw ValidationError(std::string(what) + ": grid must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) throw ValidationError(std::string(what) + ": grid must be increasing");
}

// exp(-sum_{j in [begin, end)} sum_s <f>_u(j/n, s, X_j / a_n)) over the next
// end - begin steps of `gen`; j is 1-based.
double block_value(SeriesGenerator& gen, const LaplaceSetup& setup, const TestFunction& f, std::size_t begin,
                   std::size_t end, std::size_t n, double a_n, double skip, std::vector<double>& x) {
    double total = 0.0;
    for (std::size_t j = begin; j < end; ++j) {
        const double norm = gen.next_norm();
        if (norm <= skip) continue;
        const auto row = gen.current();
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = row[k] / a_n;
        total += f.time_weight(static_cast<double>(j) / static_cast<double>(n)) *
                 thresholded_row_sum(f, setup.risk, setup.u, x);
    }
    return std::exp(-total);
}

}  // namespace

ConditionReport check_condition_M(const LaplaceSetup& setup, const TestFunction& f,
                                  const ConditionMOptions& options) {
    setup.spec.validate();
    check_grid(options.n_grid, "check_condition_M");
    if (options.reps < 500) throw ValidationError("check_condition_M: reps must be >= 500");
    if (!(setup.u > 0.0)) throw ValidationError("check_condition_M: u must be > 0");

    ConditionReport report;
    report.condition = Condition::MixingM;
    report.verdict_rule = "|c_n - d_n| <= " + std::to_string(options.tolerance_se) + " combined s.e. at every n";
    report.verdict = true;
    const std::size_t width = setup.spec.site_count();
    const double eps = f.value_profile().epsilon;

    for (std::size_t cell = 0; cell < options.n_grid.size(); ++cell) {
        const std::size_t n = options.n_grid[cell];
        const std::size_t r_n = block_length(n, options.r_exponent);
        const std::size_t k_n = n / r_n;
        const double a_n = compute_a_n(setup.spec, n, ScalingMethod::AnalyticFrechetTail).value;
        const double skip = a_n * (setup.risk.bounded_by_norm() ? std::max(setup.u, eps) : eps);

        auto full = parallel_map(options.reps, [&](std::size_t rep) {
            SeriesGenerator gen(setup.spec, Stream::ConditionMFull,
                                replication_key(setup.seed, Stream::ConditionMFull, cell, rep));
            std::vector<double> x(width);
            return block_value(gen, setup, f, 1, n + 1, n, a_n, skip, x);
        });
        MomentAccumulator c_acc;
        for (double v : full) c_acc.add(v);

        auto per_block = parallel_map(k_n, [&](std::size_t k) {
            MomentAccumulator acc;
            std::vector<double> x(width);
            for (std::size_t rep = 0; rep < options.reps; ++rep) {
                SeriesGenerator gen(setup.spec, Stream::ConditionMBlocks,
                                    replication_key(setup.seed, Stream::ConditionMBlocks, cell,
                                                    static_cast<std::uint64_t>(k) * options.reps + rep));
                acc.add(block_value(gen, setup, f, k * r_n + 1, (k + 1) * r_n + 1, n, a_n, skip, x));
            }
            return acc;
        });
        double log_d = 0.0;
        double var_log_d = 0.0;
        for (const auto& acc : per_block) {
            log_d += std::log(acc.mean());
            const double rel = acc.std_error() / acc.mean();
            var_log_d += rel * rel;
        }

        ConditionCell c;
        c.n = n;
        c.r_n = r_n;
        c.a_n = a_n;
        c.blocks = k_n;
        c.c_n = c_acc.mean();
        c.c_n_se = c_acc.std_error();
        c.d_n = std::exp(log_d);
        c.d_n_se = c.d_n * std::sqrt(var_log_d);
        c.estimate = c.c_n - c.d_n;
        c.std_error = combined_std_error(c.c_n_se, c.d_n_se);
        if (std::abs(c.estimate) > options.tolerance_se * c.std_error) report.verdict = false;
        report.cells.push_back(c);
    }
    return report;
}

namespace {

constexpr std::size_t kChunksPerRound = 8;

struct AnchorGroup {
    std::size_t anchors{0};
    // Largest |lag| in [1, r_n] of another exceedance, per anchor.
    std::vector<std::size_t> reach;
};

// Exceedance times of one chunk, grouped into anchor clusters.
std::vector<AnchorGroup> scan_chunk(const ModelSpec& spec, std::uint64_t key, std::size_t length,
                                    double level, std::size_t r_n) {
    SeriesGenerator gen(spec, Stream::ConditionAC, key);
    std::vector<std::size_t> times;
    for (std::size_t t = 0; t < length; ++t)
        if (gen.next_norm() > level) times.push_back(t);

    std::vector<AnchorGroup> groups;
    std::size_t last_anchor = 0;
    bool have_anchor = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const std::size_t t = times[i];
        if (t < r_n || t + r_n >= length) continue;
        std::size_t reach = 0;
        for (std::size_t k = i; k-- > 0 && t - times[k] <= r_n;) reach = std::max(reach, t - times[k]);
        for (std::size_t k = i + 1; k < times.size() && times[k] - t <= r_n; ++k)
            reach = std::max(reach, times[k] - t);
        if (!have_anchor || t - last_anchor > 2 * r_n) groups.emplace_back();
        groups.back().anchors += 1;
        groups.back().reach.push_back(reach);
        last_anchor = t;
        have_anchor = true;
    }
    return groups;
}

}  // namespace

ConditionReport check_condition_AC(const ModelSpec& spec, double u, const ConditionACOptions& options,
                                   std::uint64_t seed) {
    spec.validate();
    check_grid(options.n_grid, "check_condition_AC");
    check_grid(options.m_grid, "check_condition_AC m");
    if (!(u > 0.0)) throw ValidationError("check_condition_AC: u must be > 0");
    if (options.anchors == 0) throw ValidationError("check_condition_AC: anchors must be >= 1");
    if (options.m_grid.front() == 0) throw ValidationError("check_condition_AC: m must be >= 1");

    ConditionReport report;
    report.condition = Condition::AntiClusteringAC;
    report.verdict_rule = "at the largest n: non-increasing in m within " + std::to_string(options.tolerance_se) +
                          " s.e. and below " + std::to_string(options.tolerance) + " at the largest m";

    for (std::size_t cell = 0; cell < options.n_grid.size(); ++cell) {
        const std::size_t n = options.n_grid[cell];
        const std::size_t r_n = block_length(n, options.r_exponent);
        const double a_n = compute_a_n(spec, n, ScalingMethod::AnalyticFrechetTail).value;
        const double level = a_n * u;
        const std::size_t chunk_length = std::max<std::size_t>(4 * n, 8 * r_n);
        // Safety cap; a chunk of 4n steps yields about 4 u^{-alpha} anchors.
        const std::size_t max_chunks = 64 * options.anchors;

        std::vector<AnchorGroup> groups;
        std::size_t anchors = 0;
        for (std::size_t start = 0; anchors < options.anchors; start += kChunksPerRound) {
            if (start >= max_chunks)
                throw TooFewEventsError("check_condition_AC: too few exceedance anchors", anchors, options.anchors);
            auto round = parallel_map(kChunksPerRound, [&](std::size_t i) {
                return scan_chunk(spec, replication_key(seed, Stream::ConditionAC, cell, start + i), chunk_length,
                                  level, r_n);
            });
            for (auto& chunk : round)
                for (auto& g : chunk) {
                    anchors += g.anchors;
                    groups.push_back(std::move(g));
                }
        }

        for (std::size_t m : options.m_grid) {
            double hits = 0.0;
            std::vector<double> group_hits;
            group_hits.reserve(groups.size());
            for (const auto& g : groups) {
                double h = 0.0;
                if (m <= r_n)
                    for (std::size_t reach : g.reach) h += reach >= m ? 1.0 : 0.0;
                group_hits.push_back(h);
                hits += h;
            }
            const double total = static_cast<double>(anchors);
            const double p = hits / total;
            double ss = 0.0;
            for (std::size_t i = 0; i < groups.size(); ++i) {
                const double z = group_hits[i] - p * static_cast<double>(groups[i].anchors);
                ss += z * z;
            }
            const double gcount = static_cast<double>(groups.size());
            ConditionCell c;
            c.n = n;
            c.r_n = r_n;
            c.m = m;
            c.a_n = a_n;
            c.estimate = p;
            c.std_error = gcount > 1 ? std::sqrt(ss * gcount / (gcount - 1.0)) / total : 0.0;
            c.anchors = anchors;
            c.anchor_groups = groups.size();
            report.cells.push_back(c);
        }
    }

    // Verdict on the largest n.
    const std::size_t m_count = options.m_grid.size();
    const auto last = report.cells.end() - static_cast<std::ptrdiff_t>(m_count);
    bool ok = true;
    for (auto it = last; it + 1 != report.cells.end(); ++it) {
        const auto& a = *it;
        const auto& b = *(it + 1);
        if (b.estimate > a.estimate + options.tolerance_se * combined_std_error(a.std_error, b.std_error)) ok = false;
    }
    if (!(report.cells.back().estimate < options.tolerance)) ok = false;
    report.verdict = ok;
    return report;
}

}  // namespace exlab
