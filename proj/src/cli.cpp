#include "exlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "exlab/config.hpp"
#include "exlab/diagnostics.hpp"
#include "exlab/error.hpp"
#include "exlab/io.hpp"
#include "exlab/laplace.hpp"
#include "exlab/limit.hpp"
#include "exlab/parallel.hpp"
#include "exlab/pointproc.hpp"
#include "exlab/risk.hpp"
#include "exlab/stats.hpp"
#include "exlab/tailproc.hpp"

namespace exlab {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"simulate", "pattern",         "tail",          "cluster",
                                                "theta",    "limit-sample",    "laplace-compare", "lemma1-check",
                                                "diag-M",   "diag-AC"};
    return names;
}

namespace {

struct RunContext {
    ExperimentConfig config;
    std::string hash;
    fs::path dir;
    std::vector<std::string> outputs;
    json summary;

    std::ofstream open(const std::string& name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
        outputs.push_back(name);
        return f;
    }

    void write_json(const std::string& name, json j) {
        j["config_hash"] = hash;
        auto f = open(name);
        f << dump_json(j);
    }

    int window() const { return config.window > 0 ? config.window : certified_window(config.model); }

    RiskFunctional risk() const { return RiskFunctional::from_name(config.risk, config.model.site_count()); }

    std::vector<TestFunction> test_functions() const {
        std::vector<TestFunction> out;
        for (const auto& name : config.test_functions) out.push_back(TestFunction::from_name(name));
        return out;
    }

    LaplaceSetup laplace_setup() const { return {config.model, risk(), config.u, config.model.seed}; }

    double a_n(std::size_t n) const {
        return compute_a_n(config.model, n, scaling_method_from_string(config.scaling)).value;
    }
};

void certify_u(const RunContext& ctx, const RiskFunctional& risk) {
    CounterRng rng(ctx.config.model.seed, Stream::RiskProbe, 0);
    try {
        certify_risk_bound(risk, ctx.config.model.site_count(), ctx.config.u, 1000, rng);
    } catch (const RiskBoundViolation& e) {
        throw ValidationError(std::string("u: ") + e.what());
    }
}

void cmd_simulate(RunContext& ctx) {
    const auto series = simulate_series(ctx.config.model, ctx.config.n, 0);
    auto f = ctx.open("series.csv");
    write_series_csv(f, series, ctx.hash);
    double max_norm = 0.0;
    for (std::size_t t = 0; t < series.length; ++t) max_norm = std::max(max_norm, series.norm(t));
    ctx.summary = {{"n", series.length}, {"sites", series.sites}, {"burn_in_discarded", series.burn_in_discarded},
                   {"max_norm", max_norm}};
}

void cmd_pattern(RunContext& ctx) {
    const RiskFunctional risk = ctx.risk();
    certify_u(ctx, risk);
    const MarkFunctional mark = MarkFunctional::from_name(ctx.config.mark);
    const auto series = simulate_series(ctx.config.model, ctx.config.n, 0);
    const ScalingValue scaling =
        compute_a_n(ctx.config.model, ctx.config.n, scaling_method_from_string(ctx.config.scaling));
    const PointPattern pattern = build_exceedance_pattern(series, risk, ctx.config.u, scaling.value, &mark);
    {
        auto f = ctx.open("pattern.csv");
        write_pattern_csv(f, pattern, ctx.hash);
    }
    ctx.write_json("pattern.json", pattern_to_json(pattern));
    ctx.summary = {{"points", pattern.size()}, {"a_n", scaling.value}, {"n", ctx.config.n},
                   {"a_n_degenerate", scaling.degenerate}};
    if (scaling.warning) ctx.summary["warning"] = *scaling.warning;
}

void cmd_tail(RunContext& ctx) {
    const int m = ctx.window();
    std::vector<TailPath> paths;
    std::string source;
    if (has_closed_form_tail(ctx.config.model)) {
        source = "analytic";
        const std::size_t batches = (ctx.config.reps + kMonteCarloBatch - 1) / kMonteCarloBatch;
        auto parts = parallel_map(batches, [&](std::size_t b) {
            CounterRng rng(ctx.config.model.seed, Stream::TailPath, b);
            const std::size_t count = std::min(kMonteCarloBatch, ctx.config.reps - b * kMonteCarloBatch);
            std::vector<TailPath> out;
            for (std::size_t i = 0; i < count; ++i) out.push_back(sample_tail_path(ctx.config.model, m, rng));
            return out;
        });
        for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(paths));
    } else {
        source = "empirical";
        const double x = norm_quantile(ctx.config.model, 0.995);
        paths = empirical_tail_path(ctx.config.model, ctx.config.n, ctx.config.series_reps, x, m).paths;
    }
    {
        auto f = ctx.open("tail_paths.csv");
        write_tail_paths_csv(f, paths, ctx.config.model.sites, ctx.hash);
    }
    const LagProfile profile = lag_exceedance_profile(paths);
    json lags = json::array();
    for (int j = -m; j <= m; ++j) lags.push_back({{"lag", j}, {"p_exceed", profile.at(j)}, {"se", profile.se(j)}});
    ctx.write_json("tail_profile.json", {{"source", source}, {"paths", paths.size()}, {"window", m}, {"lags", lags}});
    ctx.summary = {{"source", source}, {"paths", paths.size()}, {"window", m}};
}

void cmd_cluster(RunContext& ctx) {
    const int m = ctx.window();
    const std::size_t batches = (ctx.config.reps + kMonteCarloBatch - 1) / kMonteCarloBatch;
    auto parts = parallel_map(batches, [&](std::size_t b) {
        CounterRng rng(ctx.config.model.seed, Stream::Cluster, b);
        const std::size_t count = std::min(kMonteCarloBatch, ctx.config.reps - b * kMonteCarloBatch);
        std::vector<ClusterSample> out;
        for (std::size_t i = 0; i < count; ++i) out.push_back(sample_cluster(ctx.config.model, m, rng));
        return out;
    });
    std::size_t attempts = 0;
    std::size_t accepted = 0;
    MomentAccumulator size;
    auto f = ctx.open("clusters.csv");
    CsvWriter w(f, ctx.hash);
    std::vector<std::string> header{"cluster", "v", "lag"};
    for (const auto& s : ctx.config.model.sites) header.push_back("z_" + s);
    w.row(header);
    for (const auto& part : parts) {
        for (const auto& c : part) {
            attempts += c.attempts;
            size.add(static_cast<double>(exceedance_count(c.z)));
            for (int j = -m; j <= m; ++j) {
                if (c.z.norm(j) == 0.0) continue;
                std::vector<std::string> row{std::to_string(accepted), format_double(c.v), std::to_string(j)};
                for (double v : c.z.at(j)) row.push_back(format_double(v));
                w.row(row);
            }
            ++accepted;
        }
    }
    const double rate = static_cast<double>(accepted) / static_cast<double>(attempts);
    json j = {{"acceptance_rate", rate},
              {"acceptance_se", binomial_std_error(rate, attempts)},
              {"attempts", attempts},
              {"accepted", accepted},
              {"theta_analytic", analytic_extremal_index(ctx.config.model)},
              {"mean_cluster_size", size.mean()},
              {"mean_cluster_size_se", size.std_error()},
              {"window", m}};
    ctx.write_json("cluster.json", j);
    ctx.summary = j;
}

void cmd_theta(RunContext& ctx) {
    const int m = ctx.window();
    const double analytic = analytic_extremal_index(ctx.config.model);
    const auto mc = extremal_index_mc(ctx.config.model, m, ctx.config.reps, ctx.config.model.seed);
    const std::size_t r_n = block_length(ctx.config.n, ctx.config.r_exponent);
    const auto blocks = extremal_index_blocks(ctx.config.model, ctx.config.n, ctx.config.series_reps, r_n,
                                              ctx.a_n(ctx.config.n));
    auto f = ctx.open("theta.csv");
    CsvWriter w(f, ctx.hash);
    w.row({"estimator", "value", "se", "reps"});
    w.row({"analytic", format_double(analytic), "0", "0"});
    w.row({"tail-mc", format_double(mc.theta), format_double(mc.std_error), std::to_string(mc.reps)});
    w.row({"blocks", format_double(blocks.theta), format_double(blocks.std_error), std::to_string(blocks.blocks)});
    json j = {{"theta_analytic", analytic}, {"theta_mc", mc.theta},           {"se", mc.std_error},
              {"reps", mc.reps},            {"window", m},                    {"theta_blocks", blocks.theta},
              {"theta_blocks_se", blocks.std_error}, {"r_n", r_n},            {"n", ctx.config.n},
              {"block_exceedances", blocks.exceedances}, {"blocks_exceeding", blocks.blocks_exceeding}};
    ctx.write_json("theta.json", j);
    ctx.summary = j;
}

void cmd_limit_sample(RunContext& ctx) {
    const int m = ctx.window();
    const RiskFunctional risk = ctx.risk();
    certify_u(ctx, risk);
    const MarkFunctional mark = MarkFunctional::from_name(ctx.config.mark);
    const std::size_t batches = (ctx.config.reps + kMonteCarloBatch - 1) / kMonteCarloBatch;
    auto parts = parallel_map(batches, [&](std::size_t b) {
        CounterRng rng(ctx.config.model.seed, Stream::LimitProcess, b);
        const std::size_t count = std::min(kMonteCarloBatch, ctx.config.reps - b * kMonteCarloBatch);
        std::vector<SuperpositionSample> out;
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(sample_limit_process(ctx.config.model, risk, ctx.config.u, &mark, m, rng));
        return out;
    });
    auto f = ctx.open("limit_pattern.csv");
    CsvWriter w(f, ctx.hash);
    std::vector<std::string> header{"sample", "cluster", "t", "site", "lag"};
    for (const auto& s : ctx.config.model.sites) header.push_back("x_" + s);
    header.push_back("mark");
    w.row(header);
    std::vector<std::uint64_t> counts;
    std::vector<double> times;
    std::size_t points = 0;
    std::size_t sample_id = 0;
    for (const auto& part : parts) {
        for (const auto& s : part) {
            counts.push_back(s.t_count);
            for (std::size_t c = 0; c < s.clusters.size(); ++c) {
                times.push_back(s.clusters[c].v);
                for (const auto& p : s.clusters[c].points) {
                    std::vector<std::string> row{std::to_string(sample_id), std::to_string(c),
                                                 format_double(s.clusters[c].v), ctx.config.model.sites[p.site],
                                                 std::to_string(p.lag)};
                    for (double v : p.x) row.push_back(format_double(v));
                    row.push_back(p.mark ? format_double(*p.mark) : "");
                    w.row(row);
                    ++points;
                }
            }
            ++sample_id;
        }
    }
    const double theta = analytic_extremal_index(ctx.config.model);
    const auto chi = chi_square_poisson(counts, theta);
    json j = {{"samples", counts.size()}, {"points", points}, {"theta", theta}, {"window", m},
              {"poisson_chi2", chi.statistic}, {"poisson_dof", chi.dof}, {"poisson_p", chi.p_value}};
    if (!times.empty()) {
        const auto ks = ks_one_sample(times, [](double x) { return std::clamp(x, 0.0, 1.0); });
        j["uniform_ks"] = ks.statistic;
        j["uniform_p"] = ks.p_value;
    }
    ctx.write_json("limit_summary.json", j);
    ctx.summary = j;
}

void cmd_laplace_compare(RunContext& ctx) {
    const int m = ctx.window();
    const auto setup = ctx.laplace_setup();
    const auto gs = ctx.test_functions();
    std::vector<LaplaceEstimate> rows;
    auto append = [&](std::vector<LaplaceEstimate> v) { rows.insert(rows.end(), v.begin(), v.end()); };
    append(empirical_laplace(setup, gs, ctx.config.n, ctx.config.series_reps, ctx.a_n(ctx.config.n)));
    if (has_closed_form_tail(ctx.config.model)) {
        append(limit_laplace_tail(setup, gs, m, ctx.config.reps));
        append(limit_laplace_spectral(setup, gs, m, ctx.config.reps));
        append(superposition_laplace(setup, gs, m, ctx.config.reps));
        append(superposition_pgf_laplace(setup, gs, m, ctx.config.reps));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.test_function < b.test_function; });
    {
        auto f = ctx.open("laplace.csv");
        write_laplace_csv(f, rows, ctx.hash);
    }
    json records = json::array();
    for (const auto& r : rows) {
        json j = laplace_to_json(r);
        j["config_hash"] = ctx.hash;
        records.push_back(j);
    }
    ctx.write_json("laplace.json", {{"estimates", records}});
    ctx.summary = {{"estimates", records.size()}};
}

void cmd_lemma1(RunContext& ctx) {
    const int m = ctx.window();
    const auto setup = ctx.laplace_setup();
    const auto g = ctx.test_functions().front();
    std::vector<Lemma1Point> points;
    for (double v : ctx.config.v_grid)
        for (double t : ctx.config.t_grid) points.push_back({v, t});
    const std::size_t r_n = block_length(ctx.config.n, ctx.config.r_exponent);
    const auto results =
        block_conditional_laplace(setup, g, points, ctx.config.n, r_n, ctx.config.series_reps, ctx.config.reps, m);
    {
        auto f = ctx.open("lemma1.csv");
        write_lemma1_csv(f, results, ctx.hash);
    }
    json rows = json::array();
    for (const auto& r : results) rows.push_back(lemma1_to_json(r));
    ctx.write_json("lemma1.json", {{"test_function", g.name()}, {"results", rows}});
    ctx.summary = {{"points", rows.size()}, {"r_n", r_n}};
}

void cmd_diag_m(RunContext& ctx) {
    ConditionMOptions opt;
    opt.n_grid = ctx.config.n_grid;
    opt.r_exponent = ctx.config.r_exponent;
    opt.reps = ctx.config.series_reps;
    const auto report = check_condition_M(ctx.laplace_setup(), ctx.test_functions().front(), opt);
    {
        auto f = ctx.open("diag_M.csv");
        write_report_csv(f, report, ctx.hash);
    }
    ctx.write_json("diag_M.json", report_to_json(report));
    ctx.summary = {{"verdict", report.verdict}, {"cells", report.cells.size()}};
}

void cmd_diag_ac(RunContext& ctx) {
    ConditionACOptions opt;
    opt.n_grid = ctx.config.n_grid;
    opt.m_grid = ctx.config.m_grid;
    opt.r_exponent = ctx.config.r_exponent;
    opt.anchors = ctx.config.anchors;
    const auto report = check_condition_AC(ctx.config.model, ctx.config.u, opt, ctx.config.model.seed);
    {
        auto f = ctx.open("diag_AC.csv");
        write_report_csv(f, report, ctx.hash);
    }
    ctx.write_json("diag_AC.json", report_to_json(report));
    ctx.summary = {{"verdict", report.verdict}, {"cells", report.cells.size()}};
}

const std::map<std::string, std::function<void(RunContext&)>>& dispatch_table() {
    static const std::map<std::string, std::function<void(RunContext&)>> table{
        {"simulate", cmd_simulate},
        {"pattern", cmd_pattern},
        {"tail", cmd_tail},
        {"cluster", cmd_cluster},
        {"theta", cmd_theta},
        {"limit-sample", cmd_limit_sample},
        {"laplace-compare", cmd_laplace_compare},
        {"lemma1-check", cmd_lemma1},
        {"diag-M", cmd_diag_m},
        {"diag-AC", cmd_diag_ac},
    };
    return table;
}

}  // namespace

int run_subcommand(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exceedance point processes of regularly varying series: simulation and checks", "exlab"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    std::string config_path;
    std::vector<std::string> sets;
    std::string model;
    std::string seed;
    std::string reps;
    std::string output;
    std::string workers;
    std::string n;
    app.add_option("--config", config_path, "TOML-style key = value config file");
    app.add_option("--set", sets, "Override one config key (key=value); repeatable");
    app.add_option("--model", model, "Model shorthand, e.g. a=0.5,alpha=1");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--reps", reps, "Monte Carlo replications");
    app.add_option("--n", n, "Series length");
    app.add_option("--output", output, "Output directory");
    app.add_option("--workers", workers, "Worker threads (0 = all cores)");
    const std::map<std::string, std::string> about{
        {"simulate", "Simulate the series and write it as CSV"},
        {"pattern", "Build the exceedance point pattern"},
        {"tail", "Sample tail-process paths"},
        {"cluster", "Sample cluster paths by rejection"},
        {"theta", "Estimate the extremal index"},
        {"limit-sample", "Sample the limiting cluster process"},
        {"laplace-compare", "Compare finite-n and limiting Laplace functionals"},
        {"lemma1-check", "Check the block-conditional Laplace identity"},
        {"diag-M", "Diagnose the mixing condition"},
        {"diag-AC", "Diagnose the anti-clustering condition"}};
    for (const auto& name : subcommand_names()) app.add_subcommand(name, about.at(name));

    // Name the offending token instead of CLI11's generic "subcommand required".
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg.rfind("--", 0) == 0) {
            if (arg.find('=') == std::string::npos && arg != "--help" && arg != "--version") ++i;
            continue;
        }
        if (arg.rfind('-', 0) == 0) continue;
        const auto& names = subcommand_names();
        if (std::find(names.begin(), names.end(), arg) == names.end()) {
            err << "exlab: unknown subcommand '" << arg << "'\n\n" << app.help();
            return 2;
        }
        break;
    }

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const auto started = std::chrono::steady_clock::now();
    try {
        RunContext ctx;
        if (!config_path.empty())
            for (const auto& [k, v] : read_config_file(config_path)) apply_config_value(ctx.config, k, v);
        if (!model.empty()) apply_model_shorthand(ctx.config, model);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ValidationError("--set: expected key=value, got '" + kv + "'");
            apply_config_value(ctx.config, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!seed.empty()) apply_config_value(ctx.config, "seed", seed);
        if (!reps.empty()) apply_config_value(ctx.config, "reps", reps);
        if (!n.empty()) apply_config_value(ctx.config, "n", n);
        if (!output.empty()) apply_config_value(ctx.config, "output", output);
        if (!workers.empty()) apply_config_value(ctx.config, "workers", workers);
        validate_config(ctx.config);

        set_worker_count(ctx.config.workers);
        ctx.hash = config_hash(ctx.config);
        ctx.dir = ctx.config.output;
        fs::create_directories(ctx.dir);

        dispatch_table().at(command)(ctx);

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        json manifest = {{"command", command},
                         {"config", canonical_config(ctx.config)},
                         {"config_hash", ctx.hash},
                         {"seed", ctx.config.model.seed},
                         {"version", kVersion},
                         {"wall_time_seconds", wall},
                         {"outputs", ctx.outputs}};
        {
            std::ofstream f(ctx.dir / "manifest.json", std::ios::binary);
            if (!f) throw std::runtime_error("cannot write manifest.json");
            f << dump_json(manifest);
        }
        json summary = ctx.summary;
        summary["command"] = command;
        summary["config_hash"] = ctx.hash;
        out << dump_json(summary);
        return 0;
    } catch (const ValidationError& e) {
        err << "exlab " << command << ": invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "exlab " << command << ": error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace exlab
