#include <gtest/gtest.h>
#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exlab/cli.hpp"

namespace exlab {
namespace {

namespace fs = std::filesystem;

const std::string kBinary = EXLAB_BINARY;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path(testing::TempDir()) / ("exlab_cli_" + name);
    fs::remove_all(p);
    return p;
}

int run(const std::string& args, std::string* err = nullptr) {
    const fs::path err_file = fs::path(testing::TempDir()) / "exlab_cli_stderr.txt";
    const int status = std::system((kBinary + " " + args + " > /dev/null 2> " + err_file.string()).c_str());
    if (err) {
        std::ifstream in(err_file);
        std::stringstream ss;
        ss << in.rdbuf();
        *err = ss.str();
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small settings that keep every subcommand well under a second.
const std::string kSmall =
    " --model a=0.5,alpha=1 --n 1000 --reps 500 --set series_reps=500 --set n_grid=1000,10000 --set anchors=200";

TEST(Cli, SubcommandNames) {
    EXPECT_EQ(subcommand_names().size(), 10u);
    EXPECT_EQ(subcommand_names().front(), "simulate");
}

TEST(Cli, EverySubcommandSucceedsAndTagsOutputs) {
    for (const auto& cmd : subcommand_names()) {
        const fs::path dir = scratch(cmd);
        std::string err;
        ASSERT_EQ(run(cmd + kSmall + " --output " + dir.string(), &err), 0) << cmd << ": " << err;
        const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
        const std::string hash = manifest.at("config_hash");
        EXPECT_EQ(manifest.at("command"), cmd);
        ASSERT_FALSE(manifest.at("outputs").empty()) << cmd;
        for (const std::string name : manifest.at("outputs")) {
            const std::string body = slurp(dir / name);
            ASSERT_FALSE(body.empty()) << cmd << "/" << name;
            if (name.ends_with(".json")) {
                EXPECT_EQ(nlohmann::json::parse(body).at("config_hash"), hash) << cmd << "/" << name;
            } else {
                EXPECT_EQ(body.rfind("# exceedance-lab schema v1\n", 0), 0u) << cmd << "/" << name;
                EXPECT_NE(body.find(hash), std::string::npos) << cmd << "/" << name;
            }
        }
    }
}

TEST(Cli, UsageErrorsExitTwo) {
    std::string err;
    EXPECT_EQ(run("frobnicate", &err), 2);
    EXPECT_NE(err.find("frobnicate"), std::string::npos);
    EXPECT_EQ(run("", &err), 2);
    EXPECT_EQ(run("simulate --config /nonexistent/x.conf", &err), 2);
    EXPECT_EQ(run("simulate --set u=-1 --output " + scratch("bad_u").string(), &err), 2);
    EXPECT_NE(err.find("u"), std::string::npos);
    EXPECT_EQ(run("simulate --model a=1.5 --output " + scratch("bad_a").string(), &err), 2);
    EXPECT_EQ(run("simulate --set colour=red --output " + scratch("bad_key").string(), &err), 2);
    EXPECT_NE(err.find("colour"), std::string::npos);
    // Coordinate scaled by 2 is not bounded by the norm at u = 1.
    EXPECT_EQ(run("pattern --set risk=table:2 --set u=1 --output " + scratch("bad_risk").string(), &err), 2);
}

TEST(Cli, ConfigFileIsApplied) {
    const fs::path dir = scratch("config");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "run.conf");
        f << "n = 250\n[model]\nkind = maxar\na = 0.3\nsites = 2\n";
    }
    ASSERT_EQ(run("simulate --config " + (dir / "run.conf").string() + " --output " + (dir / "out").string()), 0);
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    EXPECT_EQ(manifest.at("config").at("n"), "250");
    EXPECT_EQ(manifest.at("config").at("model.a"), "0.29999999999999999");
}

TEST(Cli, RuntimeErrorsExitThree) {
    const fs::path file = scratch("not_a_dir");
    std::ofstream(file) << "occupied\n";
    std::string err;
    EXPECT_EQ(run("simulate --n 10 --output " + file.string(), &err), 3);
    EXPECT_FALSE(err.empty());
}

TEST(Cli, OutputsAreIdenticalAcrossWorkerCounts) {
    for (const std::string cmd : {"simulate", "tail", "theta", "laplace-compare", "diag-AC"}) {
        const fs::path one = scratch(cmd + "_w1"), four = scratch(cmd + "_w4"), again = scratch(cmd + "_w1b");
        ASSERT_EQ(run(cmd + kSmall + " --seed 9 --workers 1 --output " + one.string()), 0);
        ASSERT_EQ(run(cmd + kSmall + " --seed 9 --workers 4 --output " + four.string()), 0);
        ASSERT_EQ(run(cmd + kSmall + " --seed 9 --workers 1 --output " + again.string()), 0);
        const auto manifest = nlohmann::json::parse(slurp(one / "manifest.json"));
        for (const std::string name : manifest.at("outputs")) {
            const std::string a = slurp(one / name);
            EXPECT_EQ(a, slurp(four / name)) << cmd << "/" << name;
            EXPECT_EQ(a, slurp(again / name)) << cmd << "/" << name;
        }
    }
}

TEST(Cli, SeedChangesOutput) {
    const fs::path a = scratch("seed_a"), b = scratch("seed_b");
    ASSERT_EQ(run("simulate --n 50 --seed 1 --output " + a.string()), 0);
    ASSERT_EQ(run("simulate --n 50 --seed 2 --output " + b.string()), 0);
    EXPECT_NE(slurp(a / "series.csv"), slurp(b / "series.csv"));
}

}  // namespace
}  // namespace exlab
