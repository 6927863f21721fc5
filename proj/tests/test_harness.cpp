#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "sqnkit/commands.hpp"
#include "sqnkit/csv.hpp"
#include "sqnkit/dataset_io.hpp"
#include "sqnkit/errors.hpp"

using namespace sqnkit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("sqnkit_" + name))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

harness::ExperimentConfig small_config(const fs::path& root)
{
    std::istringstream in(R"([problem]
n = 40
train_count = 400
test_count = 200
density = 0.1
data_seed = 5

[run]
seeds = 1, 2, 3
eval_every = 5

[algorithm sgd]
batch = 20
iterations = 30

[algorithm sdlbfgs]
memory = 5
batch = 20
iterations = 30
)");
    auto cfg = harness::parse_config(in);
    cfg.problem.data_dir = (root / "data").string();
    cfg.out = (root / "out").string();
    return cfg;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& root)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
    return files;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(SQNKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("generate writes datasets, planted vector and metadata")
{
    TempDir tmp("gen");
    const auto cfg = small_config(tmp.path);
    harness::cmd_generate(cfg);
    const fs::path data = cfg.problem.data_dir;
    const auto train = io::load_sparse_dataset(data / "train.svm");
    const auto test = io::load_sparse_dataset(data / "test.svm");
    CHECK(train.size() == 400);
    CHECK(test.size() == 200);
    for (const auto& s : train.samples()) CHECK(s.features.nnz() == 4);
    const auto planted = io::load_vector(data / "planted.txt");
    CHECK(problems::accuracy(planted, train) == 1.0);
    CHECK(problems::accuracy(planted, test) == 1.0);
    const auto meta = io::load_metadata(data / "dataset.meta");
    CHECK(meta.at("data_seed") == "5");
    CHECK(meta.at("train_count") == "400");

    const std::string first = slurp(data / "train.svm");
    harness::cmd_generate(cfg);
    CHECK(slurp(data / "train.svm") == first);
}

TEST_CASE("run fans out one trace per algorithm and seed")
{
    TempDir tmp("run");
    const auto cfg = small_config(tmp.path);
    harness::cmd_generate(cfg);
    std::ostringstream log;
    CHECK(harness::cmd_run(cfg, log) == harness::exit_ok);
    std::size_t traces = 0;
    for (const auto& e : fs::directory_iterator(cfg.out))
        traces += e.path().filename().string().rfind("trace_", 0) == 0 ? 1 : 0;
    CHECK(traces == 6);
    const auto summary = csv::read_file(fs::path(cfg.out) / "summary.csv");
    REQUIRE(summary.size() == 7);
    CHECK(summary[1][0] == "sgd");
    CHECK(summary[4][0] == "sdlbfgs");
    CHECK(summary[1][3] == "ok");
    CHECK(summary[1][5] == "600");  // m K
    CHECK(summary[4][5] == "1180"); // 2 m K - m

    // Trace rows are ordered by iteration with a constant column count.
    const auto trace = csv::read_file(fs::path(cfg.out) / harness::trace_filename("sdlbfgs", 2));
    for (std::size_t i = 2; i < trace.size(); ++i) {
        CHECK(trace[i].size() == trace[0].size());
        CHECK(std::stoull(trace[i][0]) > std::stoull(trace[i - 1][0]));
    }
}

TEST_CASE("pipeline output is byte reproducible across worker counts")
{
    TempDir a("det_a");
    TempDir b("det_b");
    for (const auto* dir : {&a, &b}) {
        auto cfg = small_config(dir->path);
        harness::cmd_generate(cfg);
        std::ostringstream log;
        if (dir == &b) setenv("SQNKIT_THREADS", "1", 1);
        harness::cmd_run(cfg, log);
        unsetenv("SQNKIT_THREADS");
        harness::cmd_compare(cfg);
    }
    CHECK(snapshot(a.path) == snapshot(b.path));
}

TEST_CASE("compare keeps every trace row in order")
{
    TempDir tmp("cmp");
    const auto cfg = small_config(tmp.path);
    harness::cmd_generate(cfg);
    std::ostringstream log;
    harness::cmd_run(cfg, log);
    harness::cmd_compare(cfg);
    const auto rows = csv::read_file(fs::path(cfg.out) / "compare.csv");
    std::size_t expected = 1;
    for (const auto& a : cfg.algorithms)
        for (auto seed : cfg.seeds)
            expected += csv::read_file(fs::path(cfg.out) / harness::trace_filename(a.name, seed)).size() - 1;
    CHECK(rows.size() == expected);
    std::ostringstream hdr;
    for (std::size_t i = 0; i < rows[0].size(); ++i) hdr << (i ? "," : "") << rows[0][i];
    CHECK(hdr.str() == harness::kCompareHeader);
    for (std::size_t i = 2; i < rows.size(); ++i) {
        if (rows[i][0] == rows[i - 1][0] && rows[i][1] == rows[i - 1][1]) {
            CHECK(std::stoull(rows[i][2]) > std::stoull(rows[i - 1][2]));
            CHECK(std::stoull(rows[i][3]) >= std::stoull(rows[i - 1][3]));
        }
    }

    fs::remove(fs::path(cfg.out) / harness::trace_filename("sgd", 3));
    CHECK_THROWS_AS(harness::cmd_compare(cfg), IoError);
}

TEST_CASE("run without datasets is a data error")
{
    TempDir tmp("nodata");
    const auto cfg = small_config(tmp.path);
    std::ostringstream log;
    CHECK_THROWS_AS(harness::cmd_run(cfg, log), IoError);
}

TEST_CASE("all runs diverging gives exit code 4")
{
    TempDir tmp("diverge");
    auto cfg = small_config(tmp.path);
    cfg.algorithms.resize(1);
    cfg.algorithms[0].solver.schedule = StepSchedule{ScheduleKind::constant, 1e6};
    cfg.algorithms[0].solver.divergence_threshold = 10.0;
    cfg.problem.lambda = 1.0;
    harness::cmd_generate(cfg);
    std::ostringstream log;
    CHECK(harness::cmd_run(cfg, log) == harness::exit_all_diverged);
    const auto summary = csv::read_file(fs::path(cfg.out) / "summary.csv");
    CHECK(summary[1][3] == "diverged");
}

TEST_CASE("overrides replace file values")
{
    TempDir tmp("ovr");
    const auto cfg = small_config(tmp.path);
    harness::Overrides ov;
    ov.seeds = {9};
    ov.out = "elsewhere";
    ov.eval_every = 2;
    ov.algorithms = {"sdlbfgs", "svrg"};
    const auto got = harness::apply_overrides(cfg, ov);
    CHECK(got.seeds == std::vector<std::uint64_t>{9});
    CHECK(got.out == "elsewhere");
    CHECK(got.eval_every == 2);
    REQUIRE(got.algorithms.size() == 2);
    CHECK(got.algorithms[0].name == "sdlbfgs");
    CHECK(got.algorithms[1].type == "svrg");
    ov.algorithms = {"newton"};
    CHECK_THROWS_AS(harness::apply_overrides(cfg, ov), ConfigError);
}

TEST_CASE("command line exit codes")
{
    TempDir tmp("cli");
    const auto cfg = small_config(tmp.path);
    const fs::path cfg_path = tmp.path / "exp.cfg";
    {
        std::ofstream out(cfg_path);
        out << harness::serialize_config(cfg);
    }
    const std::string c = "--config " + cfg_path.string();
    CHECK(run_cli("run " + c) == 3);
    CHECK(run_cli("generate " + c) == 0);
    CHECK(run_cli("run " + c + " --seed 4 --algo sgd") == 0);
    CHECK(fs::exists(fs::path(cfg.out) / "trace_sgd_seed4.csv"));
    CHECK_FALSE(fs::exists(fs::path(cfg.out) / "trace_sgd_seed1.csv"));
    CHECK(run_cli("compare " + c + " --seed 4 --algo sgd") == 0);
    CHECK(run_cli("run " + c + " --algo newton") == 2);
    CHECK(run_cli("run --config " + (tmp.path / "missing.cfg").string()) == 2);
    CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("damped and negative-curvature step counts fall as the batch grows")
{
    TempDir tmp("grid");
    std::istringstream in(R"([problem]
n = 500
train_count = 10000
test_count = 1000

[run]
seeds = 1, 2, 3, 4, 5, 6, 7, 8, 9, 10
eval_every = 1000

[algorithm m50]
type = sdlbfgs
memory = 20
batch = 50

[algorithm m100]
type = sdlbfgs
memory = 20
batch = 100

[algorithm m500]
type = sdlbfgs
memory = 20
batch = 500
)");
    auto cfg = harness::parse_config(in);
    cfg.problem.data_dir = (tmp.path / "data").string();
    cfg.out = (tmp.path / "out").string();
    harness::cmd_generate(cfg);
    std::ostringstream log;
    REQUIRE(harness::cmd_run(cfg, log) == harness::exit_ok);
    const auto rows = csv::read_file(fs::path(cfg.out) / "summary.csv");
    const auto col = [&](const char* name) {
        return static_cast<std::size_t>(std::find(rows[0].begin(), rows[0].end(), name) - rows[0].begin());
    };
    const std::size_t c_damped = col("damped_steps");
    const std::size_t c_neg = col("negative_curvature_steps");
    auto median_of = [&](const std::string& algo, std::size_t c) {
        std::vector<double> v;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i][0] == algo) v.push_back(std::stod(rows[i][c]));
        std::sort(v.begin(), v.end());
        return 0.5 * (v[4] + v[5]);
    };
    for (std::size_t c : {c_damped, c_neg}) {
        CHECK(median_of("m50", c) > median_of("m100", c));
        CHECK(median_of("m100", c) > median_of("m500", c));
    }
}
