#include "sqnkit/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "sqnkit/csv.hpp"
#include "sqnkit/dataset_io.hpp"
#include "sqnkit/errors.hpp"

namespace sqnkit::harness {

namespace fs = std::filesystem;

ExperimentConfig apply_overrides(ExperimentConfig config, const Overrides& overrides)
{
    if (!overrides.seeds.empty()) config.seeds = overrides.seeds;
    if (overrides.out) config.out = *overrides.out;
    if (overrides.eval_every) config.eval_every = *overrides.eval_every;
    if (!overrides.algorithms.empty()) {
        std::vector<AlgorithmSpec> selected;
        for (const auto& name : overrides.algorithms) {
            auto it = std::find_if(config.algorithms.begin(), config.algorithms.end(),
                                   [&](const AlgorithmSpec& a) { return a.name == name; });
            if (it != config.algorithms.end()) {
                selected.push_back(*it);
            } else if (is_known_algorithm_type(name)) {
                selected.push_back(default_algorithm(name, name));
            } else {
                throw ConfigError("unknown algorithm '" + name + "'");
            }
        }
        config.algorithms = std::move(selected);
    }
    return config;
}

fs::path train_file(const ExperimentConfig& config)
{
    if (config.problem.source == "file" && !config.problem.test_path.empty())
        return config.problem.train_path;
    return fs::path(config.problem.data_dir) / "train.svm";
}

fs::path test_file(const ExperimentConfig& config)
{
    if (config.problem.source == "file" && !config.problem.test_path.empty())
        return config.problem.test_path;
    return fs::path(config.problem.data_dir) / "test.svm";
}

namespace {

void make_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

} // namespace

void cmd_generate(const ExperimentConfig& config)
{
    const ProblemSpec& p = config.problem;
    const fs::path dir = p.data_dir;
    make_dir(dir);
    std::map<std::string, std::string> meta;
    meta["source"] = p.source;
    meta["data_seed"] = std::to_string(p.data_seed);

    if (p.source == "synthetic") {
        rng::Stream planted_stream(p.data_seed, "planted");
        Vector planted = problems::draw_planted(p.n, planted_stream);
        rng::Stream train_stream(p.data_seed, "train");
        rng::Stream test_stream(p.data_seed, "test");
        LabeledDataset train = problems::draw_samples(planted, p.train_count, p.density, train_stream);
        LabeledDataset test = problems::draw_samples(planted, p.test_count, p.density, test_stream);
        io::save_sparse_dataset(dir / "train.svm", train);
        io::save_sparse_dataset(dir / "test.svm", test);
        io::save_vector(dir / "planted.txt", planted);
        meta["n"] = std::to_string(p.n);
        meta["density"] = io::format_double(p.density);
        meta["train_count"] = std::to_string(train.size());
        meta["test_count"] = std::to_string(test.size());
        meta["planted"] = "planted.txt";
    } else {
        if (p.train_path.empty()) throw ConfigError("file source needs train_path");
        LabeledDataset all = io::load_sparse_dataset(p.train_path);
        rng::Stream stream(p.data_seed, "split");
        auto [train, test] = problems::split(all, p.split_fraction, stream);
        io::save_sparse_dataset(dir / "train.svm", train);
        io::save_sparse_dataset(dir / "test.svm", test);
        meta["input"] = p.train_path;
        meta["n"] = std::to_string(all.dim());
        meta["split_fraction"] = io::format_double(p.split_fraction);
        meta["train_count"] = std::to_string(train.size());
        meta["test_count"] = std::to_string(test.size());
    }
    io::save_metadata(dir / "dataset.meta", meta);
}

Datasets load_datasets(const ExperimentConfig& config)
{
    const ProblemSpec& p = config.problem;
    if (p.source == "file" && p.test_path.empty() && !fs::exists(train_file(config))) {
        // No generated split on disk: split the input in memory.
        LabeledDataset all = io::load_sparse_dataset(p.train_path);
        rng::Stream stream(p.data_seed, "split");
        auto [train, test] = problems::split(all, p.split_fraction, stream);
        return {std::make_shared<const LabeledDataset>(std::move(train)),
                std::make_shared<const LabeledDataset>(std::move(test))};
    }
    const fs::path tr = train_file(config);
    const fs::path te = test_file(config);
    for (const auto& f : {tr, te})
        if (!fs::exists(f))
            throw IoError("missing dataset " + f.string() + " (run 'generate' first)");
    auto train = std::make_shared<const LabeledDataset>(io::load_sparse_dataset(tr));
    auto test = std::make_shared<const LabeledDataset>(io::load_sparse_dataset(te));
    if (train->dim() != test->dim()) {
        // Sparse files only record the largest index seen; pad to a common dim.
        const std::size_t d = std::max(train->dim(), test->dim());
        auto widen = [d](const LabeledDataset& ds) {
            std::vector<SparseSample> out;
            out.reserve(ds.size());
            for (const auto& s : ds.samples())
            {
                const auto idx = s.features.indices();
                const auto val = s.features.values();
                out.push_back({SparseVector({idx.begin(), idx.end()}, {val.begin(), val.end()}, d),
                               s.label});
            }
            return std::make_shared<const LabeledDataset>(std::move(out), d);
        };
        return {widen(*train), widen(*test)};
    }
    return {train, test};
}

Vector warm_start(const SigmoidSvmProblem& problem, std::span<const double> x0,
                  std::uint64_t seed, std::uint64_t iterations, kernels::Policy policy)
{
    SolverConfig sgd;
    sgd.identity_operator = true;
    sgd.memory = 0;
    sgd.batch_size = std::min<std::size_t>(20, problem.size());
    sgd.max_iters = iterations;
    sgd.eval_every = iterations;
    sgd.seed = seed;
    sgd.kernel_policy = policy;
    sgd.schedule = StepSchedule{ScheduleKind::diminishing, 1.0};
    RunHooks hooks;
    hooks.evaluate = [](std::span<const double>) { return EvalMetrics{}; };
    return sqn_run(problem, sgd, x0, hooks).final_x;
}

std::string trace_filename(const std::string& algorithm, std::uint64_t seed)
{
    return "trace_" + algorithm + "_seed" + std::to_string(seed) + ".csv";
}

RunOutcome execute_run(const AlgorithmSpec& algorithm, std::uint64_t seed,
                       const ExperimentConfig& config, const Datasets& data,
                       kernels::Policy policy, std::ostream* memory_dump)
{
    RunOutcome out;
    out.algorithm = algorithm.name;
    out.type = algorithm.type;
    out.seed = seed;

    SolverConfig solver = algorithm.solver;
    solver.seed = seed;
    solver.eval_every = config.eval_every;
    solver.kernel_policy = policy;
    const bool vr = algorithm.type == "svrg" || algorithm.type == "sdlbfgs-vr";
    const bool pmf_output = algorithm.random_output && !vr;
    if (pmf_output) solver.keep_iterates = true;

    SigmoidSvmProblem problem(data.train, config.problem.lambda, policy);
    rng::Stream init_stream(seed, "init");
    Vector x1 = problems::initial_point(problem.dim(), init_stream, config.problem.init_scale);
    if (config.warm_start > 0) x1 = warm_start(problem, x1, seed, config.warm_start, policy);

    RunHooks hooks;
    hooks.evaluate = make_evaluator(*data.test, config.problem.lambda, policy);
    hooks.memory_dump = memory_dump;

    out.trace = vr ? sdlbfgs_vr_run(problem, solver, x1, hooks)
                   : sqn_run(problem, solver, x1, hooks);
    out.status = out.trace.diverged ? "diverged" : "ok";
    out.message = out.trace.message;
    out.final_metrics = hooks.evaluate(out.trace.final_x);

    if (vr && out.trace.random_output) {
        out.random_output_index = out.trace.random_output_index;
        out.random_output_sng = problems::sng(*out.trace.random_output, *data.test,
                                              config.problem.lambda, policy);
    } else if (pmf_output && !out.trace.diverged && !out.trace.iterates.empty()) {
        const auto& s = solver.schedule;
        std::vector<double> pmf = random_output_pmf(out.trace.alphas, s.kappa_low, s.kappa_up,
                                                    s.lipschitz);
        rng::Stream stream(seed, "output");
        const std::size_t r = random_output_index(pmf, stream);
        out.random_output_index = r + 1;
        out.random_output_sng = problems::sng(out.trace.iterates[r], *data.test,
                                              config.problem.lambda, policy);
    }
    if (!solver.keep_iterates) out.trace.iterates.clear();
    return out;
}

std::size_t worker_count(std::size_t runs)
{
    std::size_t cap = runs;
    if (const char* env = std::getenv("SQNKIT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) cap = std::min(cap, static_cast<std::size_t>(v));
    }
    return std::max<std::size_t>(cap, 1);
}

namespace {

void write_summary(const fs::path& path, const std::vector<RunOutcome>& outcomes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << kSummaryHeader << '\n';
    csv::Writer w(out);
    for (const auto& r : outcomes) {
        w.field(r.algorithm).field(r.type).field(r.seed).field(r.status);
        w.field(r.trace.iterations).field(r.trace.counter.total());
        w.field(r.final_metrics.sng).field(r.final_metrics.objective)
            .field(r.final_metrics.accuracy);
        w.field(r.trace.damped_steps).field(r.trace.negative_curvature_steps);
        w.field(r.trace.skipped_pairs).field(r.trace.rejected_pairs);
        if (r.random_output_index) w.field(*r.random_output_index); else w.field("");
        if (r.random_output_sng) w.field(*r.random_output_sng); else w.field("");
        w.field(r.message);
        w.end_row();
    }
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace

int cmd_run(const ExperimentConfig& config, std::ostream& log)
{
    validate_config(config);
    const Datasets data = load_datasets(config);
    const fs::path out_dir = config.out;
    make_dir(out_dir);

    struct Job {
        const AlgorithmSpec* algorithm;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& a : config.algorithms)
        for (std::uint64_t s : config.seeds) jobs.push_back({&a, s});

    const std::size_t workers = worker_count(jobs.size());
    const kernels::Policy policy =
        workers > 1 ? kernels::Policy::serial : kernels::Policy::parallel;

    std::vector<RunOutcome> outcomes(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const Job& job = jobs[j];
            RunOutcome& r = outcomes[j];
            try {
                std::ofstream dump;
                if (config.dump_memory) {
                    const fs::path p = out_dir / ("memory_" + job.algorithm->name + "_seed" +
                                                  std::to_string(job.seed) + ".txt");
                    dump.open(p, std::ios::binary);
                    if (!dump) throw IoError("cannot write " + p.string());
                }
                r = execute_run(*job.algorithm, job.seed, config, data, policy,
                                config.dump_memory ? &dump : nullptr);
                csv::write_trace_file(out_dir / trace_filename(job.algorithm->name, job.seed),
                                      r.trace);
            } catch (const IoError&) {
                throw;
            } catch (const std::exception& e) {
                r.algorithm = job.algorithm->name;
                r.type = job.algorithm->type;
                r.seed = job.seed;
                r.status = "error";
                r.message = e.what();
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w]() {
                try {
                    work();
                } catch (...) {
                    errors[w] = std::current_exception();
                    next = jobs.size();
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    write_summary(out_dir / "summary.csv", outcomes);

    std::size_t ok = 0;
    for (const auto& r : outcomes) {
        log << r.algorithm << " seed " << r.seed << ": " << r.status << ", sng "
            << io::format_double(r.final_metrics.sng) << ", accuracy "
            << io::format_double(r.final_metrics.accuracy) << ", sfo "
            << r.trace.counter.total() << '\n';
        if (r.status == "ok") ++ok;
    }
    return ok == 0 ? exit_all_diverged : exit_ok;
}

void cmd_compare(const ExperimentConfig& config)
{
    validate_config(config);
    const fs::path out_dir = config.out;
    const fs::path path = out_dir / "compare.csv";
    std::ostringstream body;
    body << kCompareHeader << '\n';
    csv::Writer w(body);
    for (const auto& a : config.algorithms) {
        for (std::uint64_t seed : config.seeds) {
            const fs::path trace = out_dir / trace_filename(a.name, seed);
            if (!fs::exists(trace)) throw IoError("missing trace " + trace.string());
            auto rows = csv::read_file(trace);
            if (rows.empty()) throw IoError("empty trace " + trace.string());
            const csv::Row& header = rows.front();
            auto column = [&](const char* name) {
                auto it = std::find(header.begin(), header.end(), name);
                if (it == header.end())
                    throw IoError("trace " + trace.string() + " lacks column " + name);
                return static_cast<std::size_t>(it - header.begin());
            };
            const std::size_t c_it = column("iteration");
            const std::size_t c_sfo = column("sfo_total");
            const std::size_t c_sng = column("sng");
            const std::size_t c_acc = column("accuracy");
            const std::size_t c_obj = column("objective");
            for (std::size_t i = 1; i < rows.size(); ++i) {
                const csv::Row& row = rows[i];
                if (row.size() != header.size())
                    throw IoError("ragged row in " + trace.string());
                w.field(a.name).field(seed).field(row[c_it]).field(row[c_sfo])
                    .field(row[c_sng]).field(row[c_acc]).field(row[c_obj]);
                w.end_row();
            }
        }
    }
    make_dir(out_dir);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << body.str();
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace sqnkit::harness
