#include "sqnkit/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sqnkit/dataset_io.hpp"
#include "sqnkit/errors.hpp"

namespace sqnkit::harness {
namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Cursor {
    std::size_t line;
    const std::string& key;
    const std::string& value;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError("config line " + std::to_string(line) + ": " + key + ": " + what);
    }

    double real() const
    {
        double v = 0.0;
        const auto* end = value.data() + value.size();
        auto [p, ec] = std::from_chars(value.data(), end, v);
        if (ec != std::errc() || p != end) fail("expected a number, got '" + value + "'");
        return v;
    }

    std::uint64_t count() const
    {
        std::uint64_t v = 0;
        const auto* end = value.data() + value.size();
        auto [p, ec] = std::from_chars(value.data(), end, v);
        if (ec != std::errc() || p != end) fail("expected a nonnegative integer, got '" + value + "'");
        return v;
    }

    bool flag() const
    {
        if (value == "true" || value == "yes" || value == "1") return true;
        if (value == "false" || value == "no" || value == "0") return false;
        fail("expected true or false, got '" + value + "'");
    }

    std::vector<std::uint64_t> count_list() const
    {
        std::vector<std::uint64_t> out;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            std::uint64_t v = 0;
            const auto* end = item.data() + item.size();
            auto [p, ec] = std::from_chars(item.data(), end, v);
            if (item.empty() || ec != std::errc() || p != end) fail("bad list entry '" + item + "'");
            out.push_back(v);
        }
        return out;
    }
};

std::string schedule_name(ScheduleKind k)
{
    switch (k) {
    case ScheduleKind::diminishing: return "diminishing";
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::decaying: return "decaying";
    }
    return "diminishing";
}

void apply_problem_key(ProblemSpec& p, const Cursor& c)
{
    const auto& k = c.key;
    if (k == "source") {
        if (c.value != "synthetic" && c.value != "file") c.fail("expected synthetic or file");
        p.source = c.value;
    } else if (k == "n") p.n = c.count();
    else if (k == "train_count") p.train_count = c.count();
    else if (k == "test_count") p.test_count = c.count();
    else if (k == "density") p.density = c.real();
    else if (k == "data_seed") p.data_seed = c.count();
    else if (k == "lambda") p.lambda = c.real();
    else if (k == "data_dir") p.data_dir = c.value;
    else if (k == "train_path") p.train_path = c.value;
    else if (k == "test_path") p.test_path = c.value;
    else if (k == "split_fraction") p.split_fraction = c.real();
    else if (k == "init_scale") p.init_scale = c.real();
    else c.fail("unknown key in [problem]");
}

void apply_run_key(ExperimentConfig& cfg, const Cursor& c)
{
    const auto& k = c.key;
    if (k == "seeds") cfg.seeds = c.count_list();
    else if (k == "out") cfg.out = c.value;
    else if (k == "eval_every") cfg.eval_every = c.count();
    else if (k == "dump_memory") cfg.dump_memory = c.flag();
    else if (k == "warm_start") cfg.warm_start = c.count();
    else c.fail("unknown key in [run]");
}

void apply_algorithm_key(AlgorithmSpec& a, const Cursor& c)
{
    auto& s = a.solver;
    const auto& k = c.key;
    if (k == "type") {
        if (!is_known_algorithm_type(c.value)) c.fail("unknown algorithm type '" + c.value + "'");
        const AlgorithmSpec fresh = default_algorithm(a.name, c.value);
        a.type = fresh.type;
        s.identity_operator = fresh.solver.identity_operator;
        if (s.identity_operator) s.memory = 0;
    } else if (k == "batch") s.batch_size = c.count();
    else if (k == "memory") s.memory = s.identity_operator ? 0 : c.count();
    else if (k == "delta") s.delta = c.real();
    else if (k == "schedule") {
        if (c.value == "diminishing") s.schedule.kind = ScheduleKind::diminishing;
        else if (c.value == "constant") s.schedule.kind = ScheduleKind::constant;
        else if (c.value == "decaying") s.schedule.kind = ScheduleKind::decaying;
        else c.fail("unknown schedule '" + c.value + "'");
    } else if (k == "step") s.schedule.base = c.real();
    else if (k == "beta") s.schedule.beta = c.real();
    else if (k == "kappa_low") s.schedule.kappa_low = c.real();
    else if (k == "kappa_up") s.schedule.kappa_up = c.real();
    else if (k == "lipschitz") s.schedule.lipschitz = c.real();
    else if (k == "iterations") s.max_iters = c.count();
    else if (k == "initial_gamma") s.initial_gamma = c.real();
    else if (k == "sampling") {
        if (c.value == "without") s.sampling = SamplingPolicy::without_replacement;
        else if (c.value == "with") s.sampling = SamplingPolicy::with_replacement;
        else c.fail("expected without or with");
    } else if (k == "epochs") s.epochs = c.count();
    else if (k == "inner") s.inner = c.count();
    else if (k == "vr_step") s.vr_alpha = c.real();
    else if (k == "vr_reevaluate") s.vr_reevaluate = c.flag();
    else if (k == "divergence_threshold") s.divergence_threshold = c.real();
    else if (k == "random_output") a.random_output = c.flag();
    else c.fail("unknown key in algorithm section");
}

} // namespace

bool is_known_algorithm_type(const std::string& type)
{
    return type == "sgd" || type == "sdlbfgs" || type == "svrg" || type == "sdlbfgs-vr";
}

AlgorithmSpec default_algorithm(const std::string& name, const std::string& type)
{
    if (!is_known_algorithm_type(type)) throw ConfigError("unknown algorithm type '" + type + "'");
    AlgorithmSpec a;
    a.name = name;
    a.type = type;
    a.solver.identity_operator = (type == "sgd" || type == "svrg");
    if (a.solver.identity_operator) a.solver.memory = 0;
    return a;
}

ExperimentConfig parse_config(std::istream& in)
{
    ExperimentConfig cfg;
    enum class Section { none, problem, run, algorithm } section = Section::none;
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section header");
            }
            const std::string head = trim(line.substr(1, line.size() - 2));
            if (head == "problem") section = Section::problem;
            else if (head == "run") section = Section::run;
            else if (head.rfind("algorithm", 0) == 0) {
                const std::string name = trim(head.substr(9));
                if (name.empty()) {
                    throw ConfigError("config line " + std::to_string(lineno) + ": algorithm section needs a name");
                }
                for (const auto& a : cfg.algorithms) {
                    if (a.name == name) {
                        throw ConfigError("config line " + std::to_string(lineno) + ": duplicate algorithm '" + name + "'");
                    }
                }
                // The type defaults to the section name when that names a known type.
                cfg.algorithms.push_back(
                    default_algorithm(name, is_known_algorithm_type(name) ? name : "sdlbfgs"));
                section = Section::algorithm;
            } else {
                throw ConfigError("config line " + std::to_string(lineno) + ": unknown section [" + head + "]");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const Cursor c{lineno, key, value};
        switch (section) {
        case Section::none: c.fail("key outside of any section");
        case Section::problem: apply_problem_key(cfg.problem, c); break;
        case Section::run: apply_run_key(cfg, c); break;
        case Section::algorithm: apply_algorithm_key(cfg.algorithms.back(), c); break;
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& cfg)
{
    using io::format_double;
    std::ostringstream out;
    const auto& p = cfg.problem;
    out << "[problem]\n"
        << "source = " << p.source << '\n'
        << "n = " << p.n << '\n'
        << "train_count = " << p.train_count << '\n'
        << "test_count = " << p.test_count << '\n'
        << "density = " << format_double(p.density) << '\n'
        << "data_seed = " << p.data_seed << '\n'
        << "lambda = " << format_double(p.lambda) << '\n'
        << "data_dir = " << p.data_dir << '\n';
    if (!p.train_path.empty()) out << "train_path = " << p.train_path << '\n';
    if (!p.test_path.empty()) out << "test_path = " << p.test_path << '\n';
    out << "split_fraction = " << format_double(p.split_fraction) << '\n'
        << "init_scale = " << format_double(p.init_scale) << "\n\n";

    out << "[run]\nseeds = ";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) out << (i ? ", " : "") << cfg.seeds[i];
    out << "\nout = " << cfg.out << "\neval_every = " << cfg.eval_every
        << "\ndump_memory = " << (cfg.dump_memory ? "true" : "false")
        << "\nwarm_start = " << cfg.warm_start << '\n';

    for (const auto& a : cfg.algorithms) {
        const auto& s = a.solver;
        out << "\n[algorithm " << a.name << "]\n"
            << "type = " << a.type << '\n'
            << "batch = " << s.batch_size << '\n'
            << "memory = " << s.memory << '\n'
            << "delta = " << format_double(s.delta) << '\n'
            << "schedule = " << schedule_name(s.schedule.kind) << '\n'
            << "step = " << format_double(s.schedule.base) << '\n'
            << "beta = " << format_double(s.schedule.beta) << '\n'
            << "kappa_low = " << format_double(s.schedule.kappa_low) << '\n'
            << "kappa_up = " << format_double(s.schedule.kappa_up) << '\n'
            << "lipschitz = " << format_double(s.schedule.lipschitz) << '\n'
            << "iterations = " << s.max_iters << '\n'
            << "initial_gamma = " << format_double(s.initial_gamma) << '\n'
            << "sampling = "
            << (s.sampling == SamplingPolicy::without_replacement ? "without" : "with") << '\n'
            << "epochs = " << s.epochs << '\n'
            << "inner = " << s.inner << '\n'
            << "vr_step = " << format_double(s.vr_alpha) << '\n'
            << "vr_reevaluate = " << (s.vr_reevaluate ? "true" : "false") << '\n'
            << "divergence_threshold = " << format_double(s.divergence_threshold) << '\n'
            << "random_output = " << (a.random_output ? "true" : "false") << '\n';
    }
    return out.str();
}

void validate_config(const ExperimentConfig& cfg)
{
    if (cfg.algorithms.empty()) throw ConfigError("config: no algorithms selected");
    if (cfg.seeds.empty()) throw ConfigError("config: no seeds given");
    if (cfg.eval_every == 0) throw ConfigError("config: eval_every must be >= 1");
    if (cfg.out.empty()) throw ConfigError("config: output directory is empty");
    const auto& p = cfg.problem;
    if (p.source == "synthetic") {
        if (p.n == 0 || p.train_count == 0 || p.test_count == 0) {
            throw ConfigError("config: synthetic n, train_count and test_count must be >= 1");
        }
        if (!(p.density > 0.0 && p.density <= 1.0)) throw ConfigError("config: density must lie in (0, 1]");
    } else if (p.train_path.empty()) {
        throw ConfigError("config: source = file needs train_path");
    }
    if (!(p.lambda >= 0.0)) throw ConfigError("config: lambda must be nonnegative");
    for (const auto& a : cfg.algorithms) {
        try {
            SolverConfig s = a.solver;
            s.eval_every = cfg.eval_every;
            s.validate();
            // Variance-reduced runs always draw their output uniformly.
            const bool pmf_output = a.random_output && (a.type == "sgd" || a.type == "sdlbfgs");
            const auto& sc = s.schedule;
            if (pmf_output && !(sc.kappa_low > 0.0 && sc.kappa_up > 0.0 && sc.lipschitz > 0.0)) {
                throw ConfigError("random_output needs kappa_low, kappa_up and lipschitz");
            }
        } catch (const Error& e) {
            throw ConfigError("algorithm '" + a.name + "': " + e.what());
        }
    }
}

} // namespace sqnkit::harness
