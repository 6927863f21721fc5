#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sqnkit/commands.hpp"
#include "sqnkit/config.hpp"
#include "sqnkit/errors.hpp"

using namespace sqnkit;

int main(int argc, char** argv)
{
    CLI::App app{"sqnkit: stochastic quasi-Newton experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out;
    std::vector<std::string> algos;
    std::uint64_t eval_every = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--seed", seeds, "run seed (repeatable)");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--algo", algos, "algorithm section or type (repeatable)");
        sub->add_option("--eval-every", eval_every, "evaluation cadence in iterations")
            ->check(CLI::PositiveNumber);
    };
    CLI::App* gen = app.add_subcommand("generate", "write train/test datasets");
    CLI::App* run = app.add_subcommand("run", "run every (algorithm, seed) pair");
    CLI::App* cmp = app.add_subcommand("compare", "join traces into compare.csv");
    for (auto* sub : {gen, run, cmp}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : harness::exit_config_error;
    }

    try {
        harness::Overrides ov;
        ov.seeds = seeds;
        if (!out.empty()) ov.out = out;
        ov.algorithms = algos;
        if (eval_every > 0) ov.eval_every = eval_every;
        harness::ExperimentConfig config =
            harness::apply_overrides(harness::load_config(config_path), ov);
        harness::validate_config(config);

        if (gen->parsed()) {
            harness::cmd_generate(config);
            std::cout << "wrote datasets to " << config.problem.data_dir << '\n';
            return harness::exit_ok;
        }
        if (run->parsed()) {
            const int rc = harness::cmd_run(config, std::cout);
            if (rc == harness::exit_all_diverged) std::cerr << "error: all runs diverged\n";
            return rc;
        }
        harness::cmd_compare(config);
        std::cout << "wrote " << config.out << "/compare.csv\n";
        return harness::exit_ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return harness::exit_config_error;
    } catch (const ScheduleError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return harness::exit_config_error;
    } catch (const ArgumentError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return harness::exit_config_error;
    } catch (const IoError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return harness::exit_data_error;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return harness::exit_data_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return harness::exit_data_error;
    }
}
