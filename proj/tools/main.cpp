#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>

#include "semeq/config.hpp"
#include "semeq/errors.hpp"
#include "semeq/experiment.hpp"
#include "semeq/game.hpp"
#include "semeq/io.hpp"
#include "semeq/report.hpp"

namespace {

struct Options {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string scheme;
    int iters = 0;
    bool iters_set = false;
    std::string out;
    std::string axis;
};

void apply_overrides(semeq::ScenarioConfig& config, const Options& opts) {
    if (opts.seed_set) config.experiment.seeds = {opts.seed};
    if (!opts.scheme.empty()) config.game.scheme = semeq::scheme_from_string(opts.scheme);
    if (opts.iters_set) {
        if (opts.iters < 1) throw semeq::ConfigError("--iters: must be >= 1");
        config.game.max_iterations = opts.iters;
    }
    if (!opts.out.empty()) config.output.directory = opts.out;
}

std::string stamp(const semeq::ScenarioConfig& config, std::uint64_t seed) {
    return "configHash=" + semeq::hex64(semeq::config_hash(config)) +
           " seed=" + std::to_string(seed);
}

void write_states(const semeq::ScenarioConfig& config, std::uint64_t seed,
                  const semeq::Scenario& scenario,
                  const std::vector<semeq::TransceiverState>& states) {
    const std::filesystem::path dir = config.output.directory;
    const std::string meta = stamp(config, seed);
    if (config.output.write_matrices) {
        for (std::size_t l = 0; l < states.size(); ++l) {
            const std::string tag = "link" + std::to_string(l);
            semeq::save_complex_matrix(dir / (tag + "_F.txt"), states[l].F, meta);
            semeq::save_complex_matrix(dir / (tag + "_G.txt"), states[l].G, meta);
        }
    }
    if (config.output.write_pilots) {
        for (std::size_t l = 0; l < scenario.pilots.size(); ++l) {
            const std::string tag = "link" + std::to_string(l);
            semeq::save_complex_matrix(dir / (tag + "_pilot_tx.txt"),
                                       scenario.pilots[l].X, meta);
            semeq::save_complex_matrix(dir / (tag + "_pilot_rx.txt"),
                                       scenario.pilots[l].Y, meta);
        }
    }
}

int cmd_run(const semeq::ScenarioConfig& config) {
    const std::uint64_t seed = config.experiment.seeds.front();
    const semeq::Scenario scenario = semeq::build_scenario(config, seed);
    semeq::CellResult cell =
        semeq::run_cell(scenario, config, semeq::Method::game, seed);
    const semeq::NashReport nash =
        semeq::verify_nash(cell.states, scenario, config.game.ne_check_trials,
                           config.game.ne_tolerance, seed);

    const std::filesystem::path dir = config.output.directory;
    semeq::write_text_file(dir / "trace.csv",
                           semeq::render_trace_csv(cell.trace, semeq::config_hash(config),
                                                   seed, config.game.scheme));
    semeq::GameResult result{cell.states, cell.trace};
    semeq::write_text_file(dir / "summary.json",
                           semeq::render_run_summary(config, seed, result, nash, cell.point));
    write_states(config, seed, scenario, cell.states);

    std::cout << stamp(config, seed) << '\n'
              << "scheme=" << semeq::to_string(config.game.scheme)
              << " converged=" << (cell.trace.converged ? "true" : "false")
              << " iterations=" << cell.trace.iterations_used
              << " nash=" << (nash.is_ne ? "pass" : "fail") << '\n'
              << "wrote " << (dir / "trace.csv").string() << ", "
              << (dir / "summary.json").string() << '\n';
    if (!cell.trace.converged) {
        std::cerr << "run: no convergence within " << config.game.max_iterations
                  << " iterations (residual target " << config.game.tolerance << ")\n";
        return 2;
    }
    return 0;
}

int cmd_verify(const semeq::ScenarioConfig& config) {
    const std::uint64_t seed = config.experiment.seeds.front();
    const semeq::Scenario scenario = semeq::build_scenario(config, seed);
    const semeq::GameResult result = semeq::run_game(scenario, config.game, seed);
    const semeq::NashReport nash =
        semeq::verify_nash(result.states, scenario, config.game.ne_check_trials,
                           config.game.ne_tolerance, seed);

    std::cout << stamp(config, seed) << '\n'
              << "scheme=" << semeq::to_string(config.game.scheme)
              << " converged=" << (result.trace.converged ? "true" : "false")
              << " iterations=" << result.trace.iterations_used << '\n';
    for (std::size_t l = 0; l < nash.players.size(); ++l) {
        const semeq::NashPlayerCheck& p = nash.players[l];
        std::cout << "player " << l << ": payoff=" << semeq::format_double(p.payoff_final)
                  << " bestCandidate=" << semeq::format_double(p.payoff_best_candidate)
                  << " relativeImprovement="
                  << semeq::format_double(p.relative_improvement) << '\n';
    }
    std::cout << "nash=" << (nash.is_ne ? "pass" : "fail") << " worstRelativeImprovement="
              << semeq::format_double(nash.worst_relative_improvement) << '\n';
    return result.trace.converged && nash.is_ne ? 0 : 2;
}

int cmd_sweep(const semeq::ScenarioConfig& config, const std::string& axis_name) {
    const semeq::SweepAxis axis = semeq::sweep_axis_from_string(axis_name);
    const semeq::SweepResult sweep = axis == semeq::SweepAxis::compression_xi
                                         ? semeq::sweep_compression(config)
                                         : semeq::sweep_alpha(config);
    const std::filesystem::path dir = config.output.directory;
    const std::string base = "sweep_" + semeq::to_string(axis);
    semeq::write_text_file(dir / (base + ".csv"),
                           semeq::render_sweep_csv(sweep, semeq::config_hash(config)));
    semeq::write_text_file(dir / (base + "_summary.json"),
                           semeq::render_sweep_summary(config, sweep));

    bool all_converged = true;
    for (const semeq::MethodPoint& p : sweep.points) all_converged &= p.converged;
    std::cout << "configHash=" << semeq::hex64(semeq::config_hash(config)) << '\n'
              << "axis=" << semeq::to_string(axis) << " cells=" << sweep.points.size()
              << " converged=" << (all_converged ? "true" : "false") << '\n'
              << "wrote " << (dir / (base + ".csv")).string() << ", "
              << (dir / (base + "_summary.json")).string() << '\n';
    if (!all_converged) {
        std::cerr << "sweep: at least one game cell did not converge\n";
        return 2;
    }
    return 0;
}

int cmd_echo_config(const semeq::ScenarioConfig& config) {
    std::cout << semeq::canonical_config(config);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed semantic channel equalization over MIMO interference "
                 "channels: linear transceiver design by non-cooperative power games"};
    app.require_subcommand(1);
    Options opts;

    auto add_common = [&](CLI::App* sub, bool with_axis) {
        sub->add_option("--config", opts.config_path, "scenario config file (JSON)")
            ->required();
        auto* seed = sub->add_option("--seed", opts.seed, "override the seed list");
        sub->add_option("--scheme", opts.scheme, "update scheme")
            ->check(CLI::IsMember({"gauss-seidel", "jacobi"}));
        auto* iters = sub->add_option("--iters", opts.iters, "override maxIterations");
        sub->parse_complete_callback([&opts, iters, seed] {
            opts.iters_set = iters->count() > 0;
            opts.seed_set = seed->count() > 0;
        });
        sub->add_option("--out", opts.out, "override the output directory");
        if (with_axis)
            sub->add_option("--axis", opts.axis, "sweep axis")
                ->required()
                ->check(CLI::IsMember({"xi", "alpha"}));
    };

    CLI::App* run = app.add_subcommand("run", "play the power game once, write artifacts");
    add_common(run, false);
    CLI::App* sweep = app.add_subcommand("sweep", "run a compression or distance sweep");
    add_common(sweep, true);
    CLI::App* verify = app.add_subcommand("verify", "run the game and audit the equilibrium");
    add_common(verify, false);
    CLI::App* echo = app.add_subcommand("echo-config", "print the canonical config");
    add_common(echo, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        semeq::ScenarioConfig config = semeq::parse_config(opts.config_path);
        apply_overrides(config, opts);
        if (app.got_subcommand(run)) return cmd_run(config);
        if (app.got_subcommand(sweep)) return cmd_sweep(config, opts.axis);
        if (app.got_subcommand(verify)) return cmd_verify(config);
        return cmd_echo_config(config);
    } catch (const semeq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const semeq::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return 2;
    } catch (const semeq::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
