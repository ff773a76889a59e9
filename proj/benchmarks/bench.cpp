#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <vector>

#include "semeq/config.hpp"
#include "semeq/experiment.hpp"
#include "semeq/game.hpp"
#include "semeq/rng.hpp"

namespace {

semeq::ScenarioConfig bench_config(int links) {
    semeq::ScenarioConfig c;
    semeq::LinkConfig link;
    link.tx_latent_dim = 64;
    link.rx_latent_dim = 64;
    link.tx_antennas = 2;
    link.rx_antennas = 2;
    link.channel_uses = 4;
    c.links.assign(links, link);
    c.latent.pilot_count = 1024;
    c.latent.test_count = 16;
    return c;
}

const semeq::Scenario& bench_scenario() {
    static const semeq::Scenario scn = semeq::build_scenario(bench_config(3), 42);
    return scn;
}

void waterfill_modes(benchmark::State& state) {
    const int modes = static_cast<int>(state.range(0));
    auto rng = semeq::make_engine(7);
    std::uniform_real_distribution<double> unit(0.1, 5.0);
    Eigen::VectorXd lambda(modes), s2(modes);
    for (int m = 0; m < modes; ++m) {
        lambda(m) = unit(rng);
        s2(m) = unit(rng);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(semeq::waterfill(lambda, s2, 4096, 10.0));
}

void best_response_link(benchmark::State& state) {
    const semeq::Scenario& scn = bench_scenario();
    std::vector<Eigen::MatrixXcd> precoders;
    auto rng = semeq::make_engine(11);
    for (const semeq::LinkConfig& cfg : scn.links) {
        Eigen::MatrixXcd f =
            semeq::complex_gaussian_matrix(cfg.mode_count(), cfg.tx_complex_dim(), rng);
        f *= std::sqrt(cfg.power_budget() / f.squaredNorm());
        precoders.push_back(std::move(f));
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(semeq::best_response(scn, 0, precoders));
}

void game_iteration(benchmark::State& state) {
    const semeq::Scenario& scn = bench_scenario();
    semeq::GameConfig game;
    game.max_iterations = 1;  // one full synchronous sweep plus metrics
    game.scheme = state.range(0) == 0 ? semeq::Scheme::gauss_seidel : semeq::Scheme::jacobi;
    for (auto _ : state) benchmark::DoNotOptimize(semeq::run_game(scn, game, 42));
}

}  // namespace

BENCHMARK(waterfill_modes)->Arg(8)->Arg(80)->Arg(512);
BENCHMARK(best_response_link);
BENCHMARK(game_iteration)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
