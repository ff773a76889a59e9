#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "semeq/errors.hpp"
#include "semeq/experiment.hpp"
#include "semeq/game.hpp"
#include "semeq/rng.hpp"
#include "semeq/transceiver.hpp"

using namespace semeq;
using testutil::max_abs_diff;
using testutil::small_config;
using testutil::small_scenario;

namespace {

// Reallocates the water level back into powers, mirroring the closed form.
double allocated_at(const Eigen::VectorXd& lambda, const Eigen::VectorXd& s2, double n,
                    double mu) {
    double total = 0.0;
    for (Eigen::Index m = 0; m < lambda.size(); ++m) {
        if (lambda(m) <= 0.0 || s2(m) <= 0.0) continue;
        total += std::max(0.0, (std::sqrt(s2(m) * lambda(m) / (n * mu)) - 1.0) / lambda(m));
    }
    return total;
}

// Exhaustive search over the budget face of the simplex, two free coordinates
// for three modes, one for two. The payoff is non-decreasing in every
// coordinate, so the maximum over the simplex sits on the face.
double grid_payoff(const Eigen::VectorXd& lambda, const Eigen::VectorXd& s2, int n,
                   double budget, int steps) {
    double best = 0.0;
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(lambda.size());
    if (lambda.size() == 2) {
        for (int i = 0; i <= steps; ++i) {
            phi(0) = budget * i / steps;
            phi(1) = std::max(0.0, budget - phi(0));
            best = std::max(best, diagonal_payoff(phi, lambda, s2, n));
        }
        return best;
    }
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; j <= steps - i; ++j) {
            phi(0) = budget * i / steps;
            phi(1) = budget * j / steps;
            phi(2) = std::max(0.0, budget - phi(0) - phi(1));
            best = std::max(best, diagonal_payoff(phi, lambda, s2, n));
        }
    }
    return best;
}

Eigen::VectorXd random_feasible(double budget, Eigen::Index modes, std::mt19937_64& rng) {
    std::exponential_distribution<double> exp1(1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Eigen::VectorXd phi(modes);
    for (Eigen::Index m = 0; m < modes; ++m) phi(m) = exp1(rng);
    phi *= budget * u01(rng) / phi.sum();
    return phi;
}

}  // namespace

TEST_CASE("water level: single-mode closed form and small-budget limit") {
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    // sqrt(1/mu) - 1 = 1  =>  mu = 1/4.
    CHECK(waterfill_mu(one, one, 1, 1.0) == doctest::Approx(0.25).epsilon(1e-12));

    // As the budget vanishes the level climbs to mu_max = max sigma2*lambda/n.
    const double mu = waterfill_mu(one, one, 1, 1e-12);
    CHECK(mu <= 1.0 + 1e-15);
    CHECK(mu > 1.0 - 1e-10);

    CHECK_THROWS_AS((void)waterfill_mu(one, one, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)waterfill_mu(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3), 4,
                                       1.0),
                    std::invalid_argument);
}

TEST_CASE("water level: allocation recovers the budget") {
    std::mt19937_64 rng(mix_seed(7, "test-instance"));
    std::uniform_real_distribution<double> gain(0.1, 5.0);
    std::uniform_real_distribution<double> bud(0.5, 20.0);
    for (int inst = 0; inst < 50; ++inst) {
        Eigen::VectorXd lambda(8), s2(8);
        for (int m = 0; m < 8; ++m) {
            lambda(m) = gain(rng);
            s2(m) = gain(rng);
        }
        const double budget = bud(rng);
        const int n = 1 + static_cast<int>(inst % 5) * 16;
        const double mu = waterfill_mu(lambda, s2, n, budget);
        CHECK(std::abs(allocated_at(lambda, s2, n, mu) - budget) < 1e-9 * budget);

        const Eigen::VectorXd phi = waterfill(lambda, s2, n, budget);
        CHECK(std::abs(phi.sum() - budget) < 1e-9 * budget);
        CHECK(phi.minCoeff() >= 0.0);
    }
}

TEST_CASE("water-filling hand case") {
    Eigen::VectorXd lambda(2), s2(2);
    lambda << 2.0, 0.5;
    s2 << 1.0, 1.0;
    const Eigen::VectorXd phi = waterfill(lambda, s2, 1, 1.0);
    CHECK(std::abs(phi(0) - 2.0 / 3.0) < 1e-10);
    CHECK(std::abs(phi(1) - 1.0 / 3.0) < 1e-10);
    CHECK(diagonal_payoff(phi, lambda, s2, 1) == doctest::Approx(5.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("water-filling edge cases") {
    Eigen::VectorXd lambda(2), s2(2);
    lambda << 1.0, 0.0;
    s2 << 1.0, 5.0;
    // Zero budget allocates nothing.
    CHECK(waterfill(lambda, s2, 1, 0.0).cwiseAbs().maxCoeff() == 0.0);
    // A dead mode gets nothing no matter how heavy its weight.
    const Eigen::VectorXd phi = waterfill(lambda, s2, 1, 2.0);
    CHECK(phi(1) == 0.0);
    CHECK(std::abs(phi(0) - 2.0) < 1e-9);
    // All modes dead: the allocation is zero, the level is undefined.
    CHECK(waterfill(Eigen::VectorXd::Zero(2), s2, 1, 2.0).cwiseAbs().maxCoeff() == 0.0);

    Eigen::VectorXd neg(2);
    neg << -1.0, 1.0;
    CHECK_THROWS_AS((void)waterfill(neg, s2, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)waterfill(lambda, neg, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)waterfill(lambda, Eigen::VectorXd::Ones(3), 1, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)waterfill(Eigen::VectorXd{}, Eigen::VectorXd{}, 1, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)waterfill(lambda, s2, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)waterfill(lambda, s2, 1, -1.0), std::invalid_argument);
}

TEST_CASE("water-filling matches an exhaustive simplex grid") {
    std::mt19937_64 rng(mix_seed(11, "test-instance"));
    std::uniform_real_distribution<double> gain(0.2, 4.0);
    std::uniform_real_distribution<double> bud(0.5, 8.0);
    for (int inst = 0; inst < 6; ++inst) {
        const Eigen::Index modes = inst % 2 == 0 ? 3 : 2;
        Eigen::VectorXd lambda(modes), s2(modes);
        for (Eigen::Index m = 0; m < modes; ++m) {
            lambda(m) = gain(rng);
            s2(m) = gain(rng);
        }
        const double budget = bud(rng);
        const Eigen::VectorXd phi = waterfill(lambda, s2, 16, budget);
        const double payoff = diagonal_payoff(phi, lambda, s2, 16);
        const double grid = grid_payoff(lambda, s2, 16, budget, 1000);
        CHECK(grid <= payoff + 1e-12);
        CHECK(payoff - grid < 1e-5);
    }
}

TEST_CASE("water-filling satisfies the KKT conditions") {
    std::mt19937_64 rng(mix_seed(13, "test-instance"));
    std::uniform_real_distribution<double> gain(0.05, 6.0);
    std::uniform_real_distribution<double> bud(0.2, 15.0);
    for (int inst = 0; inst < 40; ++inst) {
        const Eigen::Index modes = 2 + inst % 7;
        Eigen::VectorXd lambda(modes), s2(modes);
        for (Eigen::Index m = 0; m < modes; ++m) {
            lambda(m) = gain(rng);
            s2(m) = inst % 3 == 0 && m == 0 ? 0.0 : gain(rng);
        }
        const double budget = bud(rng);
        const int n = 32;
        const Eigen::VectorXd phi = waterfill(lambda, s2, n, budget);
        const double mu = waterfill_mu(lambda, s2, n, budget);
        for (Eigen::Index m = 0; m < modes; ++m) {
            const double slope =
                s2(m) * lambda(m) / (n * std::pow(phi(m) * lambda(m) + 1.0, 2));
            if (phi(m) > 1e-12)
                CHECK(std::abs(slope - mu) < 1e-7);  // active: marginal value = level
            else
                CHECK(slope <= mu + 1e-7);  // inactive: not worth the first watt
        }
    }
}

TEST_CASE("payoff is concave along segments") {
    std::mt19937_64 rng(mix_seed(17, "test-instance"));
    std::uniform_real_distribution<double> gain(0.1, 5.0);
    for (int inst = 0; inst < 200; ++inst) {
        Eigen::VectorXd lambda(5), s2(5);
        for (int m = 0; m < 5; ++m) {
            lambda(m) = gain(rng);
            s2(m) = gain(rng);
        }
        const Eigen::VectorXd a = random_feasible(4.0, 5, rng);
        const Eigen::VectorXd b = random_feasible(4.0, 5, rng);
        const double mid = diagonal_payoff(0.5 * (a + b), lambda, s2, 8);
        const double ends =
            0.5 * (diagonal_payoff(a, lambda, s2, 8) + diagonal_payoff(b, lambda, s2, 8));
        CHECK(mid >= ends - 1e-12);
    }
}

TEST_CASE("step blend and step size schedule") {
    Eigen::VectorXd phi(2), hat(2);
    phi << 2.0, 0.0;
    hat << 0.0, 2.0;
    CHECK((step_blend(phi, hat, 1.0) - hat).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd half = step_blend(phi, hat, 0.5);
    CHECK(half(0) == doctest::Approx(1.0));
    CHECK(half(1) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)step_blend(phi, hat, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)step_blend(phi, hat, 1.5), std::invalid_argument);
    CHECK_THROWS_AS((void)step_blend(phi, Eigen::VectorXd::Ones(3), 0.5),
                    std::invalid_argument);

    // Convex combination of feasible allocations stays feasible.
    std::mt19937_64 rng(mix_seed(19, "test-instance"));
    std::uniform_real_distribution<double> u01(1e-6, 1.0);
    for (int t = 0; t < 100; ++t) {
        const Eigen::VectorXd a = random_feasible(3.0, 6, rng);
        const Eigen::VectorXd b = random_feasible(3.0, 6, rng);
        const Eigen::VectorXd c = step_blend(a, b, u01(rng));
        CHECK(c.minCoeff() >= 0.0);
        CHECK(c.sum() <= 3.0 + 1e-12);
    }

    CHECK(step_size_update(0.5, 0.1) == doctest::Approx(0.475).epsilon(1e-15));
    CHECK(step_size_update(1.0, 1.0) == 1e-6);  // clamped at the floor
    double gamma = 1.0;
    for (int t = 0; t < 1000; ++t) {
        const double next = step_size_update(gamma, 0.01);
        CHECK(next <= gamma);
        CHECK(next >= 1e-6);
        gamma = next;
    }
    CHECK_THROWS_AS((void)step_size_update(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)step_size_update(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)step_size_update(2.0, 0.5), std::invalid_argument);
}

TEST_CASE("best response without rivals reduces to the closed form") {
    const Scenario scn = small_scenario(1, 42);
    const LinkConfig& cfg = scn.links[0];
    std::vector<Eigen::MatrixXcd> precoders{
        Eigen::MatrixXcd::Zero(cfg.mode_count(), cfg.tx_complex_dim())};
    const BestResponse br = best_response(scn, 0, precoders);

    const int n = scn.pilots[0].count();
    const Eigen::MatrixXcd expect_rn =
        scn.channels.sigma2 *
        Eigen::MatrixXcd::Identity(cfg.mode_count(), cfg.mode_count());
    CHECK(max_abs_diff(br.rn, expect_rn) == 0.0);

    const EigDescending modes =
        eig_descending(effective_channel_cov(scn.channels.direct[0], expect_rn, n));
    const Eigen::VectorXd lambda = modes.lambda * static_cast<double>(n);
    CHECK((br.mode_gain - lambda).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd phi_star =
        waterfill(lambda, scn.mode_weight[0], n, cfg.power_budget());
    CHECK((br.phi_hat - phi_star).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS((void)best_response(scn, 1, precoders), std::invalid_argument);
    CHECK_THROWS_AS((void)best_response(scn, 0, {}), std::invalid_argument);
}

TEST_CASE("best response dominates random feasible allocations") {
    const Scenario scn = small_scenario(2, 9);
    std::vector<Eigen::MatrixXcd> precoders;
    auto rng = make_engine(mix_seed(9, "test-instance"));
    for (const LinkConfig& cfg : scn.links) {
        Eigen::MatrixXcd f =
            complex_gaussian_matrix(cfg.mode_count(), cfg.tx_complex_dim(), rng);
        f *= std::sqrt(cfg.power_budget() / f.squaredNorm());
        precoders.push_back(std::move(f));
    }
    const BestResponse br = best_response(scn, 0, precoders);
    const BestResponse again = best_response(scn, 0, precoders);
    CHECK((br.phi_hat - again.phi_hat).cwiseAbs().maxCoeff() == 0.0);

    const int n = scn.pilots[0].count();
    const double budget = scn.links[0].power_budget();
    const double best = diagonal_payoff(br.phi_hat, br.mode_gain, scn.mode_weight[0], n);
    std::mt19937_64 draw(mix_seed(21, "test-instance"));
    for (int t = 0; t < 1000; ++t) {
        const Eigen::VectorXd phi = random_feasible(budget, br.phi_hat.size(), draw);
        CHECK(diagonal_payoff(phi, br.mode_gain, scn.mode_weight[0], n) <= best + 1e-10);
    }
}

TEST_CASE("single link converges in two iterations to its own optimum") {
    const ScenarioConfig cfg = small_config(1);
    const Scenario scn = build_scenario(cfg, 42);
    const GameResult result = run_game(scn, cfg.game, 42);

    CHECK(result.trace.converged);
    CHECK(result.trace.iterations_used == 2);
    CHECK(result.trace.per_iteration.size() == 2);
    CHECK(result.trace.per_iteration.back().residual < 1e-12);

    std::vector<Eigen::MatrixXcd> precoders{result.states[0].F};
    const BestResponse br = best_response(scn, 0, precoders);
    CHECK((result.states[0].phi - br.phi_hat).cwiseAbs().maxCoeff() < 1e-12);

    const NashReport report = verify_nash(result.states, scn, 200, 1e-6, 42);
    CHECK(report.is_ne);
    CHECK(report.worst_relative_improvement <= 1e-9);
}

TEST_CASE("game runs are deterministic and scheme independent in outcome") {
    const ScenarioConfig cfg = small_config(3);
    const Scenario scn = build_scenario(cfg, 100);

    const GameResult a = run_game(scn, cfg.game, 100);
    const GameResult b = run_game(scn, cfg.game, 100);
    CHECK(a.trace.iterations_used == b.trace.iterations_used);
    for (std::size_t t = 0; t < a.trace.per_iteration.size(); ++t)
        CHECK(a.trace.per_iteration[t].residual == b.trace.per_iteration[t].residual);
    for (int l = 0; l < 3; ++l) CHECK(max_abs_diff(a.states[l].F, b.states[l].F) == 0.0);

    GameConfig jac = cfg.game;
    jac.scheme = Scheme::jacobi;
    const GameResult j1 = run_game(scn, jac, 100);
    jac.workers = 4;
    const GameResult j4 = run_game(scn, jac, 100);
    CHECK(j1.trace.converged);
    CHECK(j1.trace.iterations_used == j4.trace.iterations_used);
    for (int l = 0; l < 3; ++l) CHECK(max_abs_diff(j1.states[l].F, j4.states[l].F) == 0.0);
    for (std::size_t t = 0; t < j1.trace.per_iteration.size(); ++t) {
        CHECK(j1.trace.per_iteration[t].residual == j4.trace.per_iteration[t].residual);
        CHECK((j1.trace.per_iteration[t].mse - j4.trace.per_iteration[t].mse)
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }

    CHECK(a.trace.converged);
    const NashReport gs_report = verify_nash(a.states, scn, 200, 1e-6, 100);
    const NashReport jac_report = verify_nash(j1.states, scn, 200, 1e-6, 100);
    CHECK(gs_report.is_ne);
    CHECK(jac_report.is_ne);
}

TEST_CASE("every iteration respects budgets and the step schedule") {
    const ScenarioConfig cfg = small_config(3);
    const Scenario scn = build_scenario(cfg, 27);
    const GameResult result = run_game(scn, cfg.game, 27);
    CHECK(result.trace.converged);

    double gamma = cfg.game.gamma0;
    int expect_iter = 1;
    for (const IterationRecord& rec : result.trace.per_iteration) {
        CHECK(rec.iteration == expect_iter++);
        CHECK(rec.step_size == gamma);
        gamma = step_size_update(gamma, cfg.game.epsilon);
        CHECK(rec.residual >= 0.0);
        for (int l = 0; l < 3; ++l) {
            CHECK(rec.power_used(l) <= scn.links[l].power_budget() + 1e-9);
            CHECK(rec.power_used(l) >= 0.0);
            CHECK(rec.mse(l) > 0.0);
            CHECK(rec.payoff(l) >= 0.0);
            CHECK(rec.mui_watts(l) >= 0.0);
        }
    }
    CHECK(result.trace.converged ==
          (result.trace.per_iteration.back().residual < cfg.game.tolerance));

    // Final states are internally consistent.
    for (int l = 0; l < 3; ++l) {
        const TransceiverState& st = result.states[l];
        CHECK(st.phi.minCoeff() >= 0.0);
        CHECK(st.F.squaredNorm() <= scn.links[l].power_budget() + 1e-9);
        CHECK(std::abs(st.F.squaredNorm() - st.phi.sum()) < 1e-9);
        const Eigen::MatrixXcd rebuilt = assemble_precoder(st.V, st.phi, scn.trunc[l].q);
        CHECK(max_abs_diff(rebuilt, st.F) < 1e-10);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(st.Rn);
        CHECK(es.eigenvalues().minCoeff() >= scn.channels.sigma2 - 1e-10);
    }
}

TEST_CASE("iteration cap reached without convergence is not an error") {
    ScenarioConfig cfg = small_config(3);
    cfg.game.max_iterations = 1;
    const Scenario scn = build_scenario(cfg, 42);
    const GameResult result = run_game(scn, cfg.game, 42);
    CHECK_FALSE(result.trace.converged);
    CHECK(result.trace.iterations_used == 1);
    CHECK(result.trace.per_iteration.size() == 1);
}

TEST_CASE("equilibrium check flags a sabotaged player") {
    const ScenarioConfig cfg = small_config(2);
    const Scenario scn = build_scenario(cfg, 42);
    const GameResult result = run_game(scn, cfg.game, 42);
    CHECK(result.trace.converged);
    CHECK(verify_nash(result.states, scn, 200, 1e-6, 42).is_ne);

    std::vector<TransceiverState> broken = result.states;
    broken[0].phi.setZero();
    broken[0].F.setZero();
    const NashReport report = verify_nash(broken, scn, 200, 1e-6, 42);
    CHECK_FALSE(report.is_ne);
    CHECK(report.players[0].improvement > 1e-3);
    CHECK(report.players[0].payoff_final == 0.0);

    CHECK_THROWS_AS((void)verify_nash(result.states, scn, 0, 1e-6, 42),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)verify_nash(result.states, scn, 10, -1.0, 42),
                    std::invalid_argument);
    std::vector<TransceiverState> short_states(1);
    CHECK_THROWS_AS((void)verify_nash(short_states, scn, 10, 1e-6, 42),
                    std::invalid_argument);
}
