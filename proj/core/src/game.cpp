#include "semeq/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "semeq/errors.hpp"
#include "semeq/parallel.hpp"
#include "semeq/rng.hpp"

namespace semeq {

std::string to_string(Scheme scheme) {
    return scheme == Scheme::gauss_seidel ? "gauss-seidel" : "jacobi";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "gauss-seidel") return Scheme::gauss_seidel;
    if (name == "jacobi") return Scheme::jacobi;
    throw ConfigError("scheme: expected 'gauss-seidel' or 'jacobi', got '" + name + "'");
}

void GameConfig::validate() const {
    if (max_iterations < 1) throw ConfigError("game.maxIterations: must be >= 1");
    if (tolerance < 0.0) throw ConfigError("game.tolerance: must be >= 0");
    if (!(gamma0 > 0.0) || gamma0 > 1.0)
        throw ConfigError("game.gamma0: must be in (0, 1]");
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw ConfigError("game.epsilon: must be in (0, 1]");
    if (ne_check_trials < 1) throw ConfigError("game.neCheckTrials: must be >= 1");
    if (ne_tolerance < 0.0) throw ConfigError("game.neTolerance: must be >= 0");
    if (workers < 1) throw ConfigError("game.workers: must be >= 1");
}

namespace {

constexpr double kStepFloor = 1e-6;

// Total power allocated at water level mu, restricted to live modes.
double allocated_power(const Eigen::VectorXd& lambda, const Eigen::VectorXd& sigma_tilde2,
                       double n, double mu) {
    double total = 0.0;
    for (Eigen::Index m = 0; m < lambda.size(); ++m) {
        if (lambda(m) <= 0.0 || sigma_tilde2(m) <= 0.0) continue;
        const double phi =
            (std::sqrt(sigma_tilde2(m)) * std::sqrt(lambda(m) / (n * mu)) - 1.0) / lambda(m);
        if (phi > 0.0) total += phi;
    }
    return total;
}

void check_waterfill_inputs(const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& sigma_tilde2, int pilot_count,
                            double budget) {
    if (lambda.size() != sigma_tilde2.size())
        throw std::invalid_argument("waterfill: vector lengths differ");
    if (lambda.size() == 0) throw std::invalid_argument("waterfill: no modes");
    if ((lambda.array() < 0.0).any() || (sigma_tilde2.array() < 0.0).any())
        throw std::invalid_argument("waterfill: negative gains or weights");
    if (pilot_count < 1) throw std::invalid_argument("waterfill: pilot count must be >= 1");
    if (budget < 0.0) throw std::invalid_argument("waterfill: negative budget");
}

}  // namespace

double waterfill_mu(const Eigen::VectorXd& lambda, const Eigen::VectorXd& sigma_tilde2,
                    int pilot_count, double budget) {
    check_waterfill_inputs(lambda, sigma_tilde2, pilot_count, budget);
    if (!(budget > 0.0)) throw std::invalid_argument("waterfill_mu: budget must be > 0");
    const double n = static_cast<double>(pilot_count);
    double mu_max = 0.0;
    for (Eigen::Index m = 0; m < lambda.size(); ++m)
        if (lambda(m) > 0.0 && sigma_tilde2(m) > 0.0)
            mu_max = std::max(mu_max, sigma_tilde2(m) * lambda(m) / n);
    if (mu_max == 0.0)
        throw std::invalid_argument("waterfill_mu: all modes dead (no positive gain "
                                    "with positive weight)");

    // Power is monotone non-increasing in mu, zero at mu_max, unbounded as
    // mu -> 0+. Walk the lower bracket down until it over-allocates, then
    // bisect.
    double hi = mu_max;
    double lo = mu_max;
    while (allocated_power(lambda, sigma_tilde2, n, lo) < budget) {
        lo *= 0.5;
        if (lo < 1e-300)
            throw NumericalError("waterfill_mu: bracket search underflow");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (allocated_power(lambda, sigma_tilde2, n, mid) >= budget)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Eigen::VectorXd waterfill(const Eigen::VectorXd& lambda, const Eigen::VectorXd& sigma_tilde2,
                          int pilot_count, double budget) {
    check_waterfill_inputs(lambda, sigma_tilde2, pilot_count, budget);
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(lambda.size());
    if (!(budget > 0.0)) return phi;
    bool any_live = false;
    for (Eigen::Index m = 0; m < lambda.size(); ++m)
        any_live = any_live || (lambda(m) > 0.0 && sigma_tilde2(m) > 0.0);
    if (!any_live) return phi;

    const double n = static_cast<double>(pilot_count);
    const double mu = waterfill_mu(lambda, sigma_tilde2, pilot_count, budget);
    for (Eigen::Index m = 0; m < lambda.size(); ++m) {
        if (lambda(m) <= 0.0 || sigma_tilde2(m) <= 0.0) continue;
        const double raw =
            (std::sqrt(sigma_tilde2(m)) * std::sqrt(lambda(m) / (n * mu)) - 1.0) / lambda(m);
        phi(m) = std::max(0.0, raw);
    }
    return phi;
}

namespace {

// Rn against the rivals' current precoders, shared by the design path and
// the powers-only iteration path.
Eigen::MatrixXcd rival_muin(const Scenario& scenario, int link,
                            const std::vector<Eigen::MatrixXcd>& precoders) {
    std::vector<const Eigen::MatrixXcd*> cross;
    std::vector<const Eigen::MatrixXcd*> rivals;
    for (int j = 0; j < scenario.link_count(); ++j) {
        if (j == link) continue;
        cross.push_back(&scenario.channels.cross_channel(j, link));
        rivals.push_back(&precoders[j]);
    }
    const LinkConfig& cfg = scenario.links[link];
    return muin_covariance(cross, rivals, scenario.channels.sigma2,
                           cfg.channel_uses * cfg.rx_antennas);
}

}  // namespace

BestResponse best_response(const Scenario& scenario, int link,
                           const std::vector<Eigen::MatrixXcd>& precoders) {
    const int n_links = scenario.link_count();
    if (link < 0 || link >= n_links) throw std::invalid_argument("best_response: bad link");
    if (static_cast<int>(precoders.size()) != n_links)
        throw std::invalid_argument("best_response: precoder snapshot size mismatch");
    const LinkConfig& cfg = scenario.links[link];
    const int n = scenario.pilots[link].count();

    BestResponse br;
    br.rn = rival_muin(scenario, link, precoders);
    EigDescending modes =
        eig_descending(effective_channel_cov(scenario.channels.direct[link], br.rn, n));
    br.v = std::move(modes.v);
    // Diagonal-domain convention: gains are eigenvalues of Hᴴ·Rn⁻¹·H, which is
    // n times the effective channel covariance spectrum.
    br.mode_gain = modes.lambda * static_cast<double>(n);
    br.phi_hat =
        waterfill(br.mode_gain, scenario.mode_weight[link], n, cfg.power_budget());
    return br;
}

Eigen::VectorXd step_blend(const Eigen::VectorXd& phi, const Eigen::VectorXd& phi_hat,
                           double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw std::invalid_argument("step_blend: gamma must be in (0, 1]");
    if (phi.size() != phi_hat.size())
        throw std::invalid_argument("step_blend: vector lengths differ");
    return phi + gamma * (phi_hat - phi);
}

double step_size_update(double gamma, double epsilon) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw std::invalid_argument("step_size_update: gamma must be in (0, 1]");
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw std::invalid_argument("step_size_update: epsilon must be in (0, 1]");
    return std::max(gamma * (1.0 - epsilon * gamma), kStepFloor);
}

namespace {

// Power update for iterations after the assembly basis is pinned: the same
// chain as best_response, but only the eigenvalues are needed, so the
// eigenvector accumulation is skipped. Ordering and clamping mirror
// eig_descending.
Eigen::VectorXd best_response_powers(const Scenario& scenario, int link,
                                     const std::vector<Eigen::MatrixXcd>& precoders) {
    const LinkConfig& cfg = scenario.links[link];
    const int n = scenario.pilots[link].count();
    const Eigen::MatrixXcd rn = rival_muin(scenario, link, precoders);
    const Eigen::MatrixXcd r_h =
        effective_channel_cov(scenario.channels.direct[link], rn, n);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
        0.5 * (r_h + r_h.adjoint()), Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw NumericalError("run_game: eigendecomposition failed");
    const Eigen::VectorXd mode_gain =
        eig.eigenvalues().reverse().cwiseMax(0.0) * static_cast<double>(n);
    return waterfill(mode_gain, scenario.mode_weight[link], n, cfg.power_budget());
}

struct LinkMetrics {
    double mse = 0;
    double payoff = 0;
    double mui_watts = 0;
    double power = 0;
};

// Metrics on the committed profile: fresh Rn against all committed rivals,
// Wiener G for the MSE, and the diagonal payoff at the committed powers.
// Updates the state's G, Rn, and mode quantities in place.
LinkMetrics committed_metrics(const Scenario& scenario, int link,
                              const std::vector<Eigen::MatrixXcd>& precoders,
                              TransceiverState& state) {
    const LinkConfig& cfg = scenario.links[link];
    const int n = scenario.pilots[link].count();
    const int rx_dim = cfg.channel_uses * cfg.rx_antennas;

    std::vector<const Eigen::MatrixXcd*> cross;
    std::vector<const Eigen::MatrixXcd*> rivals;
    for (int j = 0; j < scenario.link_count(); ++j) {
        if (j == link) continue;
        cross.push_back(&scenario.channels.cross_channel(j, link));
        rivals.push_back(&precoders[j]);
    }
    state.Rn = muin_covariance(cross, rivals, scenario.channels.sigma2, rx_dim);
    state.G = wiener_equalizer(scenario.pilots[link].P, scenario.channels.direct[link],
                               state.F, state.Rn, n);
    // Only the eigenvalues feed the payoff column, so skip the eigenvector
    // accumulation; flip Eigen's ascending order and clamp round-off
    // negatives exactly as eig_descending does.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
        effective_channel_cov(scenario.channels.direct[link], state.Rn, n),
        Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw NumericalError("run_game: metrics eigendecomposition failed");
    state.mode_gain =
        eig.eigenvalues().reverse().cwiseMax(0.0) * static_cast<double>(n);
    state.mode_weight = scenario.mode_weight[link];

    LinkMetrics out;
    out.mse = analytic_mse(state.F, scenario.channels.direct[link], state.Rn,
                           scenario.pilots[link].P, scenario.sy[link], n);
    out.payoff = diagonal_payoff(state.phi, state.mode_gain, state.mode_weight, n);
    out.mui_watts = std::max(0.0, (state.Rn.real().trace() -
                                   rx_dim * scenario.channels.sigma2) /
                                      cfg.channel_uses);
    out.power = state.phi.sum();
    return out;
}

}  // namespace

GameResult run_game(const Scenario& scenario, const GameConfig& config, std::uint64_t seed) {
    config.validate();
    const int n_links = scenario.link_count();
    if (static_cast<int>(scenario.trunc.size()) != n_links)
        throw ConfigError("run_game: scenario not finalized");

    GameResult result;
    result.states.resize(n_links);
    std::vector<Eigen::MatrixXcd> precoders(n_links);
    for (int l = 0; l < n_links; ++l) {
        const LinkConfig& cfg = scenario.links[l];
        auto rng = make_engine(mix_seed(seed, "init", static_cast<std::uint64_t>(l)));
        Eigen::MatrixXcd f0 =
            complex_gaussian_matrix(cfg.mode_count(), cfg.tx_complex_dim(), rng);
        f0 *= std::sqrt(cfg.power_budget() / f0.squaredNorm());
        result.states[l].F = f0;
        precoders[l] = std::move(f0);
        // The blend needs powers before the first best response; spread the
        // budget uniformly. Irrelevant when gamma0 = 1 (first step overwrites).
        result.states[l].phi = Eigen::VectorXd::Constant(
            cfg.mode_count(), cfg.power_budget() / cfg.mode_count());
    }

    double gamma = config.gamma0;
    GameTrace& trace = result.trace;
    for (int t = 1; t <= config.max_iterations; ++t) {
        double residual = 0.0;

        auto commit = [&](int l, const Eigen::VectorXd& phi_hat) {
            TransceiverState& st = result.states[l];
            Eigen::VectorXd phi_next = step_blend(st.phi, phi_hat, gamma);
            residual = std::max(residual, (phi_next - st.phi).cwiseAbs().maxCoeff());
            st.phi = std::move(phi_next);
            st.F = assemble_precoder(st.V, st.phi, scenario.trunc[l].q);
            precoders[l] = st.F;
        };

        // The strategic variable is phi alone: the first sweep pins each
        // link's assembly basis, later sweeps move the powers only. Inside
        // near-degenerate eigenvalue clusters of R_H the eigenbasis is
        // discontinuous in the rivals' precoders, so re-extracting it every
        // iteration sustains a rotation of the committed precoders that never
        // decays even when the powers have stopped moving; a pinned basis
        // makes the best-response map continuous in phi and the damped
        // iteration contracts.
        if (t == 1) {
            if (config.scheme == Scheme::gauss_seidel) {
                for (int l = 0; l < n_links; ++l) {
                    const BestResponse br = best_response(scenario, l, precoders);
                    result.states[l].V = br.v;
                    commit(l, br.phi_hat);
                }
            } else {
                std::vector<BestResponse> responses(n_links);
                parallel_for(static_cast<std::size_t>(n_links), config.workers,
                             [&](std::size_t l) {
                                 responses[l] = best_response(
                                     scenario, static_cast<int>(l), precoders);
                             });
                for (int l = 0; l < n_links; ++l) {
                    result.states[l].V = responses[l].v;
                    commit(l, responses[l].phi_hat);
                }
            }
        } else if (config.scheme == Scheme::gauss_seidel) {
            for (int l = 0; l < n_links; ++l)
                commit(l, best_response_powers(scenario, l, precoders));
        } else {
            std::vector<Eigen::VectorXd> hats(n_links);
            parallel_for(static_cast<std::size_t>(n_links), config.workers,
                         [&](std::size_t l) {
                             hats[l] = best_response_powers(scenario,
                                                            static_cast<int>(l), precoders);
                         });
            for (int l = 0; l < n_links; ++l) commit(l, hats[l]);
        }

        IterationRecord rec;
        rec.iteration = t;
        rec.step_size = gamma;
        rec.residual = residual;
        rec.mse.resize(n_links);
        rec.payoff.resize(n_links);
        rec.mui_watts.resize(n_links);
        rec.power_used.resize(n_links);
        for (int l = 0; l < n_links; ++l) {
            const LinkMetrics m = committed_metrics(scenario, l, precoders, result.states[l]);
            rec.mse(l) = m.mse;
            rec.payoff(l) = m.payoff;
            rec.mui_watts(l) = m.mui_watts;
            rec.power_used(l) = m.power;
        }
        trace.per_iteration.push_back(std::move(rec));

        gamma = step_size_update(gamma, config.epsilon);
        if (residual < config.tolerance) {
            trace.converged = true;
            trace.iterations_used = t;
            break;
        }
    }
    if (!trace.converged) trace.iterations_used = config.max_iterations;
    return result;
}

NashReport verify_nash(const std::vector<TransceiverState>& states, const Scenario& scenario,
                       int trials, double ne_tolerance, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("verify_nash: trials must be >= 1");
    if (ne_tolerance < 0.0)
        throw std::invalid_argument("verify_nash: tolerance must be >= 0");
    const int n_links = scenario.link_count();
    if (static_cast<int>(states.size()) != n_links)
        throw std::invalid_argument("verify_nash: state count mismatch");

    std::vector<Eigen::MatrixXcd> precoders(n_links);
    for (int l = 0; l < n_links; ++l) precoders[l] = states[l].F;

    NashReport report;
    report.players.resize(n_links);
    report.worst_improvement = -std::numeric_limits<double>::infinity();
    report.worst_relative_improvement = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < n_links; ++l) {
        const int n = scenario.pilots[l].count();
        const double budget = scenario.links[l].power_budget();
        const BestResponse br = best_response(scenario, l, precoders);
        const Eigen::VectorXd& weight = scenario.mode_weight[l];

        NashPlayerCheck& check = report.players[l];
        check.payoff_final = diagonal_payoff(states[l].phi, br.mode_gain, weight, n);
        check.payoff_best_candidate =
            diagonal_payoff(br.phi_hat, br.mode_gain, weight, n);

        auto rng = make_engine(mix_seed(seed, "nash", static_cast<std::uint64_t>(l)));
        std::exponential_distribution<double> exp1(1.0);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const Eigen::Index modes = br.mode_gain.size();
        Eigen::VectorXd dev(modes);
        for (int trial = 0; trial < trials; ++trial) {
            double total = 0.0;
            for (Eigen::Index m = 0; m < modes; ++m) {
                dev(m) = exp1(rng);
                total += dev(m);
            }
            const double fraction = u01(rng);
            if (total <= 0.0) continue;
            dev *= budget * fraction / total;
            check.payoff_best_candidate = std::max(
                check.payoff_best_candidate, diagonal_payoff(dev, br.mode_gain, weight, n));
        }
        check.improvement = check.payoff_best_candidate - check.payoff_final;
        check.relative_improvement =
            check.improvement / std::max(std::abs(check.payoff_final), 1e-12);
        report.worst_improvement = std::max(report.worst_improvement, check.improvement);
        report.worst_relative_improvement =
            std::max(report.worst_relative_improvement, check.relative_improvement);
    }
    report.is_ne = report.worst_relative_improvement <= ne_tolerance;
    return report;
}

}  // namespace semeq
