#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "semeq/scenario.hpp"
#include "semeq/transceiver.hpp"

namespace semeq {

enum class Scheme { gauss_seidel, jacobi };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct GameConfig {
    Scheme scheme = Scheme::gauss_seidel;
    int max_iterations = 1000;
    double tolerance = 1e-5;  // termination threshold on max-norm power change
    double gamma0 = 1.0;      // initial step size, in (0, 1]
    double epsilon = 0.01;    // step-size decay, in (0, 1]
    int ne_check_trials = 200;
    double ne_tolerance = 1e-6;  // relative payoff slack in verify_nash
    unsigned workers = 1;        // Jacobi best-response parallelism

    void validate() const;
};

struct IterationRecord {
    int iteration = 0;     // 1-based
    double step_size = 0;  // gamma used for this iteration's blends
    double residual = 0;   // max over players of ‖φ_new − φ_old‖_inf
    Eigen::VectorXd mse;         // per player, committed profile
    Eigen::VectorXd payoff;      // per player, committed profile
    Eigen::VectorXd mui_watts;   // per player, per channel use
    Eigen::VectorXd power_used;  // per player, Σφ
};

struct GameTrace {
    std::vector<IterationRecord> per_iteration;
    bool converged = false;
    int iterations_used = 0;
};

struct GameResult {
    std::vector<TransceiverState> states;
    GameTrace trace;
};

// Bisects for the water level mu on (0, mu_max] where mu_max = max σ̃²λ/n;
// total allocated power is monotone non-increasing in mu. Throws
// std::invalid_argument when no mode has positive gain and weight (the
// degenerate problem; callers allocate zero instead).
double waterfill_mu(const Eigen::VectorXd& lambda, const Eigen::VectorXd& sigma_tilde2,
                    int pilot_count, double budget);

// phi_m = [(σ̃_m·sqrt(λ_m/(n·mu)) − 1)/λ_m]_+, with dead modes (λ_m = 0 or
// σ̃²_m = 0) pinned to zero. Exhausts the budget whenever any mode is live.
Eigen::VectorXd waterfill(const Eigen::VectorXd& lambda, const Eigen::VectorXd& sigma_tilde2,
                          int pilot_count, double budget);

// One player's payoff-maximizing power vector against a frozen snapshot of
// rival precoders: rebuild Rn, the effective channel covariance and its
// eigenmodes, then water-fill over the diagonal domain (mode gains n·eig(R_H)
// paired index-wise with the cached σ̃² weights, both descending).
struct BestResponse {
    Eigen::VectorXd phi_hat;
    Eigen::MatrixXcd v;          // eigenbasis of the effective channel covariance
    Eigen::VectorXd mode_gain;   // diagonal-domain λ
    Eigen::MatrixXcd rn;         // MUIN covariance the response was computed against
};
BestResponse best_response(const Scenario& scenario, int link,
                           const std::vector<Eigen::MatrixXcd>& precoders);

// phi + gamma·(phi_hat − phi): stays feasible because both endpoints are.
Eigen::VectorXd step_blend(const Eigen::VectorXd& phi, const Eigen::VectorXd& phi_hat,
                           double gamma);

// gamma·(1 − epsilon·gamma), clamped below at 1e-6 so the sequence never
// stalls at zero.
double step_size_update(double gamma, double epsilon);

// Algorithm: start from complex-Gaussian precoders scaled to the full power
// budget, then iterate best responses under the chosen scheme with the
// diminishing step size until the committed power change drops below
// tolerance or max_iterations is hit. Each link's assembly basis is pinned at
// its first best response, so the iterate moves through the powers alone.
// Per-iteration metrics are evaluated on the committed profile (fresh Rn and
// Wiener G for every player).
GameResult run_game(const Scenario& scenario, const GameConfig& config, std::uint64_t seed);

struct NashPlayerCheck {
    double payoff_final = 0;
    double payoff_best_candidate = 0;  // max over exact BR and random deviations
    double improvement = 0;            // payoff_best_candidate − payoff_final
    double relative_improvement = 0;
};

struct NashReport {
    bool is_ne = false;
    double worst_improvement = 0;           // absolute, max over players
    double worst_relative_improvement = 0;  // what is_ne is judged on
    std::vector<NashPlayerCheck> players;
};

// Equilibrium audit: each player's committed payoff is compared against its
// exact best response and `trials` random feasible deviations (exponential
// simplex directions scaled by a uniform budget fraction). is_ne holds when
// no candidate improves the payoff by more than ne_tolerance relative.
NashReport verify_nash(const std::vector<TransceiverState>& states, const Scenario& scenario,
                       int trials, double ne_tolerance, std::uint64_t seed);

}  // namespace semeq
