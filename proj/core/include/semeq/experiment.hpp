#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "semeq/config.hpp"
#include "semeq/game.hpp"
#include "semeq/scenario.hpp"

namespace semeq {

// Interference power hitting one receiver, per channel use:
// trace(Σ_j (H_j·F_j)(H_j·F_j)ᴴ)/K in watts. The dB form returns -inf when
// there are no rivals; report it as "n/a".
double mui_power_watts(const std::vector<const Eigen::MatrixXcd*>& cross_channels,
                       const std::vector<const Eigen::MatrixXcd*>& rival_precoders,
                       int channel_uses);
double mui_power_db(const std::vector<const Eigen::MatrixXcd*>& cross_channels,
                    const std::vector<const Eigen::MatrixXcd*>& rival_precoders,
                    int channel_uses);

// Interference-free bound: every link designed AND evaluated with Rn = σ²I.
// The returned states carry σ²I as their evaluation covariance.
std::vector<TransceiverState> mui_less_baseline(const Scenario& scenario);

// Interference-blind design (same closed form as mui_less_baseline), but the
// returned states carry the TRUE MUIN covariance produced by all the blind
// precoders, so evaluating them exposes the unorthogonalized interference.
std::vector<TransceiverState> mui_agnostic_baseline(const Scenario& scenario);

// MSE of each link under its state's own evaluation covariance:
// direct_objective(F, G, Rn). For game and mui_less states G is the Wiener
// solution for that Rn; for mui_agnostic it deliberately is not.
Eigen::VectorXd evaluate_mse(const Scenario& scenario,
                             const std::vector<TransceiverState>& states);

struct TaskAccuracy {
    double network = 0;        // mean over links
    Eigen::VectorXd per_link;  // fraction correct per link
};

// Sends every held-out latent through precoder, channel, additive rival
// interference (when enabled) and noise, equalizes, unpairs, and classifies
// by nearest receiver-space class mean.
TaskAccuracy task_proxy_accuracy(const Scenario& scenario,
                                 const std::vector<TransceiverState>& states,
                                 bool with_interference, std::uint64_t seed);

enum class SweepAxis { compression_xi, alpha_scaling };

struct MethodPoint {
    double axis_value = 0;
    Method method = Method::game;
    std::uint64_t seed = 0;
    bool converged = true;           // baselines are single-pass, always true
    Eigen::VectorXd player_mse;      // linear
    Eigen::VectorXd player_mse_db;
    double network_mse_db = 0;       // 10·log10(mean linear MSE)
    double accuracy = 0;             // network task-proxy accuracy
    double mui_db = 0;               // network MUI, -inf when interference free
};

struct SweepResult {
    SweepAxis axis = SweepAxis::alpha_scaling;
    std::vector<double> axis_values;
    std::vector<Method> methods;
    std::vector<std::uint64_t> seeds;
    std::vector<MethodPoint> points;  // one per (axisValue, method, seed)
};

// Deterministic scenario assembly from a validated config: topology (explicit
// or generated), noise power from the configured SNR, channel snapshot,
// per-link latents (synthesized or imported), and the finalize() caches.
Topology build_topology(const ScenarioConfig& config);
Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

// Runs one (scenario, method) cell: the game for Method::game, the closed
// forms otherwise. game_seed feeds initialization and the task-proxy draws.
struct CellResult {
    std::vector<TransceiverState> states;
    GameTrace trace;  // empty for baselines
    MethodPoint point;
};
CellResult run_cell(const Scenario& scenario, const ScenarioConfig& config, Method method,
                    std::uint64_t seed);

// ξ sweep: every ξ must map to an integer channel-use count K = ξ·d/2 that
// satisfies K·N_T ≤ min(d/2, m/2); offenders are rejected up front with the
// list of valid values.
SweepResult sweep_compression(const ScenarioConfig& config);

// α sweep: regenerates the linear-array topology with spacing α·distance for
// each value. Requires the generator topology (explicit positions make α
// meaningless).
SweepResult sweep_alpha(const ScenarioConfig& config);

}  // namespace semeq
