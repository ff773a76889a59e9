#include "semeq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "semeq/errors.hpp"
#include "semeq/io.hpp"
#include "semeq/rng.hpp"

namespace semeq {

double mui_power_watts(const std::vector<const Eigen::MatrixXcd*>& cross_channels,
                       const std::vector<const Eigen::MatrixXcd*>& rival_precoders,
                       int channel_uses) {
    if (cross_channels.size() != rival_precoders.size())
        throw std::invalid_argument("mui_power_watts: channel/precoder count mismatch");
    if (channel_uses < 1) throw std::invalid_argument("mui_power_watts: K must be >= 1");
    double total = 0.0;
    for (std::size_t j = 0; j < cross_channels.size(); ++j)
        total += (*cross_channels[j] * *rival_precoders[j]).squaredNorm();
    return total / channel_uses;
}

double mui_power_db(const std::vector<const Eigen::MatrixXcd*>& cross_channels,
                    const std::vector<const Eigen::MatrixXcd*>& rival_precoders,
                    int channel_uses) {
    const double watts = mui_power_watts(cross_channels, rival_precoders, channel_uses);
    if (watts <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(watts);
}

namespace {

// The closed-form interference-blind design shared by both baselines: per
// link, water-fill against Rn = σ²I and fit the matching Wiener equalizer.
std::vector<TransceiverState> interference_blind_design(const Scenario& scenario) {
    const int n_links = scenario.link_count();
    if (static_cast<int>(scenario.trunc.size()) != n_links)
        throw ConfigError("baseline: scenario not finalized");
    std::vector<TransceiverState> states(n_links);
    for (int l = 0; l < n_links; ++l) {
        const LinkConfig& cfg = scenario.links[l];
        const int n = scenario.pilots[l].count();
        const int rx_dim = cfg.channel_uses * cfg.rx_antennas;
        TransceiverState& st = states[l];
        st.Rn = scenario.channels.sigma2 * Eigen::MatrixXcd::Identity(rx_dim, rx_dim);
        EigDescending modes = eig_descending(
            effective_channel_cov(scenario.channels.direct[l], st.Rn, n));
        st.V = std::move(modes.v);
        st.mode_gain = modes.lambda * static_cast<double>(n);
        st.mode_weight = scenario.mode_weight[l];
        st.phi = waterfill(st.mode_gain, st.mode_weight, n, cfg.power_budget());
        st.F = assemble_precoder(st.V, st.phi, scenario.trunc[l].q);
        st.G = wiener_equalizer(scenario.pilots[l].P, scenario.channels.direct[l], st.F,
                                st.Rn, n);
    }
    return states;
}

void gather_rivals(const Scenario& scenario, int link,
                   const std::vector<TransceiverState>& states,
                   std::vector<const Eigen::MatrixXcd*>& cross,
                   std::vector<const Eigen::MatrixXcd*>& rivals) {
    cross.clear();
    rivals.clear();
    for (int j = 0; j < scenario.link_count(); ++j) {
        if (j == link) continue;
        cross.push_back(&scenario.channels.cross_channel(j, link));
        rivals.push_back(&states[j].F);
    }
}

}  // namespace

std::vector<TransceiverState> mui_less_baseline(const Scenario& scenario) {
    return interference_blind_design(scenario);
}

std::vector<TransceiverState> mui_agnostic_baseline(const Scenario& scenario) {
    std::vector<TransceiverState> states = interference_blind_design(scenario);
    // Same F and G, but the evaluation covariance is the real one produced by
    // everyone's blind precoders.
    std::vector<const Eigen::MatrixXcd*> cross;
    std::vector<const Eigen::MatrixXcd*> rivals;
    for (int l = 0; l < scenario.link_count(); ++l) {
        const LinkConfig& cfg = scenario.links[l];
        gather_rivals(scenario, l, states, cross, rivals);
        states[l].Rn = muin_covariance(cross, rivals, scenario.channels.sigma2,
                                       cfg.channel_uses * cfg.rx_antennas);
    }
    return states;
}

Eigen::VectorXd evaluate_mse(const Scenario& scenario,
                             const std::vector<TransceiverState>& states) {
    const int n_links = scenario.link_count();
    if (static_cast<int>(states.size()) != n_links)
        throw std::invalid_argument("evaluate_mse: state count mismatch");
    Eigen::VectorXd mse(n_links);
    for (int l = 0; l < n_links; ++l) {
        const SemanticPilots& pl = scenario.pilots[l];
        mse(l) = direct_objective(states[l].F, states[l].G, scenario.channels.direct[l],
                                  states[l].Rn, pl.X, pl.Y, pl.count());
    }
    return mse;
}

TaskAccuracy task_proxy_accuracy(const Scenario& scenario,
                                 const std::vector<TransceiverState>& states,
                                 bool with_interference, std::uint64_t seed) {
    const int n_links = scenario.link_count();
    if (static_cast<int>(states.size()) != n_links)
        throw std::invalid_argument("task_proxy_accuracy: state count mismatch");
    if (static_cast<int>(scenario.test.size()) != n_links)
        throw std::invalid_argument("task_proxy_accuracy: scenario has no test sets");

    TaskAccuracy out;
    out.per_link.resize(n_links);
    const double noise_scale = std::sqrt(scenario.channels.sigma2);
    for (int l = 0; l < n_links; ++l) {
        const TestSet& test = scenario.test[l];
        const int count = test.count();
        if (count == 0)
            throw std::invalid_argument("task_proxy_accuracy: empty test set on link " +
                                        std::to_string(l));
        // Intended signal for all samples at once.
        Eigen::MatrixXcd received =
            scenario.channels.direct[l] * (states[l].F * test.x_whitened);
        if (with_interference) {
            for (int j = 0; j < n_links; ++j) {
                if (j == l) continue;
                const TestSet& rival = scenario.test[j];
                if (rival.count() == 0)
                    throw std::invalid_argument(
                        "task_proxy_accuracy: rival link " + std::to_string(j) +
                        " has no test symbols to transmit");
                Eigen::MatrixXcd rival_tx(rival.x_whitened.rows(), count);
                for (int t = 0; t < count; ++t)
                    rival_tx.col(t) = rival.x_whitened.col(t % rival.count());
                received += scenario.channels.cross_channel(j, l) *
                            (states[j].F * rival_tx);
            }
        }
        auto rng = make_engine(mix_seed(seed, "task", static_cast<std::uint64_t>(l)));
        for (int t = 0; t < count; ++t)
            for (Eigen::Index r = 0; r < received.rows(); ++r)
                received(r, t) += noise_scale * complex_gaussian(rng);

        const Eigen::MatrixXd decoded =
            unpair_complex_to_real(Eigen::MatrixXcd(states[l].G * received));
        int correct = 0;
        for (int t = 0; t < count; ++t) {
            Eigen::Index best = 0;
            (test.class_means.colwise() - decoded.col(t))
                .colwise()
                .squaredNorm()
                .minCoeff(&best);
            if (static_cast<int>(best) == test.labels[t]) ++correct;
        }
        out.per_link(l) = static_cast<double>(correct) / count;
    }
    out.network = out.per_link.mean();
    return out;
}

Topology build_topology(const ScenarioConfig& config) {
    const int n_links = static_cast<int>(config.links.size());
    Topology topology;
    topology.path_loss_exponent = config.topology.path_loss_exponent;
    topology.rice_factor = config.topology.rice_factor;
    topology.reference_distance = config.topology.reference_distance;
    if (config.topology.has_positions) {
        topology.tx_positions = config.topology.tx_positions;
        topology.rx_positions = config.topology.rx_positions;
        if (static_cast<int>(topology.tx_positions.size()) != n_links)
            throw ConfigError("topology.positions: " +
                              std::to_string(topology.tx_positions.size()) +
                              " transmitters for " + std::to_string(n_links) + " links");
    } else {
        for (int l = 0; l < n_links; ++l) {
            const double x = l * config.topology.tx_spacing;
            topology.tx_positions.push_back({x, 0.0});
            topology.rx_positions.push_back({x, config.topology.tx_rx_distance});
        }
    }
    // Noise from the intended-link receive SNR: sigma2 such that
    // maxPower·gain(d0)/sigma2 hits the configured ratio.
    const double d0 = (topology.tx_positions[0] - topology.rx_positions[0]).norm();
    const double gain = path_loss_gain(d0, topology.path_loss_exponent,
                                       topology.reference_distance);
    topology.noise_power = config.links[0].max_power * gain /
                           std::pow(10.0, config.topology.snr_db / 10.0);
    topology.validate();
    return topology;
}

namespace {

LatentDraw load_latents(const std::string& dir, int link, const LinkConfig& cfg) {
    namespace fs = std::filesystem;
    const std::string base = dir + "/link" + std::to_string(link);
    const fs::path tx_path = base + "_pilot_tx.txt";
    const fs::path rx_path = base + "_pilot_rx.txt";
    Eigen::MatrixXcd x_raw = load_complex_matrix(tx_path);
    Eigen::MatrixXcd y = load_complex_matrix(rx_path);
    if (x_raw.rows() != cfg.tx_complex_dim())
        throw ConfigError(tx_path.string() + ": " + std::to_string(x_raw.rows()) +
                          " rows, expected d/2 = " + std::to_string(cfg.tx_complex_dim()));
    if (y.rows() != cfg.rx_complex_dim())
        throw ConfigError(rx_path.string() + ": " + std::to_string(y.rows()) +
                          " rows, expected m/2 = " + std::to_string(cfg.rx_complex_dim()));
    if (x_raw.cols() != y.cols())
        throw ConfigError(base + ": pilot counts differ between tx and rx files");
    LatentDraw draw;
    WhitenResult white = whiten(x_raw, "links[" + std::to_string(link) + "]");
    draw.pilots.X = std::move(white.x);
    draw.pilots.W = std::move(white.w);
    draw.pilots.Y = std::move(y);
    draw.pilots.P = cross_covariance(draw.pilots.X, draw.pilots.Y);
    // Imported pilots carry no class structure; the task proxy is unavailable.
    return draw;
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    config.validate();
    Scenario scenario;
    scenario.links = config.links;
    scenario.channels = build_channel_set(build_topology(config), config.links, seed);
    for (int l = 0; l < scenario.link_count(); ++l) {
        const LinkConfig& cfg = config.links[l];
        LatentDraw draw;
        if (!config.latent.import_dir.empty()) {
            draw = load_latents(config.latent.import_dir, l, cfg);
        } else {
            const LatentModel model = LatentModel::create(
                config.latent.shared_dim, cfg.tx_latent_dim, cfg.rx_latent_dim,
                config.latent.class_count, config.latent.class_separation,
                config.latent.noise_std,
                mix_seed(seed, "model", static_cast<std::uint64_t>(l)));
            draw = synthesize_latents(model, config.latent.pilot_count,
                                      config.latent.test_count,
                                      mix_seed(seed, "latent", static_cast<std::uint64_t>(l)),
                                      "links[" + std::to_string(l) + "]");
        }
        scenario.pilots.push_back(std::move(draw.pilots));
        scenario.test.push_back(std::move(draw.test));
    }
    scenario.finalize();
    return scenario;
}

CellResult run_cell(const Scenario& scenario, const ScenarioConfig& config, Method method,
                    std::uint64_t seed) {
    CellResult cell;
    switch (method) {
        case Method::game: {
            GameResult result = run_game(scenario, config.game, seed);
            cell.states = std::move(result.states);
            cell.trace = std::move(result.trace);
            cell.point.converged = cell.trace.converged;
            break;
        }
        case Method::mui_less:
            cell.states = mui_less_baseline(scenario);
            break;
        case Method::mui_agnostic:
            cell.states = mui_agnostic_baseline(scenario);
            break;
    }
    MethodPoint& point = cell.point;
    point.method = method;
    point.seed = seed;
    point.player_mse = evaluate_mse(scenario, cell.states);
    point.player_mse_db = 10.0 * point.player_mse.array().log10();
    point.network_mse_db = 10.0 * std::log10(point.player_mse.mean());

    const bool has_test = !scenario.test.empty() && scenario.test[0].count() > 0;
    point.accuracy =
        has_test
            ? task_proxy_accuracy(scenario, cell.states, method != Method::mui_less, seed)
                  .network
            : std::numeric_limits<double>::quiet_NaN();

    if (method == Method::mui_less || scenario.link_count() == 1) {
        point.mui_db = -std::numeric_limits<double>::infinity();
    } else {
        double watts = 0.0;
        std::vector<const Eigen::MatrixXcd*> cross;
        std::vector<const Eigen::MatrixXcd*> rivals;
        for (int l = 0; l < scenario.link_count(); ++l) {
            gather_rivals(scenario, l, cell.states, cross, rivals);
            watts += mui_power_watts(cross, rivals, scenario.links[l].channel_uses);
        }
        watts /= scenario.link_count();
        point.mui_db = watts > 0.0 ? 10.0 * std::log10(watts)
                                   : -std::numeric_limits<double>::infinity();
    }
    return cell;
}

namespace {

SweepResult run_sweep(const ScenarioConfig& config, SweepAxis axis,
                      const std::vector<double>& values,
                      const std::vector<ScenarioConfig>& cell_configs) {
    SweepResult result;
    result.axis = axis;
    result.axis_values = values;
    result.methods = config.experiment.methods;
    result.seeds = config.experiment.seeds;
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (const Method method : result.methods) {
            for (const std::uint64_t seed : result.seeds) {
                const Scenario scenario = build_scenario(cell_configs[i], seed);
                CellResult cell = run_cell(scenario, cell_configs[i], method, seed);
                cell.point.axis_value = values[i];
                result.points.push_back(std::move(cell.point));
            }
        }
    }
    return result;
}

}  // namespace

SweepResult sweep_compression(const ScenarioConfig& config) {
    config.validate();
    // Resolve and validate every xi before any computation.
    std::vector<ScenarioConfig> cells;
    for (const double xi : config.experiment.xi_values) {
        int k = 0;
        for (std::size_t l = 0; l < config.links.size(); ++l) {
            const LinkConfig& cfg = config.links[l];
            const double exact = xi * cfg.tx_complex_dim();
            const int rounded = static_cast<int>(std::lround(exact));
            const bool integral = std::abs(exact - rounded) < 1e-9 && rounded >= 1;
            const bool fits =
                integral && rounded * cfg.tx_antennas <=
                                std::min(cfg.tx_complex_dim(), cfg.rx_complex_dim());
            if (!integral || !fits) {
                std::set<double> valid;
                for (int cand = 1;; ++cand) {
                    if (cand * cfg.tx_antennas >
                        std::min(cfg.tx_complex_dim(), cfg.rx_complex_dim()))
                        break;
                    valid.insert(static_cast<double>(cand) / cfg.tx_complex_dim());
                }
                std::string list;
                for (const double v : valid)
                    list += (list.empty() ? "" : ", ") + format_double(v);
                throw ConfigError("experiment.xiValues: xi = " + format_double(xi) +
                                  " does not give an integral feasible K on links[" +
                                  std::to_string(l) + "]; valid values: " + list);
            }
            if (l == 0)
                k = rounded;
            else if (rounded != k)
                throw ConfigError("experiment.xiValues: xi = " + format_double(xi) +
                                  " maps to different K across links");
        }
        ScenarioConfig cell = config;
        for (LinkConfig& link : cell.links) link.channel_uses = k;
        cells.push_back(std::move(cell));
    }
    return run_sweep(config, SweepAxis::compression_xi, config.experiment.xi_values, cells);
}

SweepResult sweep_alpha(const ScenarioConfig& config) {
    config.validate();
    if (config.topology.has_positions)
        throw ConfigError("experiment.alphaValues: the alpha sweep repositions "
                          "transmitters and needs the generator topology, not explicit "
                          "positions");
    std::vector<ScenarioConfig> cells;
    for (const double alpha : config.experiment.alpha_values) {
        if (!(alpha > 0.0))
            throw ConfigError("experiment.alphaValues: values must be > 0");
        ScenarioConfig cell = config;
        cell.topology.tx_spacing = alpha * cell.topology.tx_rx_distance;
        cells.push_back(std::move(cell));
    }
    return run_sweep(config, SweepAxis::alpha_scaling, config.experiment.alpha_values,
                     cells);
}

}  // namespace semeq
