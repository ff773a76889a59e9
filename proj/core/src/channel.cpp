#include "semeq/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "semeq/errors.hpp"
#include "semeq/rng.hpp"

namespace semeq {

double Topology::tx_tx_distance(int i, int j) const {
    return (tx_positions.at(i) - tx_positions.at(j)).norm();
}

double Topology::tx_rx_distance(int tx, int rx) const {
    return (tx_positions.at(tx) - rx_positions.at(rx)).norm();
}

double Topology::interference_ratio(int i, int j) const {
    return tx_tx_distance(i, j) / tx_rx_distance(i, i);
}

void Topology::validate() const {
    if (tx_positions.size() != rx_positions.size())
        throw ConfigError("topology: " + std::to_string(tx_positions.size()) +
                          " transmitters vs " + std::to_string(rx_positions.size()) +
                          " receivers");
    if (tx_positions.empty()) throw ConfigError("topology: no links");
    if (path_loss_exponent < 0.0)
        throw ConfigError("topology.pathLossExponent: must be >= 0");
    if (rice_factor < 0.0) throw ConfigError("topology.riceFactor: must be >= 0");
    if (reference_distance <= 0.0)
        throw ConfigError("topology.referenceDistance: must be > 0");
    if (!(noise_power > 0.0)) throw ConfigError("topology.noisePower: must be > 0");
    const int n = link_count();
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
            if (tx_rx_distance(i, l) <= 0.0)
                throw ConfigError("topology: transmitter " + std::to_string(i) +
                                  " and receiver " + std::to_string(l) +
                                  " coincide");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (tx_tx_distance(i, j) <= 0.0)
                throw ConfigError("topology: transmitters " + std::to_string(i) +
                                  " and " + std::to_string(j) + " coincide");
}

const Eigen::MatrixXcd& ChannelSet::cross_channel(int source, int dest) const {
    const auto it = cross.find({source, dest});
    if (it == cross.end())
        throw std::invalid_argument("no cross channel (" + std::to_string(source) +
                                    "," + std::to_string(dest) + ")");
    return it->second;
}

double path_loss_gain(double distance, double eta, double ref_distance) {
    if (!(distance > 0.0)) throw std::invalid_argument("path_loss_gain: distance must be > 0");
    if (!(ref_distance > 0.0))
        throw std::invalid_argument("path_loss_gain: reference distance must be > 0");
    if (eta < 0.0) throw std::invalid_argument("path_loss_gain: exponent must be >= 0");
    return std::pow(ref_distance / std::max(distance, ref_distance), eta);
}

Eigen::MatrixXcd rician_matrix(int n_rx, int n_tx, double kappa, double gain,
                               std::uint64_t seed) {
    if (n_rx < 1 || n_tx < 1)
        throw std::invalid_argument("rician_matrix: dimensions must be >= 1");
    if (kappa < 0.0) throw std::invalid_argument("rician_matrix: kappa must be >= 0");
    if (!(gain > 0.0)) throw std::invalid_argument("rician_matrix: gain must be > 0");
    auto rng = make_engine(seed);
    // Deterministic fraction kappa/(1+kappa) of the power rides the all-ones
    // LOS matrix; the rest is i.i.d. scattering. E|entry|^2 = gain either way.
    const double los = std::sqrt(kappa / (1.0 + kappa));
    const double nlos = std::sqrt(1.0 / (1.0 + kappa));
    Eigen::MatrixXcd h = complex_gaussian_matrix(n_rx, n_tx, rng) * nlos;
    h.array() += los;
    return std::sqrt(gain) * h;
}

Eigen::MatrixXcd kronecker_lift(const Eigen::MatrixXcd& base, int uses) {
    if (uses < 1) throw std::invalid_argument("kronecker_lift: K must be >= 1");
    const Eigen::Index r = base.rows();
    const Eigen::Index c = base.cols();
    Eigen::MatrixXcd lifted = Eigen::MatrixXcd::Zero(uses * r, uses * c);
    for (int k = 0; k < uses; ++k) lifted.block(k * r, k * c, r, c) = base;
    return lifted;
}

ChannelSet build_channel_set(const Topology& topology, const std::vector<LinkConfig>& links,
                             std::uint64_t seed) {
    topology.validate();
    const int n = topology.link_count();
    if (static_cast<int>(links.size()) != n)
        throw ConfigError("links: " + std::to_string(links.size()) + " entries for " +
                          std::to_string(n) + " topology links");
    for (int l = 0; l < n; ++l) links[l].validate("links[" + std::to_string(l) + "]");
    for (int l = 1; l < n; ++l)
        if (links[l].channel_uses != links[0].channel_uses)
            throw ConfigError("links[" + std::to_string(l) +
                              "].channelUses: all links must share K (cross-channel "
                              "lifts are per channel use)");

    ChannelSet set;
    set.sigma2 = topology.noise_power;
    set.direct.resize(n);
    for (int src = 0; src < n; ++src) {
        for (int dst = 0; dst < n; ++dst) {
            const double gain = path_loss_gain(topology.tx_rx_distance(src, dst),
                                               topology.path_loss_exponent,
                                               topology.reference_distance);
            const std::uint64_t pair_seed =
                mix_seed(seed, "channel", static_cast<std::uint64_t>(src) * n + dst);
            Eigen::MatrixXcd base = rician_matrix(
                links[dst].rx_antennas, links[src].tx_antennas, topology.rice_factor,
                gain, pair_seed);
            Eigen::MatrixXcd lifted = kronecker_lift(base, links[src].channel_uses);
            if (src == dst)
                set.direct[src] = std::move(lifted);
            else
                set.cross[{src, dst}] = std::move(lifted);
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) set.alpha[{i, j}] = topology.interference_ratio(i, j);
    return set;
}

}  // namespace semeq
