#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "semeq/link.hpp"

namespace semeq {

// Physical deployment: transmitter/receiver coordinates in meters plus the
// propagation parameters shared by all links.
struct Topology {
    std::vector<Eigen::Vector2d> tx_positions;
    std::vector<Eigen::Vector2d> rx_positions;
    double path_loss_exponent = 2.5;  // eta
    double rice_factor = 1.5;         // kappa
    double reference_distance = 1.0;  // meters, unit gain at or below this
    double noise_power = 0.0;         // sigma^2, watts

    int link_count() const { return static_cast<int>(tx_positions.size()); }
    double tx_tx_distance(int i, int j) const;
    double tx_rx_distance(int tx, int rx) const;

    // alpha(i,j) = d(T_i, T_j) / d(T_i, R_i): how far rival j's transmitter
    // sits relative to link i's own span. Large alpha means weak coupling.
    double interference_ratio(int i, int j) const;

    void validate() const;
};

// One fixed fading snapshot for the whole deployment, lifted over K channel
// uses. Immutable after build; safe to share across threads.
struct ChannelSet {
    std::vector<Eigen::MatrixXcd> direct;                  // direct[l] = H_{l,l}
    std::map<std::pair<int, int>, Eigen::MatrixXcd> cross; // (source j, dest l), j != l
    std::map<std::pair<int, int>, double> alpha;           // all ordered pairs i != j
    double sigma2 = 0.0;

    int link_count() const { return static_cast<int>(direct.size()); }
    const Eigen::MatrixXcd& cross_channel(int source, int dest) const;
};

// Free-space-style power gain (ref / max(dist, ref))^eta, clamped to 1 at and
// below the reference distance.
double path_loss_gain(double distance, double eta, double ref_distance);

// Rician flat-fading draw: sqrt(gain)·(sqrt(kappa/(1+kappa))·L +
// sqrt(1/(1+kappa))·W) with L the all-ones line-of-sight matrix and W i.i.d.
// CN(0,1). kappa = 0 degenerates to Rayleigh, kappa → inf to pure LOS.
Eigen::MatrixXcd rician_matrix(int n_rx, int n_tx, double kappa, double gain,
                               std::uint64_t seed);

// I_K ⊗ base: block-diagonal with K identical copies, one per channel use.
Eigen::MatrixXcd kronecker_lift(const Eigen::MatrixXcd& base, int uses);

// Draws every direct and cross matrix for the deployment. Each ordered
// (source, dest) pair gets its own seed-derived stream, so the set is
// reproducible and insensitive to generation order.
ChannelSet build_channel_set(const Topology& topology, const std::vector<LinkConfig>& links,
                             std::uint64_t seed);

}  // namespace semeq
