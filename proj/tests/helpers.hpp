#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "semeq/config.hpp"
#include "semeq/experiment.hpp"
#include "semeq/rng.hpp"
#include "semeq/scenario.hpp"
#include "semeq/semantics.hpp"

namespace testutil {

// Small deterministic fixtures shared by the test binaries. Dimensions are
// kept tiny so every property check runs in milliseconds.

inline semeq::ScenarioConfig small_config(int link_count, double alpha = 3.0) {
    semeq::ScenarioConfig c;
    semeq::LinkConfig link;
    link.tx_latent_dim = 16;
    link.rx_latent_dim = 16;
    link.tx_antennas = 2;
    link.rx_antennas = 2;
    link.channel_uses = 3;
    c.links.assign(link_count, link);
    c.topology.tx_rx_distance = 30.0;
    c.topology.tx_spacing = alpha * c.topology.tx_rx_distance;
    c.latent.shared_dim = 8;
    c.latent.pilot_count = 64;
    c.latent.test_count = 64;
    c.game.max_iterations = 400;
    c.experiment.seeds = {42};
    return c;
}

inline semeq::Scenario small_scenario(int link_count, std::uint64_t seed,
                                      double alpha = 3.0) {
    return semeq::build_scenario(small_config(link_count, alpha), seed);
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// One synthetic single-link problem for the transceiver closed forms: random
// channel, precoder, interference-bearing Rn, whitened pilots.
struct Instance {
    Eigen::MatrixXcd h;   // rx_dim x tx_dim
    Eigen::MatrixXcd f;   // tx_dim x d_half
    Eigen::MatrixXcd rn;  // rx_dim x rx_dim, Hermitian, > sigma2 I
    Eigen::MatrixXcd x;   // d_half x n, whitened
    Eigen::MatrixXcd y;   // m_half x n
    Eigen::MatrixXcd p;   // m_half x d_half
    int n = 0;
    double sy = 0;
};

inline Instance random_instance(std::uint64_t seed, int rx_dim = 4, int tx_dim = 3,
                                int d_half = 3, int m_half = 4, int n = 16) {
    auto rng = semeq::make_engine(semeq::mix_seed(seed, "test-instance"));
    Instance inst;
    inst.n = n;
    inst.h = semeq::complex_gaussian_matrix(rx_dim, tx_dim, rng);
    inst.f = 0.7 * semeq::complex_gaussian_matrix(tx_dim, d_half, rng);
    const Eigen::MatrixXcd b = semeq::complex_gaussian_matrix(rx_dim, rx_dim, rng);
    inst.rn = (b * b.adjoint()) / rx_dim +
              0.3 * Eigen::MatrixXcd::Identity(rx_dim, rx_dim);
    inst.x = semeq::whiten(semeq::complex_gaussian_matrix(d_half, n, rng)).x;
    inst.y = semeq::complex_gaussian_matrix(m_half, n, rng);
    inst.p = semeq::cross_covariance(inst.x, inst.y);
    inst.sy = inst.y.squaredNorm();
    return inst;
}

}  // namespace testutil
