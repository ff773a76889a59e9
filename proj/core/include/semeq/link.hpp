#pragma once

#include <string>

namespace semeq {

// Static per-link parameters. Latent dimensions count real-valued features;
// the complex symbol dimension is half of that after pairing.
struct LinkConfig {
    int tx_latent_dim = 0;   // d, must be even
    int rx_latent_dim = 0;   // m, must be even
    int tx_antennas = 8;     // N_T
    int rx_antennas = 8;     // N_R
    int channel_uses = 10;   // K, channel uses spent per semantic symbol
    double max_power = 1.0;  // P_max, watts per channel use

    int tx_complex_dim() const { return tx_latent_dim / 2; }
    int rx_complex_dim() const { return rx_latent_dim / 2; }

    // One semantic symbol occupies K·N_T transmit dimensions; these are the
    // power-allocation modes.
    int mode_count() const { return channel_uses * tx_antennas; }

    // Total power constraint: trace(F·Fᴴ) ≤ K·P_max.
    double power_budget() const { return channel_uses * max_power; }

    // xi = K / (d/2), the fraction of the complex latent dimension that gets
    // its own channel use; 1 means no compression.
    double compression_factor() const {
        return static_cast<double>(channel_uses) / tx_complex_dim();
    }

    // Throws ConfigError with `where` as the field path prefix.
    void validate(const std::string& where) const;
};

}  // namespace semeq
