#include "semeq/link.hpp"

#include <algorithm>

#include "semeq/errors.hpp"

namespace semeq {

void LinkConfig::validate(const std::string& where) const {
    if (tx_latent_dim < 2 || tx_latent_dim % 2 != 0)
        throw ConfigError(where + ".txLatentDim: must be even and >= 2, got " +
                          std::to_string(tx_latent_dim));
    if (rx_latent_dim < 2 || rx_latent_dim % 2 != 0)
        throw ConfigError(where + ".rxLatentDim: must be even and >= 2, got " +
                          std::to_string(rx_latent_dim));
    if (tx_antennas < 1)
        throw ConfigError(where + ".txAntennas: must be >= 1");
    if (rx_antennas < 1)
        throw ConfigError(where + ".rxAntennas: must be >= 1");
    if (channel_uses < 1)
        throw ConfigError(where + ".channelUses: must be >= 1");
    if (!(max_power > 0.0))
        throw ConfigError(where + ".maxPower: must be > 0");
    // The precoder has K·N_T rows and the truncation rank equals K·N_T, so it
    // cannot exceed either complex latent dimension.
    const int cap = std::min(tx_complex_dim(), rx_complex_dim());
    if (mode_count() > cap)
        throw ConfigError(where + ": K*N_T = " + std::to_string(mode_count()) +
                          " exceeds min(d/2, m/2) = " + std::to_string(cap));
}

}  // namespace semeq
