#include "semeq/scenario.hpp"

#include <string>

#include "semeq/errors.hpp"

namespace semeq {

void Scenario::finalize() {
    const int n = link_count();
    if (n == 0) throw ConfigError("scenario: no links");
    if (channels.link_count() != n)
        throw ConfigError("scenario: " + std::to_string(channels.link_count()) +
                          " channel entries for " + std::to_string(n) + " links");
    if (static_cast<int>(pilots.size()) != n)
        throw ConfigError("scenario: " + std::to_string(pilots.size()) +
                          " pilot sets for " + std::to_string(n) + " links");
    if (!test.empty() && static_cast<int>(test.size()) != n)
        throw ConfigError("scenario: test sets must be absent or one per link");
    if (!(channels.sigma2 > 0.0)) throw ConfigError("scenario: sigma2 must be > 0");

    trunc.clear();
    mode_weight.clear();
    sy.clear();
    trunc.reserve(n);
    mode_weight.reserve(n);
    sy.reserve(n);
    for (int l = 0; l < n; ++l) {
        const std::string where = "links[" + std::to_string(l) + "]";
        links[l].validate(where);
        if (l > 0 && links[l].channel_uses != links[0].channel_uses)
            throw ConfigError(where + ".channelUses: all links must share K");
        const auto& pl = pilots[l];
        if (pl.X.rows() != links[l].tx_complex_dim())
            throw ConfigError(where + ": pilot X has " + std::to_string(pl.X.rows()) +
                              " rows, expected d/2 = " +
                              std::to_string(links[l].tx_complex_dim()));
        if (pl.Y.rows() != links[l].rx_complex_dim())
            throw ConfigError(where + ": pilot Y has " + std::to_string(pl.Y.rows()) +
                              " rows, expected m/2 = " +
                              std::to_string(links[l].rx_complex_dim()));
        if (pl.X.cols() != pl.Y.cols() || pl.count() < 1)
            throw ConfigError(where + ": inconsistent pilot counts");
        const int rx_size = links[l].channel_uses * links[l].rx_antennas;
        const int tx_size = links[l].mode_count();
        if (channels.direct[l].rows() != rx_size || channels.direct[l].cols() != tx_size)
            throw ConfigError(where + ": direct channel is " +
                              std::to_string(channels.direct[l].rows()) + "x" +
                              std::to_string(channels.direct[l].cols()) + ", expected " +
                              std::to_string(rx_size) + "x" + std::to_string(tx_size));
        for (int j = 0; j < n; ++j) {
            if (j == l) continue;
            const auto& h = channels.cross_channel(j, l);
            const int cols = links[j].mode_count();
            if (h.rows() != rx_size || h.cols() != cols)
                throw ConfigError("scenario: cross channel (" + std::to_string(j) + "," +
                                  std::to_string(l) + ") has wrong shape");
        }
        trunc.push_back(truncate(pl.P, links[l].mode_count()));
        mode_weight.push_back(trunc.back().sigma.array().square() /
                              static_cast<double>(pl.count()));
        sy.push_back(pl.target_energy());
    }
}

}  // namespace semeq
