#pragma once

#include <Eigen/Dense>
#include <vector>

#include "semeq/channel.hpp"
#include "semeq/link.hpp"
#include "semeq/semantics.hpp"

namespace semeq {

// Everything fixed for the duration of one game: the channel snapshot, the
// pilot sets, and the per-link decompositions that do not depend on the power
// allocation. Immutable once finalized; the game engine only reads it.
struct Scenario {
    std::vector<LinkConfig> links;
    ChannelSet channels;
    std::vector<SemanticPilots> pilots;
    std::vector<TestSet> test;

    // Filled by finalize(). The truncation of P at rank K·N_T is power
    // independent, so it is computed once per link. mode_weight holds the
    // diagonal-domain weights σ̃² = (singular values)²/n; sy caches trace(YYᴴ).
    std::vector<Truncation> trunc;
    std::vector<Eigen::VectorXd> mode_weight;
    std::vector<double> sy;

    int link_count() const { return static_cast<int>(links.size()); }

    // Validates cross-module shape consistency and builds the caches above.
    void finalize();
};

}  // namespace semeq
