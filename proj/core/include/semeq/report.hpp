#pragma once

#include <cstdint>
#include <string>

#include "semeq/config.hpp"
#include "semeq/experiment.hpp"
#include "semeq/game.hpp"

namespace semeq {

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

// Text renderers for everything the CLI writes. Every artifact opens with the
// config hash and seed(s) so a result can be reproduced exactly. CSV files
// carry "# key=value" meta lines before the header row; unavailable values
// (MUI dB without rivals, accuracy without a test set) print as "n/a" in CSV
// and null in JSON. Column layouts are documented in the README; the JSON
// summary schema is versioned via schemaVersion.

std::string render_trace_csv(const GameTrace& trace, std::uint64_t config_hash,
                             std::uint64_t seed, Scheme scheme);

std::string render_run_summary(const ScenarioConfig& config, std::uint64_t seed,
                               const GameResult& result, const NashReport& nash,
                               const MethodPoint& point);

std::string render_sweep_csv(const SweepResult& sweep, std::uint64_t config_hash);

std::string render_sweep_summary(const ScenarioConfig& config, const SweepResult& sweep);

}  // namespace semeq
