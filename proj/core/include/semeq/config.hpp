#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semeq/game.hpp"
#include "semeq/link.hpp"

namespace semeq {

enum class Method { game, mui_less, mui_agnostic };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

// Either explicit coordinates or the linear-array generator: transmitter i at
// (i·spacing, 0), receiver i at (i·spacing, distance). Adjacent interference
// ratio alpha is then spacing/distance.
struct TopologyConfig {
    bool has_positions = false;
    std::vector<Eigen::Vector2d> tx_positions;
    std::vector<Eigen::Vector2d> rx_positions;
    double tx_rx_distance = 30.0;  // meters, generator form
    double tx_spacing = 90.0;      // meters, generator form
    double path_loss_exponent = 2.5;
    double rice_factor = 1.5;
    double reference_distance = 1.0;
    // Recorded for the record only; the gain model never consumes it.
    double carrier_frequency_ghz = 3.5;
    // Receive SNR of the intended link at its design distance. The noise
    // power derives from it: sigma2 = maxPower·gain(distance)/10^(snrDb/10).
    double snr_db = 10.0;
};

struct LatentConfig {
    int shared_dim = 16;
    int class_count = 10;
    double class_separation = 4.0;
    double noise_std = 0.25;
    int pilot_count = 4096;
    int test_count = 512;
    // When set, pilot and test matrices are loaded from this directory
    // instead of being synthesized (see README for the file layout).
    std::string import_dir;
};

struct ExperimentConfig {
    std::vector<Method> methods{Method::game, Method::mui_less, Method::mui_agnostic};
    std::vector<std::uint64_t> seeds{27, 42, 100, 123, 144, 200};
    std::vector<double> xi_values{0.01, 0.05, 0.10, 0.25, 0.50, 1.0};
    std::vector<double> alpha_values{1, 2, 3, 5, 10, 40};
};

struct OutputConfig {
    std::string directory = "out";
    bool write_matrices = true;
    bool write_pilots = false;
};

struct ScenarioConfig {
    TopologyConfig topology;
    std::vector<LinkConfig> links;
    LatentConfig latent;
    GameConfig game;
    ExperimentConfig experiment;
    OutputConfig output;

    void validate() const;
};

// Strict JSON parsing: defaults applied, unknown keys rejected, every error
// message carries the offending field path. parse_config_text exists so tests
// can exercise the parser without touching the filesystem.
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin);

// Canonical serialized form: defaults materialized, keys sorted. Feeding the
// output back through the parser reproduces the same canonical text, and the
// config hash is the FNV-1a of this string.
std::string canonical_config(const ScenarioConfig& config);
std::uint64_t config_hash(const ScenarioConfig& config);

}  // namespace semeq
