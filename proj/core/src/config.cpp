#include "semeq/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>

#include <json.hpp>

#include "semeq/errors.hpp"
#include "semeq/io.hpp"

namespace semeq {

using nlohmann::json;

std::string to_string(Method method) {
    switch (method) {
        case Method::game: return "game";
        case Method::mui_less: return "muiLess";
        case Method::mui_agnostic: return "muiAgnostic";
    }
    return "game";
}

Method method_from_string(const std::string& name) {
    if (name == "game") return Method::game;
    if (name == "muiLess") return Method::mui_less;
    if (name == "muiAgnostic") return Method::mui_agnostic;
    throw ConfigError("method: expected 'game', 'muiLess' or 'muiAgnostic', got '" + name +
                      "'");
}

namespace {

// Tracks which keys a section consumed so leftovers can be rejected by name.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    const std::string& path() const { return path_; }

    const json* find(const std::string& key) {
        used_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number())
            throw ConfigError(path_ + "." + key + ": expected a number");
        return v->get<double>();
    }

    int integer(const std::string& key, int fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer())
            throw ConfigError(path_ + "." + key + ": expected an integer");
        return v->get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean())
            throw ConfigError(path_ + "." + key + ": expected true or false");
        return v->get<bool>();
    }

    std::string text(const std::string& key, std::string fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string())
            throw ConfigError(path_ + "." + key + ": expected a string");
        return v->get<std::string>();
    }

    void finish() const {
        for (const auto& item : node_.items())
            if (!used_.count(item.key()))
                throw ConfigError(path_ + "." + item.key() + ": unknown key");
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

std::vector<Eigen::Vector2d> parse_points(const json& node, const std::string& path) {
    if (!node.is_array()) throw ConfigError(path + ": expected an array of [x, y] pairs");
    std::vector<Eigen::Vector2d> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const json& p = node[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ConfigError(path + "[" + std::to_string(i) + "]: expected [x, y]");
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return out;
}

TopologyConfig parse_topology(const json* node) {
    TopologyConfig out;
    if (!node) return out;
    Section s(*node, "topology");
    if (const json* positions = s.find("positions")) {
        Section p(*positions, "topology.positions");
        const json* tx = p.find("tx");
        const json* rx = p.find("rx");
        if (!tx || !rx)
            throw ConfigError("topology.positions: both 'tx' and 'rx' are required");
        out.tx_positions = parse_points(*tx, "topology.positions.tx");
        out.rx_positions = parse_points(*rx, "topology.positions.rx");
        out.has_positions = true;
        p.finish();
        if (s.find("txRxDistance") || s.find("txSpacing"))
            throw ConfigError("topology: give either explicit positions or the "
                              "txRxDistance/txSpacing generator, not both");
    } else {
        out.tx_rx_distance = s.number("txRxDistance", out.tx_rx_distance);
        out.tx_spacing = s.number("txSpacing", out.tx_spacing);
    }
    out.path_loss_exponent = s.number("pathLossExponent", out.path_loss_exponent);
    out.rice_factor = s.number("riceFactor", out.rice_factor);
    out.reference_distance = s.number("referenceDistance", out.reference_distance);
    out.carrier_frequency_ghz = s.number("carrierFrequencyGhz", out.carrier_frequency_ghz);
    out.snr_db = s.number("snrDb", out.snr_db);
    s.finish();
    return out;
}

std::vector<LinkConfig> parse_links(const json* node) {
    if (!node) throw ConfigError("links: required section is missing");
    if (!node->is_array() || node->empty())
        throw ConfigError("links: expected a non-empty array");
    std::vector<LinkConfig> out;
    for (std::size_t i = 0; i < node->size(); ++i) {
        const std::string path = "links[" + std::to_string(i) + "]";
        Section s((*node)[i], path);
        LinkConfig link;
        link.tx_latent_dim = s.integer("txLatentDim", 0);
        link.rx_latent_dim = s.integer("rxLatentDim", 0);
        link.tx_antennas = s.integer("txAntennas", link.tx_antennas);
        link.rx_antennas = s.integer("rxAntennas", link.rx_antennas);
        link.channel_uses = s.integer("channelUses", link.channel_uses);
        link.max_power = s.number("maxPower", link.max_power);
        s.finish();
        if (link.tx_latent_dim == 0)
            throw ConfigError(path + ".txLatentDim: required");
        if (link.rx_latent_dim == 0)
            throw ConfigError(path + ".rxLatentDim: required");
        out.push_back(link);
    }
    return out;
}

LatentConfig parse_latent(const json* node) {
    LatentConfig out;
    if (!node) return out;
    Section s(*node, "latent");
    out.shared_dim = s.integer("sharedDim", out.shared_dim);
    out.class_count = s.integer("classCount", out.class_count);
    out.class_separation = s.number("classSeparation", out.class_separation);
    out.noise_std = s.number("noiseStd", out.noise_std);
    out.pilot_count = s.integer("pilotCount", out.pilot_count);
    out.test_count = s.integer("testCount", out.test_count);
    out.import_dir = s.text("importDir", out.import_dir);
    s.finish();
    return out;
}

GameConfig parse_game(const json* node) {
    GameConfig out;
    if (!node) return out;
    Section s(*node, "game");
    out.scheme = scheme_from_string(s.text("scheme", to_string(out.scheme)));
    out.max_iterations = s.integer("maxIterations", out.max_iterations);
    out.tolerance = s.number("tolerance", out.tolerance);
    out.gamma0 = s.number("gamma0", out.gamma0);
    out.epsilon = s.number("epsilon", out.epsilon);
    out.ne_check_trials = s.integer("neCheckTrials", out.ne_check_trials);
    out.ne_tolerance = s.number("neTolerance", out.ne_tolerance);
    const int workers = s.integer("workers", static_cast<int>(out.workers));
    if (workers < 1) throw ConfigError("game.workers: must be >= 1");
    out.workers = static_cast<unsigned>(workers);
    s.finish();
    return out;
}

ExperimentConfig parse_experiment(const json* node) {
    ExperimentConfig out;
    if (!node) return out;
    Section s(*node, "experiment");
    if (const json* methods = s.find("methods")) {
        if (!methods->is_array() || methods->empty())
            throw ConfigError("experiment.methods: expected a non-empty array");
        out.methods.clear();
        for (const json& m : *methods) {
            if (!m.is_string())
                throw ConfigError("experiment.methods: entries must be strings");
            out.methods.push_back(method_from_string(m.get<std::string>()));
        }
    }
    if (const json* seeds = s.find("seeds")) {
        if (!seeds->is_array() || seeds->empty())
            throw ConfigError("experiment.seeds: expected a non-empty array");
        out.seeds.clear();
        for (const json& v : *seeds) {
            if (!v.is_number_integer() ||
                (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
                throw ConfigError("experiment.seeds: entries must be nonnegative integers");
            out.seeds.push_back(v.get<std::uint64_t>());
        }
    }
    auto parse_values = [&](const char* key, std::vector<double>& target) {
        if (const json* values = s.find(key)) {
            if (!values->is_array() || values->empty())
                throw ConfigError("experiment." + std::string(key) +
                                  ": expected a non-empty array");
            target.clear();
            for (const json& v : *values) {
                if (!v.is_number())
                    throw ConfigError("experiment." + std::string(key) +
                                      ": entries must be numbers");
                target.push_back(v.get<double>());
            }
        }
    };
    parse_values("xiValues", out.xi_values);
    parse_values("alphaValues", out.alpha_values);
    s.finish();
    return out;
}

OutputConfig parse_output(const json* node) {
    OutputConfig out;
    if (!node) return out;
    Section s(*node, "output");
    out.directory = s.text("directory", out.directory);
    out.write_matrices = s.boolean("writeMatrices", out.write_matrices);
    out.write_pilots = s.boolean("writePilots", out.write_pilots);
    s.finish();
    return out;
}

}  // namespace

void ScenarioConfig::validate() const {
    if (links.empty()) throw ConfigError("links: at least one link is required");
    for (std::size_t l = 0; l < links.size(); ++l)
        links[l].validate("links[" + std::to_string(l) + "]");
    for (std::size_t l = 1; l < links.size(); ++l)
        if (links[l].channel_uses != links[0].channel_uses)
            throw ConfigError("links[" + std::to_string(l) +
                              "].channelUses: all links must share K");
    if (topology.has_positions) {
        if (topology.tx_positions.size() != links.size() ||
            topology.rx_positions.size() != links.size())
            throw ConfigError("topology.positions: need exactly one tx and one rx entry "
                              "per link");
    } else {
        if (!(topology.tx_rx_distance > 0.0))
            throw ConfigError("topology.txRxDistance: must be > 0");
        if (links.size() > 1 && !(topology.tx_spacing > 0.0))
            throw ConfigError("topology.txSpacing: must be > 0");
    }
    if (topology.path_loss_exponent < 0.0)
        throw ConfigError("topology.pathLossExponent: must be >= 0");
    if (topology.rice_factor < 0.0) throw ConfigError("topology.riceFactor: must be >= 0");
    if (!(topology.reference_distance > 0.0))
        throw ConfigError("topology.referenceDistance: must be > 0");
    if (!std::isfinite(topology.snr_db)) throw ConfigError("topology.snrDb: must be finite");

    if (latent.import_dir.empty()) {
        if (latent.shared_dim < 1) throw ConfigError("latent.sharedDim: must be >= 1");
        if (latent.class_count < 1) throw ConfigError("latent.classCount: must be >= 1");
        if (latent.class_separation < 0.0)
            throw ConfigError("latent.classSeparation: must be >= 0");
        if (latent.noise_std < 0.0) throw ConfigError("latent.noiseStd: must be >= 0");
        if (latent.test_count < 0) throw ConfigError("latent.testCount: must be >= 0");
        for (std::size_t l = 0; l < links.size(); ++l) {
            const int need = std::max(links[l].tx_latent_dim, links[l].rx_latent_dim);
            if (latent.pilot_count < need)
                throw ConfigError("latent.pilotCount: " + std::to_string(latent.pilot_count) +
                                  " is below max(d, m) = " + std::to_string(need) +
                                  " required by links[" + std::to_string(l) + "]");
        }
    }
    game.validate();
    if (experiment.methods.empty())
        throw ConfigError("experiment.methods: at least one method is required");
    if (experiment.seeds.empty())
        throw ConfigError("experiment.seeds: at least one seed is required");
    if (output.directory.empty()) throw ConfigError("output.directory: must not be empty");
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    Section top(root, origin.empty() ? "config" : origin);
    ScenarioConfig config;
    config.topology = parse_topology(top.find("topology"));
    config.links = parse_links(top.find("links"));
    config.latent = parse_latent(top.find("latent"));
    config.game = parse_game(top.find("game"));
    config.experiment = parse_experiment(top.find("experiment"));
    config.output = parse_output(top.find("output"));
    top.finish();
    config.validate();
    return config;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
    return parse_config_text(read_text_file(path), path.string());
}

std::string canonical_config(const ScenarioConfig& config) {
    json root;
    json& topology = root["topology"];
    if (config.topology.has_positions) {
        json tx = json::array();
        json rx = json::array();
        for (const auto& p : config.topology.tx_positions) tx.push_back({p.x(), p.y()});
        for (const auto& p : config.topology.rx_positions) rx.push_back({p.x(), p.y()});
        topology["positions"] = {{"tx", tx}, {"rx", rx}};
    } else {
        topology["txRxDistance"] = config.topology.tx_rx_distance;
        topology["txSpacing"] = config.topology.tx_spacing;
    }
    topology["pathLossExponent"] = config.topology.path_loss_exponent;
    topology["riceFactor"] = config.topology.rice_factor;
    topology["referenceDistance"] = config.topology.reference_distance;
    topology["carrierFrequencyGhz"] = config.topology.carrier_frequency_ghz;
    topology["snrDb"] = config.topology.snr_db;

    root["links"] = json::array();
    for (const LinkConfig& link : config.links)
        root["links"].push_back({{"txLatentDim", link.tx_latent_dim},
                                 {"rxLatentDim", link.rx_latent_dim},
                                 {"txAntennas", link.tx_antennas},
                                 {"rxAntennas", link.rx_antennas},
                                 {"channelUses", link.channel_uses},
                                 {"maxPower", link.max_power}});

    root["latent"] = {{"sharedDim", config.latent.shared_dim},
                      {"classCount", config.latent.class_count},
                      {"classSeparation", config.latent.class_separation},
                      {"noiseStd", config.latent.noise_std},
                      {"pilotCount", config.latent.pilot_count},
                      {"testCount", config.latent.test_count},
                      {"importDir", config.latent.import_dir}};

    root["game"] = {{"scheme", to_string(config.game.scheme)},
                    {"maxIterations", config.game.max_iterations},
                    {"tolerance", config.game.tolerance},
                    {"gamma0", config.game.gamma0},
                    {"epsilon", config.game.epsilon},
                    {"neCheckTrials", config.game.ne_check_trials},
                    {"neTolerance", config.game.ne_tolerance},
                    {"workers", config.game.workers}};

    json methods = json::array();
    for (const Method m : config.experiment.methods) methods.push_back(to_string(m));
    root["experiment"] = {{"methods", methods},
                          {"seeds", config.experiment.seeds},
                          {"xiValues", config.experiment.xi_values},
                          {"alphaValues", config.experiment.alpha_values}};

    root["output"] = {{"directory", config.output.directory},
                      {"writeMatrices", config.output.write_matrices},
                      {"writePilots", config.output.write_pilots}};

    return root.dump(2) + "\n";
}

std::uint64_t config_hash(const ScenarioConfig& config) {
    // The hash identifies the scientific inputs; where the artifacts land must
    // not change it, or reruns into a fresh directory would look unrelated.
    json root = json::parse(canonical_config(config));
    root.erase("output");
    return fnv1a_hash(root.dump(2));
}

}  // namespace semeq
