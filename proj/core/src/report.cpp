#include "semeq/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "semeq/io.hpp"

namespace semeq {

using nlohmann::json;

std::string to_string(SweepAxis axis) {
    return axis == SweepAxis::compression_xi ? "xi" : "alpha";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "xi") return SweepAxis::compression_xi;
    if (name == "alpha") return SweepAxis::alpha_scaling;
    throw std::invalid_argument("axis: expected 'xi' or 'alpha', got '" + name + "'");
}

namespace {

// CSV cell for values that may be legitimately absent.
std::string cell(double value) {
    if (std::isnan(value) || value == -std::numeric_limits<double>::infinity())
        return "n/a";
    return format_double(value);
}

double db_from_watts(double watts) {
    return watts > 0 ? 10.0 * std::log10(watts) : -std::numeric_limits<double>::infinity();
}

// nlohmann renders non-finite doubles as null, which is exactly the JSON-side
// convention for "n/a"; this wrapper just documents the reliance.
json number_or_null(double value) { return json(value); }

json player_summaries(const GameResult& result, const MethodPoint& point) {
    json players = json::array();
    const auto& rows = result.trace.per_iteration;
    for (int l = 0; l < point.player_mse.size(); ++l) {
        json p;
        p["mse"] = point.player_mse(l);
        p["mseDb"] = point.player_mse_db(l);
        if (!rows.empty()) {
            const IterationRecord& last = rows.back();
            p["payoff"] = last.payoff(l);
            p["muiWatts"] = last.mui_watts(l);
            p["muiDb"] = number_or_null(db_from_watts(last.mui_watts(l)));
            p["powerUsed"] = last.power_used(l);
        }
        players.push_back(p);
    }
    return players;
}

json nash_json(const NashReport& nash) {
    json out;
    out["isNe"] = nash.is_ne;
    out["worstImprovement"] = nash.worst_improvement;
    out["worstRelativeImprovement"] = nash.worst_relative_improvement;
    json players = json::array();
    for (const NashPlayerCheck& p : nash.players)
        players.push_back({{"payoffFinal", p.payoff_final},
                           {"payoffBestCandidate", p.payoff_best_candidate},
                           {"improvement", p.improvement},
                           {"relativeImprovement", p.relative_improvement}});
    out["players"] = players;
    return out;
}

}  // namespace

std::string render_trace_csv(const GameTrace& trace, std::uint64_t config_hash,
                             std::uint64_t seed, Scheme scheme) {
    std::ostringstream out;
    out << "# configHash=" << hex64(config_hash) << "\n";
    out << "# seed=" << seed << "\n";
    out << "# scheme=" << to_string(scheme) << "\n";
    out << "# converged=" << (trace.converged ? "true" : "false") << "\n";
    out << "# iterationsUsed=" << trace.iterations_used << "\n";
    const int players =
        trace.per_iteration.empty() ? 0 : static_cast<int>(trace.per_iteration[0].mse.size());
    out << "iteration,stepSize,residual";
    for (int l = 0; l < players; ++l)
        out << ",mse_" << l << ",payoff_" << l << ",muiWatts_" << l << ",muiDb_" << l
            << ",power_" << l;
    out << "\n";
    for (const IterationRecord& row : trace.per_iteration) {
        out << row.iteration << ',' << format_double(row.step_size) << ','
            << format_double(row.residual);
        for (int l = 0; l < players; ++l)
            out << ',' << format_double(row.mse(l)) << ',' << format_double(row.payoff(l))
                << ',' << format_double(row.mui_watts(l)) << ','
                << cell(db_from_watts(row.mui_watts(l))) << ','
                << format_double(row.power_used(l));
        out << "\n";
    }
    return out.str();
}

std::string render_run_summary(const ScenarioConfig& config, std::uint64_t seed,
                               const GameResult& result, const NashReport& nash,
                               const MethodPoint& point) {
    json root;
    root["schemaVersion"] = 1;
    root["kind"] = "run";
    root["configHash"] = hex64(config_hash(config));
    root["seed"] = seed;
    root["scheme"] = to_string(config.game.scheme);
    root["converged"] = result.trace.converged;
    root["iterationsUsed"] = result.trace.iterations_used;
    root["finalResidual"] = result.trace.per_iteration.empty()
                                ? json()
                                : json(result.trace.per_iteration.back().residual);
    root["players"] = player_summaries(result, point);
    root["network"] = {{"mseDb", number_or_null(point.network_mse_db)},
                       {"accuracy", number_or_null(point.accuracy)},
                       {"muiDb", number_or_null(point.mui_db)}};
    root["nash"] = nash_json(nash);
    root["config"] = json::parse(canonical_config(config));
    return root.dump(2) + "\n";
}

std::string render_sweep_csv(const SweepResult& sweep, std::uint64_t config_hash) {
    std::ostringstream out;
    out << "# configHash=" << hex64(config_hash) << "\n";
    out << "# axis=" << to_string(sweep.axis) << "\n";
    const int players =
        sweep.points.empty() ? 0 : static_cast<int>(sweep.points[0].player_mse_db.size());
    out << to_string(sweep.axis) << ",method,seed,converged,networkMseDb,accuracy,muiDb";
    for (int l = 0; l < players; ++l) out << ",playerMseDb_" << l;
    out << "\n";
    for (const MethodPoint& p : sweep.points) {
        out << format_double(p.axis_value) << ',' << to_string(p.method) << ',' << p.seed
            << ',' << (p.converged ? "true" : "false") << ','
            << format_double(p.network_mse_db) << ',' << cell(p.accuracy) << ','
            << cell(p.mui_db);
        for (int l = 0; l < players; ++l) out << ',' << format_double(p.player_mse_db(l));
        out << "\n";
    }
    return out.str();
}

std::string render_sweep_summary(const ScenarioConfig& config, const SweepResult& sweep) {
    json root;
    root["schemaVersion"] = 1;
    root["kind"] = "sweep";
    root["configHash"] = hex64(config_hash(config));
    root["axis"] = to_string(sweep.axis);
    root["axisValues"] = sweep.axis_values;
    json methods = json::array();
    for (const Method m : sweep.methods) methods.push_back(to_string(m));
    root["methods"] = methods;
    root["seeds"] = sweep.seeds;

    json cells = json::array();
    for (const MethodPoint& p : sweep.points) {
        json c;
        c["axisValue"] = p.axis_value;
        c["method"] = to_string(p.method);
        c["seed"] = p.seed;
        c["converged"] = p.converged;
        c["networkMseDb"] = number_or_null(p.network_mse_db);
        c["accuracy"] = number_or_null(p.accuracy);
        c["muiDb"] = number_or_null(p.mui_db);
        json per_player = json::array();
        for (int l = 0; l < p.player_mse_db.size(); ++l)
            per_player.push_back(p.player_mse_db(l));
        c["playerMseDb"] = per_player;
        cells.push_back(c);
    }
    root["cells"] = cells;

    // Mean and min-max band across seeds for every (axis value, method) pair.
    json aggregates = json::array();
    for (const double value : sweep.axis_values) {
        for (const Method method : sweep.methods) {
            double mse_sum = 0, mse_min = 0, mse_max = 0;
            double acc_sum = 0, acc_min = 0, acc_max = 0;
            int count = 0;
            bool has_accuracy = true;
            for (const MethodPoint& p : sweep.points) {
                if (p.axis_value != value || p.method != method) continue;
                if (count == 0) {
                    mse_min = mse_max = p.network_mse_db;
                    acc_min = acc_max = p.accuracy;
                } else {
                    mse_min = std::min(mse_min, p.network_mse_db);
                    mse_max = std::max(mse_max, p.network_mse_db);
                    acc_min = std::min(acc_min, p.accuracy);
                    acc_max = std::max(acc_max, p.accuracy);
                }
                mse_sum += p.network_mse_db;
                acc_sum += p.accuracy;
                has_accuracy = has_accuracy && !std::isnan(p.accuracy);
                ++count;
            }
            if (count == 0) continue;
            json a;
            a["axisValue"] = value;
            a["method"] = to_string(method);
            a["networkMseDb"] = {{"mean", mse_sum / count},
                                 {"min", mse_min},
                                 {"max", mse_max}};
            a["accuracy"] = has_accuracy ? json({{"mean", acc_sum / count},
                                                 {"min", acc_min},
                                                 {"max", acc_max}})
                                         : json();
            aggregates.push_back(a);
        }
    }
    root["aggregates"] = aggregates;
    root["config"] = json::parse(canonical_config(config));
    return root.dump(2) + "\n";
}

}  // namespace semeq
