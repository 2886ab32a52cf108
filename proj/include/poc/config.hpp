#ifndef POC_CONFIG_HPP
#define POC_CONFIG_HPP

#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include <poc/errors.hpp>
#include <poc/scenario.hpp>

namespace poc {

namespace detail {

inline SelectionPolicy selection_policy_from_string(const std::string& s) {
    if (s == "uniform") return SelectionPolicy::Uniform;
    if (s == "degree_proportional") return SelectionPolicy::DegreeProportional;
    throw ScenarioError("unknown selection policy: " + s);
}

inline NoiseModel noise_from_json(const nlohmann::json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "strict_independent") {
        return NoiseModel(StrictIndependent{j.at("sigma").get<double>()});
    }
    if (type == "strict_heteroscedastic") {
        StrictHeteroscedastic h;
        for (const auto& [key, val] : j.at("sigma_by_degree").items()) {
            h.sigma_by_degree[std::stol(key)] = val.get<double>();
        }
        return NoiseModel(std::move(h));
    }
    if (type == "relaxed_linear") {
        return NoiseModel(RelaxedLinear{j.at("gamma").get<double>(),
                                        j.at("eta_sigma").get<double>()});
    }
    throw ScenarioError("unknown noise type: " + type);
}

inline std::vector<Edge> edges_from_json(const nlohmann::json& j) {
    std::vector<Edge> edges;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2) {
            throw ScenarioError("edge must be a [src, dst] pair");
        }
        edges.emplace_back(pair[0].get<std::string>(),
                           pair[1].get<std::string>());
    }
    return edges;
}

inline GraphDelta delta_from_json(const nlohmann::json& j) {
    GraphDelta d;
    if (j.contains("add_nodes")) {
        d.added_nodes = j["add_nodes"].get<std::vector<std::string>>();
    }
    if (j.contains("remove_nodes")) {
        d.removed_nodes = j["remove_nodes"].get<std::vector<std::string>>();
    }
    if (j.contains("add_edges")) {
        d.added_edges = edges_from_json(j["add_edges"]);
    }
    if (j.contains("remove_edges")) {
        d.removed_edges = edges_from_json(j["remove_edges"]);
    }
    return d;
}

} // namespace detail

/// Builds a Scenario from its JSON document. Two forms are accepted:
/// a "generator" object naming a built-in family, or an explicit
/// initial_graph + deltas + noise schedule. Run-level keys (horizon,
/// alpha, beta, events_per_step, selection, seed) sit at the top level.
inline Scenario scenario_from_json(const nlohmann::json& j) {
    std::uint64_t seed = j.value("seed", 0ULL);

    if (j.contains("generator")) {
        const nlohmann::json& g = j["generator"];
        ScenarioKnobs knobs;
        knobs.horizon = j.value("horizon", knobs.horizon);
        knobs.events_per_step = j.value("events_per_step",
                                        knobs.events_per_step);
        knobs.alpha = j.value("alpha", knobs.alpha);
        knobs.beta = j.value("beta", knobs.beta);
        if (j.contains("selection")) {
            knobs.selection = detail::selection_policy_from_string(
                j["selection"].get<std::string>());
        }
        knobs.nodes = g.value("nodes", knobs.nodes);
        knobs.initial_degree_spread =
            g.value("initial_degree_spread", knobs.initial_degree_spread);
        knobs.target_degree = g.value("target_degree", knobs.target_degree);
        knobs.edges_per_step = g.value("edges_per_step", knobs.edges_per_step);
        knobs.sigma0 = g.value("sigma0", knobs.sigma0);
        if (g.contains("sigma_end")) {
            knobs.sigma_end = g["sigma_end"].get<double>();
        }
        knobs.gamma0 = g.value("gamma0", knobs.gamma0);
        knobs.eta_sigma = g.value("eta_sigma", knobs.eta_sigma);
        return generate_scenario(g.at("kind").get<std::string>(), knobs,
                                 seed);
    }

    Scenario sc;
    sc.seed = seed;
    sc.horizon = j.value("horizon", 1L);
    sc.events_per_step = j.value("events_per_step", 100L);
    sc.params.alpha = j.value("alpha", 1.0);
    sc.params.beta = j.value("beta", 0.0);

    const nlohmann::json& ig = j.at("initial_graph");
    std::set<NodeId> nodes;
    for (const auto& n : ig.at("nodes")) {
        nodes.insert(n.get<std::string>());
    }
    std::vector<Edge> edges;
    if (ig.contains("edges")) {
        edges = detail::edges_from_json(ig["edges"]);
    }
    sc.initial_graph =
        DependencyGraph(std::move(nodes), edges, ig.value("timestep", 0L));

    if (j.contains("deltas")) {
        for (const auto& d : j["deltas"]) {
            sc.deltas.push_back(detail::delta_from_json(d));
        }
    }
    while (static_cast<long>(sc.deltas.size()) < sc.horizon - 1) {
        sc.deltas.push_back(GraphDelta{});
    }

    const nlohmann::json& noise = j.at("noise");
    if (noise.is_array()) {
        for (const auto& n : noise) {
            sc.noise_schedule.push_back(detail::noise_from_json(n));
        }
    } else {
        sc.noise_schedule.assign(static_cast<std::size_t>(sc.horizon),
                                 detail::noise_from_json(noise));
    }

    if (j.contains("selection")) {
        const nlohmann::json& sel = j["selection"];
        if (sel.is_string()) {
            sc.selection_policy = detail::selection_policy_from_string(
                sel.get<std::string>());
        } else {
            sc.selection_policy = SelectionPolicy::Explicit;
            for (const auto& step : sel.at("schedule")) {
                SelectionDistribution d;
                for (const auto& [node, w] : step.items()) {
                    d.weights[node] = w.get<double>();
                }
                sc.selection_schedule.push_back(std::move(d));
            }
        }
    }
    sc.validate();
    return sc;
}

inline Scenario load_scenario(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("scenario config: ") + e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("scenario config: ") + e.what());
    }
}

} // namespace poc

#endif // POC_CONFIG_HPP
