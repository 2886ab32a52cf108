#ifndef POC_SCENARIO_HPP
#define POC_SCENARIO_HPP

#include <algorithm>
#include <cstdint>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <poc/change_process.hpp>
#include <poc/errors.hpp>
#include <poc/graph.hpp>
#include <poc/moments.hpp>
#include <poc/rng.hpp>

namespace poc {

enum class SelectionPolicy { Uniform, DegreeProportional, Explicit };

/// Full description of one discrete-time run: initial structure, per-step
/// transitions and noise, selection rule, effort coefficients, event budget
/// and master seed. Everything needed to reproduce a trajectory bit-exactly.
struct Scenario {
    DependencyGraph initial_graph;
    long horizon = 1; // number of steps T
    std::vector<GraphDelta> deltas; // size >= horizon - 1
    SelectionPolicy selection_policy = SelectionPolicy::Uniform;
    std::vector<SelectionDistribution> selection_schedule; // Explicit only
    EffortParams params;
    std::vector<NoiseModel> noise_schedule; // size >= horizon
    long events_per_step = 100;
    std::uint64_t seed = 0;

    void validate() const {
        params.validate();
        if (horizon < 1) {
            throw ScenarioError("horizon must be >= 1");
        }
        if (events_per_step < 1) {
            throw ScenarioError("events_per_step must be >= 1");
        }
        if (static_cast<long>(deltas.size()) < horizon - 1) {
            throw ScenarioError("delta schedule shorter than horizon");
        }
        if (static_cast<long>(noise_schedule.size()) < horizon) {
            throw ScenarioError("noise schedule shorter than horizon");
        }
        if (selection_policy == SelectionPolicy::Explicit &&
            static_cast<long>(selection_schedule.size()) < horizon) {
            throw ScenarioError("selection schedule shorter than horizon");
        }
        if (initial_graph.node_count() == 0) {
            throw ScenarioError("initial graph has no nodes");
        }
    }

    SelectionDistribution selection_at(const DependencyGraph& graph,
                                       long step) const {
        switch (selection_policy) {
        case SelectionPolicy::Uniform:
            return SelectionDistribution::uniform(graph);
        case SelectionPolicy::DegreeProportional:
            return SelectionDistribution::degree_proportional(graph);
        case SelectionPolicy::Explicit:
            return selection_schedule[static_cast<std::size_t>(step)];
        }
        throw ScenarioError("bad selection policy");
    }
};

/// One trajectory of the system: per-step graphs, exact and sampled moment
/// summaries, the population (B, U) path with deltas, assumption verdicts
/// and regime labels, plus the raw event stream.
struct PocTrajectory {
    std::vector<DependencyGraph> graphs;
    std::vector<MomentSummary> population;
    std::vector<MomentSummary> empirical; // empty when events_per_step < 2
    std::vector<PocState> states;         // population path
    std::vector<DeltaReport> delta_reports;
    std::vector<AssumptionReport> assumption_reports;
    std::vector<RegimeLabel> regimes;
    std::vector<ChangeEvent> events;
};

namespace detail {

inline PocTrajectory run_one_replication(const Scenario& scenario,
                                         RngStream stream) {
    PocTrajectory traj;
    DependencyGraph graph = scenario.initial_graph;
    for (long step = 0; step < scenario.horizon; ++step) {
        long ts = graph.timestep();
        try {
            SelectionDistribution selection =
                scenario.selection_at(graph, step);
            DegreeMoments dm = population_degree_moments(graph, selection);
            const NoiseModel& noise =
                scenario.noise_schedule[static_cast<std::size_t>(step)];
            ResidualMoments rm = population_residual_moments(
                noise, degree_distribution(graph, selection));

            MomentSummary pop;
            pop.t = ts;
            pop.mu = dm.mu;
            pop.sigma_d2 = dm.sigma_d2;
            pop.sigma_eps2 = rm.sigma_eps2;
            pop.cov_d_eps = rm.cov_d_eps;
            pop.source = SummarySource::Population;
            traj.population.push_back(pop);

            SelectionSampler sampler(graph, selection);
            std::vector<ChangeEvent> step_events;
            step_events.reserve(
                static_cast<std::size_t>(scenario.events_per_step));
            for (long k = 0; k < scenario.events_per_step; ++k) {
                step_events.push_back(sample_change_event(
                    graph, sampler, scenario.params, noise, dm.mu, ts,
                    stream));
            }
            if (scenario.events_per_step >= 2) {
                traj.empirical.push_back(
                    empirical_moment_summary(step_events, scenario.params));
            }
            traj.events.insert(traj.events.end(), step_events.begin(),
                               step_events.end());
            traj.graphs.push_back(graph);

            if (step + 1 < scenario.horizon) {
                graph = apply_delta(
                    graph, scenario.deltas[static_cast<std::size_t>(step)]);
            }
        } catch (const ScenarioError&) {
            throw;
        } catch (const Error& e) {
            throw ScenarioError("step " + std::to_string(ts) + ": " +
                                e.what());
        }
    }
    for (const MomentSummary& s : traj.population) {
        traj.states.push_back(poc_state(s, scenario.params));
    }
    if (traj.states.size() >= 2) {
        traj.delta_reports = deltas(traj.states);
        traj.assumption_reports =
            check_assumptions(traj.population, kExactTolerance);
        for (const DeltaReport& d : traj.delta_reports) {
            traj.regimes.push_back(classify_regime(d));
        }
    }
    return traj;
}

} // namespace detail

/// Runs `replications` independent trajectories. Replication r draws from
/// the stream derived from (scenario.seed, r); population-path quantities
/// are moment computations and come out identical across replications.
inline std::vector<PocTrajectory> run_simulation(const Scenario& scenario,
                                                 long replications = 1) {
    scenario.validate();
    if (replications < 1) {
        throw ScenarioError("replications must be >= 1");
    }
    if (replications == 1) {
        return {detail::run_one_replication(
            scenario, RngStream::derive(scenario.seed, 0))};
    }
    std::vector<std::future<PocTrajectory>> futures;
    futures.reserve(static_cast<std::size_t>(replications));
    for (long r = 0; r < replications; ++r) {
        futures.push_back(std::async(
            std::launch::async, [&scenario, r] {
                return detail::run_one_replication(
                    scenario,
                    RngStream::derive(scenario.seed,
                                      static_cast<std::uint64_t>(r)));
            }));
    }
    std::vector<PocTrajectory> out;
    out.reserve(futures.size());
    for (auto& f : futures) {
        out.push_back(f.get());
    }
    return out;
}

enum class ScenarioKind {
    Regularizing,
    Heterogenizing,
    NoiseAnnealing,
    CovarianceAnnealing,
    StaticControl,
};

inline ScenarioKind scenario_kind_from_string(const std::string& s) {
    if (s == "regularizing") return ScenarioKind::Regularizing;
    if (s == "heterogenizing") return ScenarioKind::Heterogenizing;
    if (s == "noise_annealing") return ScenarioKind::NoiseAnnealing;
    if (s == "covariance_annealing") return ScenarioKind::CovarianceAnnealing;
    if (s == "static_control") return ScenarioKind::StaticControl;
    throw ScenarioError("unknown scenario kind: " + s);
}

inline const char* to_string(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::Regularizing: return "regularizing";
    case ScenarioKind::Heterogenizing: return "heterogenizing";
    case ScenarioKind::NoiseAnnealing: return "noise_annealing";
    case ScenarioKind::CovarianceAnnealing: return "covariance_annealing";
    case ScenarioKind::StaticControl: return "static_control";
    }
    return "?";
}

/// Tunable parameters of the built-in scenario families. sigma_end and
/// gamma-related knobs only matter for the kinds that use them.
struct ScenarioKnobs {
    long nodes = 30;
    long initial_degree_spread = 4; // initial degrees cycle 0..spread
    long target_degree = 8;         // regularizing only
    long horizon = 20;
    long events_per_step = 100;
    long edges_per_step = 2; // heterogenizing only
    double alpha = 1.0;
    double beta = 0.0;
    double sigma0 = 1.0;
    std::optional<double> sigma_end; // default: kind-dependent
    double gamma0 = 0.5;
    double eta_sigma = 0.5;
    SelectionPolicy selection = SelectionPolicy::Uniform;
};

namespace detail {

inline NodeId make_node_id(long i) {
    std::ostringstream os;
    os << 'n';
    std::string digits = std::to_string(i);
    for (std::size_t k = digits.size(); k < 6; ++k) {
        os << '0';
    }
    os << digits;
    return os.str();
}

// Nodes n000000..n{N-1}; node i starts with out-degree i mod (spread+1),
// pointing at the next nodes in cyclic order.
inline DependencyGraph make_initial_graph(long n, long spread) {
    if (n < 1) {
        throw ScenarioError("nodes must be >= 1");
    }
    if (spread < 0 || spread >= n) {
        throw ScenarioError("initial degree spread must be in [0, nodes)");
    }
    std::set<NodeId> nodes;
    for (long i = 0; i < n; ++i) {
        nodes.insert(make_node_id(i));
    }
    std::vector<Edge> edges;
    for (long i = 0; i < n; ++i) {
        long deg = i % (spread + 1);
        for (long j = 1; j <= deg; ++j) {
            edges.emplace_back(make_node_id(i), make_node_id((i + j) % n));
        }
    }
    return DependencyGraph(std::move(nodes), edges, 0);
}

// Smallest-id node not yet in v's out-neighborhood; self-loops count as
// candidates. Throws when v is saturated.
inline NodeId next_free_target(const DependencyGraph& g, const NodeId& v) {
    const std::set<NodeId>& nbrs = out_neighborhood(g, v);
    for (const NodeId& u : g.nodes()) {
        if (nbrs.count(u) == 0) {
            return u;
        }
    }
    throw ScenarioError("node " + v + " already depends on every node");
}

inline std::vector<NoiseModel> linear_sigma_schedule(long horizon,
                                                     double sigma0,
                                                     double sigma_end) {
    std::vector<NoiseModel> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (long t = 0; t < horizon; ++t) {
        double frac = horizon > 1
                          ? static_cast<double>(t) /
                                static_cast<double>(horizon - 1)
                          : 0.0;
        out.emplace_back(
            StrictIndependent{sigma0 + (sigma_end - sigma0) * frac});
    }
    return out;
}

} // namespace detail

/// Builds one of the named scenario families:
///   regularizing        — growth steers every below-target node up by one
///                         dependency per step, so the degree distribution
///                         compresses toward target_degree (A1-A2 hold);
///   heterogenizing      — new edges pile onto the highest-degree node,
///                         inflating degree variance (violates A2);
///   noise_annealing     — static graph, residual spread shrinks linearly
///                         sigma0 -> sigma_end (A3);
///   covariance_annealing— static graph, relaxed noise with gamma shrinking
///                         linearly to 0 (drives A4);
///   static_control      — frozen graph, constant noise; all deltas zero.
/// Growth is a deterministic function of (seed, step).
inline Scenario generate_scenario(ScenarioKind kind,
                                  const ScenarioKnobs& knobs,
                                  std::uint64_t seed) {
    if (knobs.horizon < 1) {
        throw ScenarioError("horizon must be >= 1");
    }
    if (knobs.events_per_step < 1) {
        throw ScenarioError("events_per_step must be >= 1");
    }
    if (!(knobs.sigma0 >= 0.0)) {
        throw ScenarioError("sigma0 must be >= 0");
    }

    Scenario sc;
    sc.initial_graph =
        detail::make_initial_graph(knobs.nodes, knobs.initial_degree_spread);
    sc.horizon = knobs.horizon;
    sc.selection_policy = knobs.selection;
    sc.params = EffortParams{knobs.alpha, knobs.beta};
    sc.events_per_step = knobs.events_per_step;
    sc.seed = seed;

    double sigma_end = knobs.sigma_end.value_or(
        kind == ScenarioKind::NoiseAnnealing ? knobs.sigma0 / 4.0
                                             : knobs.sigma0);

    switch (kind) {
    case ScenarioKind::Regularizing: {
        long max_initial = std::min(knobs.initial_degree_spread,
                                    knobs.nodes - 1);
        if (knobs.target_degree < max_initial) {
            throw ScenarioError(
                "infeasible knobs: target degree " +
                std::to_string(knobs.target_degree) +
                " below an initial degree with growth-only transitions");
        }
        if (knobs.target_degree > knobs.nodes) {
            throw ScenarioError(
                "infeasible knobs: target degree exceeds node count");
        }
        DependencyGraph g = sc.initial_graph;
        for (long step = 0; step + 1 < knobs.horizon; ++step) {
            GraphDelta delta;
            for (const NodeId& v : g.nodes()) {
                if (static_cast<long>(out_degree(g, v)) <
                    knobs.target_degree) {
                    delta.added_edges.emplace_back(
                        v, detail::next_free_target(g, v));
                }
            }
            g = apply_delta(g, delta);
            sc.deltas.push_back(std::move(delta));
        }
        sc.noise_schedule = detail::linear_sigma_schedule(
            knobs.horizon, knobs.sigma0, sigma_end);
        break;
    }
    case ScenarioKind::Heterogenizing: {
        DependencyGraph g = sc.initial_graph;
        for (long step = 0; step + 1 < knobs.horizon; ++step) {
            GraphDelta delta;
            DependencyGraph work = g;
            for (long k = 0; k < knobs.edges_per_step; ++k) {
                // current max-degree node with room, smallest id on ties
                NodeId best;
                long best_deg = -1;
                for (const NodeId& v : work.nodes()) {
                    long d = static_cast<long>(out_degree(work, v));
                    if (d > best_deg &&
                        d < static_cast<long>(work.node_count())) {
                        best = v;
                        best_deg = d;
                    }
                }
                if (best_deg < 0) {
                    break; // fully saturated
                }
                Edge e{best, detail::next_free_target(work, best)};
                GraphDelta one;
                one.added_edges.push_back(e);
                work = apply_delta(work, one).with_timestep(work.timestep());
                delta.added_edges.push_back(e);
            }
            g = apply_delta(g, delta);
            sc.deltas.push_back(std::move(delta));
        }
        sc.noise_schedule = detail::linear_sigma_schedule(
            knobs.horizon, knobs.sigma0, knobs.sigma0);
        break;
    }
    case ScenarioKind::NoiseAnnealing: {
        sc.deltas.assign(static_cast<std::size_t>(knobs.horizon - 1),
                         GraphDelta{});
        sc.noise_schedule = detail::linear_sigma_schedule(
            knobs.horizon, knobs.sigma0, sigma_end);
        break;
    }
    case ScenarioKind::CovarianceAnnealing: {
        sc.deltas.assign(static_cast<std::size_t>(knobs.horizon - 1),
                         GraphDelta{});
        for (long t = 0; t < knobs.horizon; ++t) {
            double frac = knobs.horizon > 1
                              ? static_cast<double>(t) /
                                    static_cast<double>(knobs.horizon - 1)
                              : 0.0;
            sc.noise_schedule.emplace_back(RelaxedLinear{
                knobs.gamma0 * (1.0 - frac), knobs.eta_sigma});
        }
        break;
    }
    case ScenarioKind::StaticControl: {
        sc.deltas.assign(static_cast<std::size_t>(knobs.horizon - 1),
                         GraphDelta{});
        sc.noise_schedule = detail::linear_sigma_schedule(
            knobs.horizon, knobs.sigma0, knobs.sigma0);
        break;
    }
    }
    sc.validate();
    return sc;
}

inline Scenario generate_scenario(const std::string& kind,
                                  const ScenarioKnobs& knobs,
                                  std::uint64_t seed) {
    return generate_scenario(scenario_kind_from_string(kind), knobs, seed);
}

} // namespace poc

#endif // POC_SCENARIO_HPP
