#ifndef POC_CHANGE_PROCESS_HPP
#define POC_CHANGE_PROCESS_HPP

#include <cmath>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include <poc/errors.hpp>
#include <poc/graph.hpp>
#include <poc/rng.hpp>

namespace poc {

/// Linear effort coefficients: e = alpha * d + beta + eps.
struct EffortParams {
    double alpha = 1.0; // effort units per dependency, > 0
    double beta = 0.0;  // base effort, >= 0

    void validate() const {
        if (!(alpha > 0.0)) {
            throw Error("alpha must be > 0");
        }
        if (!(beta >= 0.0)) {
            throw Error("beta must be >= 0");
        }
    }
};

/// Probability law over entities for choosing the change target.
struct SelectionDistribution {
    std::map<NodeId, double> weights;

    static constexpr double kSumTolerance = 1e-9;

    void validate(const DependencyGraph& graph) const {
        double sum = 0.0;
        for (const auto& [node, w] : weights) {
            if (!graph.has_node(node)) {
                throw InvalidDistributionError("weight on unknown node: " +
                                               node);
            }
            if (!(w >= 0.0)) {
                throw InvalidDistributionError("negative weight on " + node);
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > kSumTolerance) {
            throw InvalidDistributionError("weights sum to " +
                                           std::to_string(sum));
        }
    }

    static SelectionDistribution uniform(const DependencyGraph& graph) {
        if (graph.node_count() == 0) {
            throw InvalidDistributionError("uniform over empty graph");
        }
        SelectionDistribution sel;
        double w = 1.0 / static_cast<double>(graph.node_count());
        for (const NodeId& v : graph.nodes()) {
            sel.weights[v] = w;
        }
        return sel;
    }

    /// Weights proportional to out-degree. Requires at least one edge.
    static SelectionDistribution degree_proportional(
        const DependencyGraph& graph) {
        double total = static_cast<double>(graph.edge_count());
        if (total == 0.0) {
            throw InvalidDistributionError(
                "degree-proportional selection on edgeless graph");
        }
        SelectionDistribution sel;
        for (const NodeId& v : graph.nodes()) {
            sel.weights[v] = static_cast<double>(out_degree(graph, v)) / total;
        }
        return sel;
    }
};

/// Strict noise: residual independent of the target, E[eps | X] = 0.
struct StrictIndependent {
    double sigma_eps = 1.0; // std dev, >= 0
};

/// Strict noise with degree-dependent spread; still E[eps | X] = 0.
struct StrictHeteroscedastic {
    std::map<long, double> sigma_by_degree;

    double sigma_at(long degree) const {
        auto it = sigma_by_degree.find(degree);
        if (it == sigma_by_degree.end()) {
            throw InvalidNoiseError("no sigma entry for degree " +
                                    std::to_string(degree));
        }
        return it->second;
    }
};

/// Relaxed noise eps = gamma * (d - mu) + eta with eta ~ N(0, eta_sigma^2).
/// Keeps E[eps] = 0 but induces Cov(d, eps) = gamma * Var(d).
struct RelaxedLinear {
    double gamma = 0.0;
    double eta_sigma = 1.0; // >= 0
};

struct NoiseModel {
    std::variant<StrictIndependent, StrictHeteroscedastic, RelaxedLinear> mode;

    NoiseModel() : mode(StrictIndependent{}) {}
    NoiseModel(StrictIndependent m) : mode(m) { validate(); }
    NoiseModel(StrictHeteroscedastic m) : mode(std::move(m)) { validate(); }
    NoiseModel(RelaxedLinear m) : mode(m) { validate(); }

    bool is_strict() const {
        return !std::holds_alternative<RelaxedLinear>(mode) ||
               std::get<RelaxedLinear>(mode).gamma == 0.0;
    }

    void validate() const {
        if (const auto* s = std::get_if<StrictIndependent>(&mode)) {
            if (!(s->sigma_eps >= 0.0)) {
                throw InvalidNoiseError("sigma_eps must be >= 0");
            }
        } else if (const auto* h = std::get_if<StrictHeteroscedastic>(&mode)) {
            for (const auto& [d, sigma] : h->sigma_by_degree) {
                if (d < 0 || !(sigma >= 0.0)) {
                    throw InvalidNoiseError("invalid sigma table entry");
                }
            }
        } else {
            const auto& r = std::get<RelaxedLinear>(mode);
            if (!(r.eta_sigma >= 0.0)) {
                throw InvalidNoiseError("eta_sigma must be >= 0");
            }
            if (!std::isfinite(r.gamma)) {
                throw InvalidNoiseError("gamma must be finite");
            }
        }
    }
};

/// One sampled change: target, its structural load at the time of change,
/// the realized effort and the residual. Ingested events carry no residual.
struct ChangeEvent {
    long t = 0;
    NodeId target;
    long degree_at_change = 0;
    double effort = 0.0;
    std::optional<double> residual;
};

/// Precomputed inverse-CDF sampler for one validated distribution.
/// Validation cost is paid once; each draw is a binary search.
class SelectionSampler {
public:
    SelectionSampler(const DependencyGraph& graph,
                     const SelectionDistribution& selection) {
        selection.validate(graph);
        double acc = 0.0;
        for (const auto& [node, w] : selection.weights) {
            if (w > 0.0) {
                acc += w;
                nodes_.push_back(node);
                cumulative_.push_back(acc);
            }
        }
        if (nodes_.empty()) {
            throw InvalidDistributionError("all weights are zero");
        }
        cumulative_.back() = 1.0;
    }

    const NodeId& sample(RngStream& rng) const {
        double u = rng.uniform();
        std::size_t lo = 0, hi = cumulative_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (u < cumulative_[mid]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        return nodes_[lo];
    }

private:
    std::vector<NodeId> nodes_;
    std::vector<double> cumulative_;
};

/// Draws one change target X ~ selection.
inline NodeId sample_target(const DependencyGraph& graph,
                            const SelectionDistribution& selection,
                            RngStream& rng) {
    SelectionSampler sampler(graph, selection);
    return sampler.sample(rng);
}

/// Draws one residual. `mu` is the current population mean degree; it is
/// only consulted by the relaxed mode.
inline double sample_noise(const NoiseModel& noise, long degree, double mu,
                           RngStream& rng) {
    if (const auto* s = std::get_if<StrictIndependent>(&noise.mode)) {
        if (s->sigma_eps == 0.0) {
            return 0.0;
        }
        return s->sigma_eps * rng.normal();
    }
    if (const auto* h = std::get_if<StrictHeteroscedastic>(&noise.mode)) {
        double sigma = h->sigma_at(degree);
        if (sigma == 0.0) {
            return 0.0;
        }
        return sigma * rng.normal();
    }
    const auto& r = std::get<RelaxedLinear>(noise.mode);
    double eta = r.eta_sigma == 0.0 ? 0.0 : r.eta_sigma * rng.normal();
    return r.gamma * (static_cast<double>(degree) - mu) + eta;
}

/// Samples one change event; the effort identity
/// effort = alpha * degree + beta + residual holds bit-exactly.
inline ChangeEvent sample_change_event(const DependencyGraph& graph,
                                       const SelectionSampler& sampler,
                                       const EffortParams& params,
                                       const NoiseModel& noise, double mu,
                                       long t, RngStream& rng) {
    ChangeEvent ev;
    ev.t = t;
    ev.target = sampler.sample(rng);
    ev.degree_at_change =
        static_cast<long>(out_degree(graph, ev.target));
    double eps = sample_noise(noise, ev.degree_at_change, mu, rng);
    ev.residual = eps;
    ev.effort = params.alpha * static_cast<double>(ev.degree_at_change) +
                params.beta + eps;
    return ev;
}

inline ChangeEvent sample_change_event(const DependencyGraph& graph,
                                       const SelectionDistribution& selection,
                                       const EffortParams& params,
                                       const NoiseModel& noise, double mu,
                                       long t, RngStream& rng) {
    SelectionSampler sampler(graph, selection);
    return sample_change_event(graph, sampler, params, noise, mu, t, rng);
}

} // namespace poc

#endif // POC_CHANGE_PROCESS_HPP
