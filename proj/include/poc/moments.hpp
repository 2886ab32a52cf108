#ifndef POC_MOMENTS_HPP
#define POC_MOMENTS_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <poc/change_process.hpp>
#include <poc/errors.hpp>
#include <poc/graph.hpp>

namespace poc {

enum class SummarySource { Population, Empirical };

/// Slack applied when comparing "exact" population quantities. Population
/// moments are enumeration sums in floating point, so algebraically equal
/// values can differ by a few ulps; anything inside this band counts as
/// equal, anything beyond it as a strict inequality.
inline constexpr double kExactTolerance = 1e-12;

/// Per-step moment summary (mu, sigma_d^2, sigma_eps^2, c), either exact
/// (population) or estimated from events (empirical).
struct MomentSummary {
    long t = 0;
    double mu = 0.0;
    double sigma_d2 = 0.0;
    double sigma_eps2 = 0.0;
    double cov_d_eps = 0.0;
    SummarySource source = SummarySource::Population;
    std::size_t n = 0; // sample count; 0 for population

    static constexpr double kCauchySchwarzSlack = 1e-9;

    void validate() const {
        if (!(sigma_d2 >= 0.0) || !(sigma_eps2 >= 0.0)) {
            throw InconsistentMomentsError("negative variance at t=" +
                                           std::to_string(t));
        }
        double bound = std::sqrt(sigma_d2 * sigma_eps2) + kCauchySchwarzSlack;
        if (std::abs(cov_d_eps) > bound) {
            throw InconsistentMomentsError(
                "covariance violates Cauchy-Schwarz at t=" + std::to_string(t));
        }
    }
};

/// Point (B, U) in the burden-uncertainty plane.
struct PocState {
    double burden = 0.0;
    double uncertainty = 0.0;
};

/// Consecutive differences of the state trajectory.
struct DeltaReport {
    long t = 0;
    double delta_b = 0.0;
    double delta_u = 0.0;
};

/// Per-transition verdicts for assumptions A1-A4 between steps t and t+1.
struct AssumptionReport {
    long t = 0;
    bool a1_holds = false, a2_holds = false, a3_holds = false,
         a4_holds = false;
    bool a2_strict = false, a3_strict = false, a4_strict = false;
    double tolerance = 0.0;

    bool all_hold() const {
        return a1_holds && a2_holds && a3_holds && a4_holds;
    }
    bool any_strict() const { return a2_strict || a3_strict || a4_strict; }
};

enum class RegimeLabel {
    StabilizationWithoutSimplification,
    SimplifyingStabilization,
    BurdenedDestabilization,
    SimplifyingDestabilization,
    Stationary,
};

inline const char* to_string(RegimeLabel label) {
    switch (label) {
    case RegimeLabel::StabilizationWithoutSimplification:
        return "stabilization_without_simplification";
    case RegimeLabel::SimplifyingStabilization:
        return "simplifying_stabilization";
    case RegimeLabel::BurdenedDestabilization:
        return "burdened_destabilization";
    case RegimeLabel::SimplifyingDestabilization:
        return "simplifying_destabilization";
    case RegimeLabel::Stationary:
        return "stationary";
    }
    return "?";
}

struct DegreeMoments {
    double mu = 0.0;
    double sigma_d2 = 0.0;
};

struct ResidualMoments {
    double sigma_eps2 = 0.0;
    double cov_d_eps = 0.0;
};

/// Probability mass over degree values induced by (graph, selection).
inline std::map<long, double> degree_distribution(
    const DependencyGraph& graph, const SelectionDistribution& selection) {
    selection.validate(graph);
    std::map<long, double> probs;
    for (const auto& [node, w] : selection.weights) {
        if (w > 0.0) {
            probs[static_cast<long>(out_degree(graph, node))] += w;
        }
    }
    return probs;
}

/// Exact enumeration of mu = E[d(X)] and sigma_d^2 = Var(d(X)); no
/// sampling. Weights are grouped by degree first so equal degree
/// distributions produce bit-identical moments.
inline DegreeMoments population_degree_moments(
    const DependencyGraph& graph, const SelectionDistribution& selection) {
    std::map<long, double> probs = degree_distribution(graph, selection);
    double mu = 0.0, second = 0.0;
    for (const auto& [d, p] : probs) {
        double dd = static_cast<double>(d);
        mu += p * dd;
        second += p * dd * dd;
    }
    double var = second - mu * mu;
    return {mu, var < 0.0 ? 0.0 : var};
}

/// Analytic residual variance and degree-residual covariance of the
/// configured noise law. The heteroscedastic mode needs the degree
/// distribution, so it must go through the degree-distribution overload.
inline ResidualMoments population_residual_moments(const NoiseModel& noise,
                                                   double sigma_d2) {
    if (const auto* s = std::get_if<StrictIndependent>(&noise.mode)) {
        return {s->sigma_eps * s->sigma_eps, 0.0};
    }
    if (std::holds_alternative<StrictHeteroscedastic>(noise.mode)) {
        throw Error(
            "heteroscedastic residual moments require a degree distribution");
    }
    const auto& r = std::get<RelaxedLinear>(noise.mode);
    return {r.gamma * r.gamma * sigma_d2 + r.eta_sigma * r.eta_sigma,
            r.gamma * sigma_d2};
}

inline ResidualMoments population_residual_moments(
    const NoiseModel& noise, const std::map<long, double>& degree_probs) {
    if (const auto* h = std::get_if<StrictHeteroscedastic>(&noise.mode)) {
        double var = 0.0;
        for (const auto& [d, p] : degree_probs) {
            double sigma = h->sigma_at(d);
            var += p * sigma * sigma;
        }
        return {var, 0.0};
    }
    double mu = 0.0, second = 0.0;
    for (const auto& [d, p] : degree_probs) {
        double dd = static_cast<double>(d);
        mu += p * dd;
        second += p * dd * dd;
    }
    return population_residual_moments(noise, second - mu * mu);
}

/// B = alpha * mu + beta.
inline double burden_closed_form(const EffortParams& params, double mu) {
    params.validate();
    return params.alpha * mu + params.beta;
}

/// U = alpha^2 * sigma_d^2 + sigma_eps^2 + 2 * alpha * c. With c = 0 this
/// is the uncorrelated special case.
inline double uncertainty_closed_form(const EffortParams& params,
                                      double sigma_d2, double sigma_eps2,
                                      double cov_d_eps) {
    params.validate();
    if (!(sigma_d2 >= 0.0) || !(sigma_eps2 >= 0.0)) {
        throw InconsistentMomentsError("negative variance input");
    }
    double u = params.alpha * params.alpha * sigma_d2 + sigma_eps2 +
               2.0 * params.alpha * cov_d_eps;
    if (u < 0.0) {
        throw InconsistentMomentsError(
            "uncertainty came out negative; summary is inconsistent");
    }
    return u;
}

/// Unbiased (n-1) sample moments of one step's events. Residuals are
/// recomputed as e - alpha*d - beta so simulated and ingested events take
/// the same path.
inline MomentSummary empirical_moment_summary(
    const std::vector<ChangeEvent>& events, const EffortParams& params) {
    params.validate();
    if (events.size() < 2) {
        throw InsufficientDataError("need at least 2 events, got " +
                                    std::to_string(events.size()));
    }
    long t = events.front().t;
    double sum_d = 0.0, sum_e = 0.0;
    for (const ChangeEvent& ev : events) {
        if (ev.t != t) {
            throw MixedTimestepError("events mix timesteps " +
                                     std::to_string(t) + " and " +
                                     std::to_string(ev.t));
        }
        sum_d += static_cast<double>(ev.degree_at_change);
        sum_e += ev.effort - params.alpha *
                                 static_cast<double>(ev.degree_at_change) -
                 params.beta;
    }
    double n = static_cast<double>(events.size());
    double mean_d = sum_d / n;
    double mean_eps = sum_e / n;
    double ss_d = 0.0, ss_eps = 0.0, ss_cross = 0.0;
    for (const ChangeEvent& ev : events) {
        double d = static_cast<double>(ev.degree_at_change);
        double eps = ev.effort - params.alpha * d - params.beta;
        ss_d += (d - mean_d) * (d - mean_d);
        ss_eps += (eps - mean_eps) * (eps - mean_eps);
        ss_cross += (d - mean_d) * (eps - mean_eps);
    }
    MomentSummary out;
    out.t = t;
    out.mu = mean_d;
    out.sigma_d2 = ss_d / (n - 1.0);
    out.sigma_eps2 = ss_eps / (n - 1.0);
    out.cov_d_eps = ss_cross / (n - 1.0);
    out.source = SummarySource::Empirical;
    out.n = events.size();
    return out;
}

struct FitDiagnostics {
    double residual_variance = 0.0; // (n-2)-denominator
    double r_squared = 0.0;
    double slope_std_err = 0.0;
    std::size_t n = 0;
    bool alpha_nonpositive = false;
    bool beta_negative = false;
};

struct EffortFit {
    double alpha = 0.0;
    double beta = 0.0;
    FitDiagnostics diagnostics;
};

/// Ordinary least squares of effort on degree. Out-of-model estimates
/// (alpha <= 0, beta < 0) are flagged in diagnostics, never clamped.
inline EffortFit fit_effort_params(const std::vector<ChangeEvent>& events) {
    if (events.size() < 2) {
        throw InsufficientDataError("need at least 2 events for a fit");
    }
    double n = static_cast<double>(events.size());
    double mean_d = 0.0, mean_e = 0.0;
    for (const ChangeEvent& ev : events) {
        mean_d += static_cast<double>(ev.degree_at_change);
        mean_e += ev.effort;
    }
    mean_d /= n;
    mean_e /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const ChangeEvent& ev : events) {
        double dx = static_cast<double>(ev.degree_at_change) - mean_d;
        double dy = ev.effort - mean_e;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        throw DegenerateDesignError("all events share one degree value");
    }
    EffortFit fit;
    fit.alpha = sxy / sxx;
    fit.beta = mean_e - fit.alpha * mean_d;
    double ss_res = 0.0;
    for (const ChangeEvent& ev : events) {
        double r = ev.effort - fit.alpha *
                                   static_cast<double>(ev.degree_at_change) -
                   fit.beta;
        ss_res += r * r;
    }
    fit.diagnostics.n = events.size();
    fit.diagnostics.residual_variance =
        events.size() > 2 ? ss_res / (n - 2.0) : 0.0;
    fit.diagnostics.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.diagnostics.slope_std_err =
        std::sqrt(fit.diagnostics.residual_variance / sxx);
    fit.diagnostics.alpha_nonpositive = fit.alpha <= 0.0;
    fit.diagnostics.beta_negative = fit.beta < 0.0;
    return fit;
}

/// (B, U) from one summary via the closed forms.
inline PocState poc_state(const MomentSummary& summary,
                          const EffortParams& params) {
    summary.validate();
    return {burden_closed_form(params, summary.mu),
            uncertainty_closed_form(params, summary.sigma_d2,
                                    summary.sigma_eps2, summary.cov_d_eps)};
}

/// Exact consecutive differences of a state series.
inline std::vector<DeltaReport> deltas(const std::vector<PocState>& states) {
    if (states.size() < 2) {
        throw InsufficientDataError("need at least 2 states for deltas");
    }
    std::vector<DeltaReport> out;
    out.reserve(states.size() - 1);
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        out.push_back({static_cast<long>(i),
                       states[i + 1].burden - states[i].burden,
                       states[i + 1].uncertainty - states[i].uncertainty});
    }
    return out;
}

/// A1-A4 verdicts per transition. `tolerance` is slack for empirical
/// series; pass 0 for exact population moments. aK_strict means the
/// inequality holds strictly beyond the tolerance.
inline std::vector<AssumptionReport> check_assumptions(
    const std::vector<MomentSummary>& summaries, double tolerance) {
    if (summaries.size() < 2) {
        throw InsufficientDataError("need at least 2 summaries");
    }
    if (!(tolerance >= 0.0)) {
        throw Error("tolerance must be >= 0");
    }
    std::vector<AssumptionReport> out;
    out.reserve(summaries.size() - 1);
    for (std::size_t i = 0; i + 1 < summaries.size(); ++i) {
        const MomentSummary& cur = summaries[i];
        const MomentSummary& nxt = summaries[i + 1];
        if (nxt.t != cur.t + 1) {
            throw NonConsecutiveSeriesError(
                "summaries at t=" + std::to_string(cur.t) + " and t=" +
                std::to_string(nxt.t) + " are not consecutive");
        }
        AssumptionReport r;
        r.t = cur.t;
        r.tolerance = tolerance;
        r.a1_holds = nxt.mu >= cur.mu - tolerance;
        r.a2_holds = nxt.sigma_d2 <= cur.sigma_d2 + tolerance;
        r.a3_holds = nxt.sigma_eps2 <= cur.sigma_eps2 + tolerance;
        r.a4_holds = nxt.cov_d_eps <= cur.cov_d_eps + tolerance;
        r.a2_strict = nxt.sigma_d2 < cur.sigma_d2 - tolerance;
        r.a3_strict = nxt.sigma_eps2 < cur.sigma_eps2 - tolerance;
        r.a4_strict = nxt.cov_d_eps < cur.cov_d_eps - tolerance;
        out.push_back(r);
    }
    return out;
}

/// Total classification of the (dB, dU) plane. Stabilization requires
/// dU strictly negative, so the dU = 0 boundary is its own label.
inline RegimeLabel classify_regime(const DeltaReport& delta) {
    if (delta.delta_u == 0.0) {
        return RegimeLabel::Stationary;
    }
    if (delta.delta_u < 0.0) {
        return delta.delta_b >= 0.0
                   ? RegimeLabel::StabilizationWithoutSimplification
                   : RegimeLabel::SimplifyingStabilization;
    }
    return delta.delta_b >= 0.0 ? RegimeLabel::BurdenedDestabilization
                                : RegimeLabel::SimplifyingDestabilization;
}

struct TheoremStepVerdict {
    long t = 0;
    bool vacuous = false;  // a precondition failed; no claim at this step
    bool violated = false;
    bool strict_branch = false; // some A2-A4 strict, so dU < 0 was asserted
    double delta_b = 0.0;
    double delta_u = 0.0;
    AssumptionReport assumptions;
    std::string message;
};

struct TheoremReport {
    std::vector<TheoremStepVerdict> steps;
    std::size_t verified = 0;
    std::size_t vacuous = 0;
    std::size_t violations = 0;

    /// Full moment data of each counterexample transition.
    std::vector<std::pair<MomentSummary, MomentSummary>> counterexamples;
};

/// Checks the stabilization-without-simplification theorem on an exact
/// moment series: wherever A1-A4 hold, dB >= 0 and dU <= 0 must follow,
/// with dU < 0 whenever any of A2-A4 is strict. Steps whose preconditions
/// fail are vacuous, not violations. Empirical series are rejected; they
/// get check_assumptions + classify_regime instead.
inline TheoremReport verify_theorem(
    const std::vector<MomentSummary>& summaries, const EffortParams& params) {
    params.validate();
    for (const MomentSummary& s : summaries) {
        if (s.source != SummarySource::Population) {
            throw EmpiricalSourceError(
                "theorem verification requires population summaries");
        }
        s.validate();
    }
    std::vector<AssumptionReport> assumptions =
        check_assumptions(summaries, kExactTolerance);

    TheoremReport report;
    for (std::size_t i = 0; i < assumptions.size(); ++i) {
        const MomentSummary& cur = summaries[i];
        const MomentSummary& nxt = summaries[i + 1];
        TheoremStepVerdict v;
        v.t = cur.t;
        v.assumptions = assumptions[i];
        PocState a = poc_state(cur, params);
        PocState b = poc_state(nxt, params);
        v.delta_b = b.burden - a.burden;
        v.delta_u = b.uncertainty - a.uncertainty;
        if (!assumptions[i].all_hold()) {
            v.vacuous = true;
            v.message = "preconditions unmet; no claim";
            ++report.vacuous;
        } else {
            v.strict_branch = assumptions[i].any_strict();
            bool ok = v.delta_b >= -kExactTolerance &&
                      v.delta_u <= kExactTolerance;
            if (ok && v.strict_branch) {
                ok = v.delta_u < 0.0;
            }
            if (ok) {
                ++report.verified;
            } else {
                v.violated = true;
                v.message = "theorem conclusion failed";
                ++report.violations;
                report.counterexamples.emplace_back(cur, nxt);
            }
        }
        report.steps.push_back(std::move(v));
    }
    return report;
}

} // namespace poc

#endif // POC_MOMENTS_HPP
