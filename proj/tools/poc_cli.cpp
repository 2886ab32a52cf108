// Command-line surface for the burden-uncertainty simulator:
//   simulate  run a scenario and write the trajectory table
//   analyze   ingest snapshots + event log and write the empirical table
//   verify    check the stabilization theorem on a population moment series
//   moments   print closed-form B and U for given summary values
//
// Exit codes: 0 success, 1 verification violation, 2 usage/config error,
// 3 data/parse error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <poc/config.hpp>
#include <poc/format.hpp>
#include <poc/ingest.hpp>
#include <poc/io.hpp>
#include <poc/moments.hpp>
#include <poc/scenario.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed,
                           std::uint64_t config_seed) {
    if (flag_seed) {
        return *flag_seed;
    }
    if (const char* env = std::getenv("POC_SEED")) {
        return std::stoull(env);
    }
    return config_seed;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw poc::ScenarioError("cannot open file: " + path);
    }
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw poc::ScenarioError("cannot open output file: " + path);
    }
    return out;
}

void write_series(std::ostream& out, const std::string& format,
                  const std::vector<poc::MomentSummary>& summaries,
                  const std::vector<poc::PocState>& states,
                  const std::vector<poc::DeltaReport>& deltas,
                  const std::vector<poc::AssumptionReport>& assumptions,
                  const std::vector<poc::RegimeLabel>& regimes) {
    if (format == "json") {
        out << poc::series_json(summaries, states, deltas, assumptions,
                                regimes)
                   .dump(2)
            << "\n";
    } else {
        poc::write_series_csv(out, summaries, states, deltas, assumptions,
                              regimes);
    }
}

// True when the failure is about the data contents rather than the setup.
int classify_error_exit(const poc::Error& e) {
    if (dynamic_cast<const poc::ScenarioError*>(&e)) {
        return kExitUsage;
    }
    return kExitData;
}

struct CommonOpts {
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
    std::string out_path;
};

int run_simulate(const std::string& scenario_path, const CommonOpts& opts,
                 long replications, const std::string& export_snapshots,
                 const std::string& export_events) {
    std::ifstream in = open_input(scenario_path);
    poc::Scenario scenario = poc::load_scenario(in);
    scenario.seed = resolve_seed(opts.seed, scenario.seed);

    std::vector<poc::PocTrajectory> trajs =
        poc::run_simulation(scenario, replications);
    const poc::PocTrajectory& traj = trajs.front();

    if (!export_snapshots.empty()) {
        std::ofstream snap = open_output(export_snapshots);
        poc::write_snapshots(snap, traj.graphs);
    }
    if (!export_events.empty()) {
        std::ofstream ev = open_output(export_events);
        poc::write_events(ev, traj.events);
    }

    if (opts.out_path.empty()) {
        write_series(std::cout, opts.format, traj.population, traj.states,
                     traj.delta_reports, traj.assumption_reports,
                     traj.regimes);
    } else {
        std::ofstream out = open_output(opts.out_path);
        write_series(out, opts.format, traj.population, traj.states,
                     traj.delta_reports, traj.assumption_reports,
                     traj.regimes);
    }
    return kExitOk;
}

int run_analyze(const std::string& snapshots_path,
                const std::string& events_path,
                std::optional<double> alpha, std::optional<double> beta,
                double tolerance, const CommonOpts& opts) {
    std::ifstream snap_in = open_input(snapshots_path);
    std::vector<poc::DependencyGraph> snapshots =
        poc::parse_snapshots(snap_in);
    std::ifstream ev_in = open_input(events_path);
    std::vector<poc::EventLogRecord> records = poc::parse_events(ev_in);

    std::optional<poc::EffortParams> params;
    if (alpha || beta) {
        if (!alpha || !beta) {
            throw poc::ScenarioError("--alpha and --beta must come together");
        }
        params = poc::EffortParams{*alpha, *beta};
    }
    poc::AnalysisResult result =
        poc::analyze(snapshots, records, params, tolerance);

    if (result.fit) {
        std::cerr << "fitted alpha=" << poc::format_double(result.fit->alpha)
                  << " beta=" << poc::format_double(result.fit->beta)
                  << " r_squared="
                  << poc::format_double(result.fit->diagnostics.r_squared)
                  << "\n";
    }
    if (opts.out_path.empty()) {
        write_series(std::cout, opts.format, result.summaries, result.states,
                     result.delta_reports, result.assumption_reports,
                     result.regimes);
    } else {
        std::ofstream out = open_output(opts.out_path);
        write_series(out, opts.format, result.summaries, result.states,
                     result.delta_reports, result.assumption_reports,
                     result.regimes);
    }
    return kExitOk;
}

int run_verify(const std::string& scenario_path,
               const std::string& moments_path, const CommonOpts& opts,
               double alpha, double beta) {
    std::vector<poc::MomentSummary> series;
    poc::EffortParams params{alpha, beta};

    if (!scenario_path.empty()) {
        std::ifstream in = open_input(scenario_path);
        poc::Scenario scenario = poc::load_scenario(in);
        scenario.seed = resolve_seed(opts.seed, scenario.seed);
        series = poc::run_simulation(scenario, 1).front().population;
        params = scenario.params;
    } else {
        std::ifstream in = open_input(moments_path);
        series = poc::parse_moment_series(in);
    }

    poc::TheoremReport report = poc::verify_theorem(series, params);
    std::cout << "steps: " << report.steps.size() << "\n"
              << "verified: " << report.verified << "\n"
              << "vacuous: " << report.vacuous << "\n"
              << "violations: " << report.violations << "\n";
    for (const poc::TheoremStepVerdict& v : report.steps) {
        if (v.violated) {
            std::cout << "counterexample at t=" << v.t
                      << " delta_B=" << poc::format_double(v.delta_b)
                      << " delta_U=" << poc::format_double(v.delta_u) << "\n";
        }
    }
    for (const auto& [cur, nxt] : report.counterexamples) {
        std::cout << "  moments t=" << cur.t << ": mu="
                  << poc::format_double(cur.mu)
                  << " sigma_d2=" << poc::format_double(cur.sigma_d2)
                  << " sigma_eps2=" << poc::format_double(cur.sigma_eps2)
                  << " cov=" << poc::format_double(cur.cov_d_eps) << " -> mu="
                  << poc::format_double(nxt.mu)
                  << " sigma_d2=" << poc::format_double(nxt.sigma_d2)
                  << " sigma_eps2=" << poc::format_double(nxt.sigma_eps2)
                  << " cov=" << poc::format_double(nxt.cov_d_eps) << "\n";
    }
    return report.violations == 0 ? kExitOk : kExitViolation;
}

int run_moments(double alpha, double beta, double mu, double sigma_d2,
                double sigma_eps2, double cov, const std::string& format) {
    poc::EffortParams params{alpha, beta};
    double b = poc::burden_closed_form(params, mu);
    double u = poc::uncertainty_closed_form(params, sigma_d2, sigma_eps2, cov);
    if (format == "json") {
        nlohmann::ordered_json doc;
        doc["format_version"] = poc::kOutputFormatVersion;
        doc["B"] = b;
        doc["U"] = u;
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "B=" << poc::format_double(b)
                  << " U=" << poc::format_double(u) << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"burden-uncertainty simulator and analyzer"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string scenario_path, snapshots_path, events_path, moments_path;
    std::string export_snapshots, export_events;
    long replications = 1;
    double tolerance = 1e-9;
    std::optional<double> opt_alpha, opt_beta;
    double alpha = 1.0, beta = 0.0;
    double mu = 0.0, sigma_d2 = 0.0, sigma_eps2 = 0.0, cov = 0.0;

    CLI::App* simulate = app.add_subcommand(
        "simulate", "run a scenario and write the trajectory table "
                    "(columns: t,mu,sigma_d2,sigma_eps2,cov_d_eps,B,U,"
                    "delta_B,delta_U,a1,a2,a3,a4,regime)");
    simulate->add_option("--scenario", scenario_path, "scenario config file")
        ->required();
    simulate->add_option("--seed", opts.seed,
                         "master seed (overrides config and POC_SEED)");
    simulate->add_option("--replications", replications,
                         "independent replications (>= 1)");
    simulate->add_option("--format", opts.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    simulate->add_option("--out", opts.out_path, "output path (default stdout)");
    simulate->add_option("--export-snapshots", export_snapshots,
                         "also write the per-step graphs in snapshot format");
    simulate->add_option("--export-events", export_events,
                         "also write the event stream as a t,node,effort log");

    CLI::App* analyze = app.add_subcommand(
        "analyze", "ingest snapshots + events and write the empirical table");
    analyze->add_option("--snapshots", snapshots_path, "snapshot series file")
        ->required();
    analyze->add_option("--events", events_path, "event log file")->required();
    analyze->add_option("--alpha", opt_alpha,
                        "known effort slope (fitted by OLS when absent)");
    analyze->add_option("--beta", opt_beta, "known base effort");
    analyze->add_option("--tolerance", tolerance,
                        "slack for the A1-A4 checks");
    analyze->add_option("--format", opts.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    analyze->add_option("--out", opts.out_path, "output path (default stdout)");

    CLI::App* verify = app.add_subcommand(
        "verify", "check the stabilization theorem on a population series");
    verify->add_option("--scenario", scenario_path,
                       "scenario config to simulate (population path)");
    verify->add_option("--moments", moments_path,
                       "CSV of t,mu,sigma_d2,sigma_eps2,cov_d_eps");
    verify->add_option("--seed", opts.seed, "master seed override");
    verify->add_option("--alpha", alpha, "effort slope for --moments input");
    verify->add_option("--beta", beta, "base effort for --moments input");

    CLI::App* moments = app.add_subcommand(
        "moments", "print closed-form B and U for given summary values");
    moments->add_option("--alpha", alpha)->required();
    moments->add_option("--beta", beta)->required();
    moments->add_option("--mu", mu)->required();
    moments->add_option("--sigma-d2", sigma_d2)->required();
    moments->add_option("--sigma-eps2", sigma_eps2)->required();
    moments->add_option("--cov", cov);
    moments->add_option("--format", opts.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(scenario_path, opts, replications,
                                export_snapshots, export_events);
        }
        if (analyze->parsed()) {
            return run_analyze(snapshots_path, events_path, opt_alpha,
                               opt_beta, tolerance, opts);
        }
        if (verify->parsed()) {
            if (scenario_path.empty() == moments_path.empty()) {
                std::cerr << "verify: exactly one of --scenario or --moments "
                             "is required\n";
                return kExitUsage;
            }
            return run_verify(scenario_path, moments_path, opts, alpha, beta);
        }
        return run_moments(alpha, beta, mu, sigma_d2, sigma_eps2, cov,
                           opts.format);
    } catch (const poc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_error_exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
