#ifndef POC_INGEST_HPP
#define POC_INGEST_HPP

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <poc/change_process.hpp>
#include <poc/errors.hpp>
#include <poc/format.hpp>
#include <poc/graph.hpp>
#include <poc/moments.hpp>

namespace poc {

/// One parsed change record from an event log; the degree is joined in
/// later from the matching snapshot.
struct EventLogRecord {
    long t = 0;
    NodeId node;
    double effort = 0.0;
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
    std::size_t pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        out.push_back(tok);
    }
    return out;
}

inline long parse_long(const std::string& tok, long line) {
    errno = 0;
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (errno != 0 || end == tok.c_str() || *end != '\0') {
        throw ParseError(line, "not an integer: '" + tok + "'");
    }
    return v;
}

inline double parse_double(const std::string& tok, long line) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') {
        throw ParseError(line, "not a number: '" + tok + "'");
    }
    return v;
}

} // namespace detail

/// Parses a snapshot series. Grammar (line-oriented, `#` starts a comment):
///   t <int>            begins a block; t strictly increasing across blocks
///   node <id>          declares an entity
///   edge <src> <dst>   declares a dependency between declared entities
/// Every malformed line is rejected with its line number.
inline std::vector<DependencyGraph> parse_snapshots(std::istream& in) {
    std::vector<DependencyGraph> graphs;
    std::optional<long> block_t;
    std::set<NodeId> nodes;
    std::vector<Edge> edges;
    std::set<Edge> edge_set;
    long line_no = 0;

    auto flush = [&](long at_line) {
        if (!block_t) {
            return;
        }
        try {
            graphs.emplace_back(std::move(nodes), edges, *block_t);
        } catch (const Error& e) {
            throw ParseError(at_line, e.what());
        }
        nodes.clear();
        edges.clear();
        edge_set.clear();
    };

    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::vector<std::string> toks =
            detail::split_ws(detail::strip_comment(raw));
        if (toks.empty()) {
            continue;
        }
        if (toks[0] == "t") {
            if (toks.size() != 2) {
                throw ParseError(line_no, "expected 't <int>'");
            }
            long t = detail::parse_long(toks[1], line_no);
            if (t < 0) {
                throw ParseError(line_no, "timestep must be >= 0");
            }
            if (block_t && t <= *block_t) {
                throw ParseError(line_no,
                                 "timestep " + std::to_string(t) +
                                     " not greater than previous " +
                                     std::to_string(*block_t));
            }
            flush(line_no);
            block_t = t;
        } else if (toks[0] == "node") {
            if (!block_t) {
                throw ParseError(line_no, "'node' before any 't' block");
            }
            if (toks.size() != 2) {
                throw ParseError(line_no, "expected 'node <id>'");
            }
            if (!nodes.insert(toks[1]).second) {
                throw ParseError(line_no, "duplicate node: " + toks[1]);
            }
        } else if (toks[0] == "edge") {
            if (!block_t) {
                throw ParseError(line_no, "'edge' before any 't' block");
            }
            if (toks.size() != 3) {
                throw ParseError(line_no, "expected 'edge <src> <dst>'");
            }
            if (nodes.count(toks[1]) == 0) {
                throw ParseError(line_no,
                                 "edge references undeclared node: " +
                                     toks[1]);
            }
            if (nodes.count(toks[2]) == 0) {
                throw ParseError(line_no,
                                 "edge references undeclared node: " +
                                     toks[2]);
            }
            Edge e{toks[1], toks[2]};
            if (!edge_set.insert(e).second) {
                throw ParseError(line_no, "duplicate edge: " + toks[1] +
                                              " -> " + toks[2]);
            }
            edges.push_back(std::move(e));
        } else {
            throw ParseError(line_no, "unknown directive: '" + toks[0] + "'");
        }
    }
    flush(line_no);
    return graphs;
}

/// Parses an event log: CSV `t,node,effort`, one record per line, `#`
/// comments ignored, optional literal header `t,node,effort`.
inline std::vector<EventLogRecord> parse_events(std::istream& in) {
    std::vector<EventLogRecord> records;
    std::string raw;
    long line_no = 0;
    bool first_record = true;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = detail::strip_comment(raw);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                                 line.back() == '\t')) {
            line.pop_back();
        }
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) {
            continue;
        }
        line = line.substr(start);
        if (first_record && line == "t,node,effort") {
            first_record = false;
            continue;
        }
        first_record = false;
        std::size_t c1 = line.find(',');
        std::size_t c2 =
            c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos) {
            throw ParseError(line_no, "expected 't,node,effort'");
        }
        EventLogRecord rec;
        rec.t = detail::parse_long(line.substr(0, c1), line_no);
        rec.node = line.substr(c1 + 1, c2 - c1 - 1);
        if (rec.node.empty()) {
            throw ParseError(line_no, "empty node id");
        }
        rec.effort = detail::parse_double(line.substr(c2 + 1), line_no);
        if (!std::isfinite(rec.effort)) {
            throw ParseError(line_no, "non-finite effort");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

/// Writes a snapshot series in the grammar parse_snapshots reads.
inline void write_snapshots(std::ostream& out,
                            const std::vector<DependencyGraph>& graphs) {
    for (const DependencyGraph& g : graphs) {
        out << "t " << g.timestep() << "\n";
        for (const NodeId& v : g.nodes()) {
            out << "node " << v << "\n";
        }
        for (const Edge& e : g.edges()) {
            out << "edge " << e.first << " " << e.second << "\n";
        }
    }
}

/// Writes an event log; efforts round-trip bit-exactly.
inline void write_events(std::ostream& out,
                         const std::vector<ChangeEvent>& events) {
    out << "t,node,effort\n";
    for (const ChangeEvent& ev : events) {
        out << ev.t << "," << ev.target << "," << format_double(ev.effort)
            << "\n";
    }
}

struct AnalysisResult {
    EffortParams params;
    std::optional<EffortFit> fit; // present when params were estimated
    std::vector<MomentSummary> summaries;
    std::vector<PocState> states;
    std::vector<DeltaReport> delta_reports;       // t = earlier step label
    std::vector<AssumptionReport> assumption_reports;
    std::vector<RegimeLabel> regimes;
};

/// Joins events with degrees from the matching snapshots and produces the
/// per-step empirical analysis. When params are absent they are fitted by
/// OLS over the pooled events first. Steps are compared in observed order;
/// step labels are opaque and may be non-contiguous.
inline AnalysisResult analyze(const std::vector<DependencyGraph>& snapshots,
                              const std::vector<EventLogRecord>& records,
                              std::optional<EffortParams> params,
                              double tolerance = 1e-9) {
    std::map<long, const DependencyGraph*> by_t;
    for (const DependencyGraph& g : snapshots) {
        by_t[g.timestep()] = &g;
    }

    std::map<long, std::vector<ChangeEvent>> by_step;
    for (const EventLogRecord& rec : records) {
        auto it = by_t.find(rec.t);
        if (it == by_t.end()) {
            throw Error("event at t=" + std::to_string(rec.t) +
                        " has no matching snapshot");
        }
        if (!it->second->has_node(rec.node)) {
            throw UnknownNodeError(rec.node + " at t=" +
                                   std::to_string(rec.t));
        }
        ChangeEvent ev;
        ev.t = rec.t;
        ev.target = rec.node;
        ev.degree_at_change =
            static_cast<long>(out_degree(*it->second, rec.node));
        ev.effort = rec.effort;
        by_step[rec.t].push_back(std::move(ev));
    }
    if (by_step.empty()) {
        throw InsufficientDataError("no events to analyze");
    }

    AnalysisResult result;
    if (params) {
        params->validate();
        result.params = *params;
    } else {
        std::vector<ChangeEvent> pooled;
        for (const auto& [t, evs] : by_step) {
            pooled.insert(pooled.end(), evs.begin(), evs.end());
        }
        result.fit = fit_effort_params(pooled);
        result.params = EffortParams{result.fit->alpha, result.fit->beta};
        result.params.validate();
    }

    for (const auto& [t, evs] : by_step) {
        if (evs.size() < 2) {
            throw InsufficientDataError("step t=" + std::to_string(t) +
                                        " has fewer than 2 events");
        }
        result.summaries.push_back(
            empirical_moment_summary(evs, result.params));
        result.states.push_back(
            poc_state(result.summaries.back(), result.params));
    }

    if (result.summaries.size() >= 2) {
        // check_assumptions wants consecutive t; observed step labels may
        // have gaps, so compare under a contiguous reindex and restore the
        // original labels in the reports.
        std::vector<MomentSummary> reindexed = result.summaries;
        for (std::size_t i = 0; i < reindexed.size(); ++i) {
            reindexed[i].t = static_cast<long>(i);
        }
        result.assumption_reports = check_assumptions(reindexed, tolerance);
        result.delta_reports = deltas(result.states);
        for (std::size_t i = 0; i + 1 < result.summaries.size(); ++i) {
            result.assumption_reports[i].t = result.summaries[i].t;
            result.delta_reports[i].t = result.summaries[i].t;
            result.regimes.push_back(
                classify_regime(result.delta_reports[i]));
        }
    }
    return result;
}

} // namespace poc

#endif // POC_INGEST_HPP
