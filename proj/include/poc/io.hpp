#ifndef POC_IO_HPP
#define POC_IO_HPP

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include <poc/errors.hpp>
#include <poc/format.hpp>
#include <poc/ingest.hpp>
#include <poc/moments.hpp>

namespace poc {

inline constexpr int kOutputFormatVersion = 1;

inline constexpr const char* kTrajectoryHeader =
    "t,mu,sigma_d2,sigma_eps2,cov_d_eps,B,U,delta_B,delta_U,a1,a2,a3,a4,"
    "regime";

/// One row per step. Transition columns (deltas, a1..a4, regime) describe
/// the step -> step+1 move and are empty on the final row.
inline void write_series_csv(std::ostream& out,
                             const std::vector<MomentSummary>& summaries,
                             const std::vector<PocState>& states,
                             const std::vector<DeltaReport>& delta_reports,
                             const std::vector<AssumptionReport>& assumptions,
                             const std::vector<RegimeLabel>& regimes) {
    out << kTrajectoryHeader << "\n";
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const MomentSummary& s = summaries[i];
        out << s.t << "," << format_double(s.mu) << ","
            << format_double(s.sigma_d2) << "," << format_double(s.sigma_eps2)
            << "," << format_double(s.cov_d_eps) << ","
            << format_double(states[i].burden) << ","
            << format_double(states[i].uncertainty) << ",";
        if (i < delta_reports.size()) {
            const AssumptionReport& a = assumptions[i];
            out << format_double(delta_reports[i].delta_b) << ","
                << format_double(delta_reports[i].delta_u) << ","
                << (a.a1_holds ? 1 : 0) << "," << (a.a2_holds ? 1 : 0) << ","
                << (a.a3_holds ? 1 : 0) << "," << (a.a4_holds ? 1 : 0) << ","
                << to_string(regimes[i]);
        } else {
            out << ",,,,,,";
        }
        out << "\n";
    }
}

inline nlohmann::ordered_json series_json(
    const std::vector<MomentSummary>& summaries,
    const std::vector<PocState>& states,
    const std::vector<DeltaReport>& delta_reports,
    const std::vector<AssumptionReport>& assumptions,
    const std::vector<RegimeLabel>& regimes) {
    nlohmann::ordered_json doc;
    doc["format_version"] = kOutputFormatVersion;
    doc["steps"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const MomentSummary& s = summaries[i];
        nlohmann::ordered_json step;
        step["t"] = s.t;
        step["mu"] = s.mu;
        step["sigma_d2"] = s.sigma_d2;
        step["sigma_eps2"] = s.sigma_eps2;
        step["cov_d_eps"] = s.cov_d_eps;
        step["source"] = s.source == SummarySource::Population ? "population"
                                                               : "empirical";
        if (s.source == SummarySource::Empirical) {
            step["n"] = s.n;
        }
        step["B"] = states[i].burden;
        step["U"] = states[i].uncertainty;
        if (i < delta_reports.size()) {
            step["delta_B"] = delta_reports[i].delta_b;
            step["delta_U"] = delta_reports[i].delta_u;
            const AssumptionReport& a = assumptions[i];
            step["a1"] = a.a1_holds;
            step["a2"] = a.a2_holds;
            step["a3"] = a.a3_holds;
            step["a4"] = a.a4_holds;
            step["regime"] = to_string(regimes[i]);
        } else {
            step["delta_B"] = nullptr;
            step["delta_U"] = nullptr;
            step["a1"] = nullptr;
            step["a2"] = nullptr;
            step["a3"] = nullptr;
            step["a4"] = nullptr;
            step["regime"] = nullptr;
        }
        doc["steps"].push_back(std::move(step));
    }
    return doc;
}

/// Reads a population moment series from CSV with columns
/// t,mu,sigma_d2,sigma_eps2,cov_d_eps (header optional).
inline std::vector<MomentSummary> parse_moment_series(std::istream& in) {
    std::vector<MomentSummary> out;
    std::string raw;
    long line_no = 0;
    bool first = true;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = detail::strip_comment(raw);
        while (!line.empty() &&
               (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        if (first && line.rfind("t,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            std::size_t c = line.find(',', pos);
            fields.push_back(line.substr(pos, c - pos));
            if (c == std::string::npos) {
                break;
            }
            pos = c + 1;
        }
        if (fields.size() != 5) {
            throw ParseError(line_no,
                             "expected 't,mu,sigma_d2,sigma_eps2,cov_d_eps'");
        }
        MomentSummary s;
        s.t = detail::parse_long(fields[0], line_no);
        s.mu = detail::parse_double(fields[1], line_no);
        s.sigma_d2 = detail::parse_double(fields[2], line_no);
        s.sigma_eps2 = detail::parse_double(fields[3], line_no);
        s.cov_d_eps = detail::parse_double(fields[4], line_no);
        s.source = SummarySource::Population;
        out.push_back(s);
    }
    return out;
}

} // namespace poc

#endif // POC_IO_HPP
