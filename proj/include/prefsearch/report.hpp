#pragma once
// Evaluation report over a set of session logs. Produces four CSV tables:
//
//   recall.csv      session_id,engine,group,threshold,seen,relevant,recall
//   ndcg.csv        session_id,engine,group,event_index,action,time_s,ndcg
//   loess.csv       engine,group,x,y,degree_used,degraded
//   completion.csv  engine,group,sessions,median_completion_s
//
// Group labels come from a side-car mapping session_id -> label; sessions
// without a label are reported as "unlabeled". LOESS curves and completion
// medians are additionally computed over every session of an engine under
// the group "overall".

#include "prefsearch/engine.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/metrics.hpp"
#include "prefsearch/relevance.hpp"
#include "prefsearch/session.hpp"

#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace prefsearch {

using GroupMap = std::map<std::string, std::string>;

inline constexpr const char* kOverallGroup = "overall";
inline constexpr const char* kUnlabeledGroup = "unlabeled";

struct ReportOptions {
    std::size_t grid_points = 50;
    LoessOptions loess;
    std::size_t ndcg_cutoff = kNdcgCutoff;
};

struct ReportBundle {
    std::string recall_csv;
    std::string ndcg_csv;
    std::string loess_csv;
    std::string completion_csv;
    std::vector<std::string> errors;    // logs excluded from the report
    std::vector<std::string> warnings;  // e.g. groups too small for a curve

    void write_to(const std::string& dir) const {
        std::filesystem::create_directories(dir);
        const std::filesystem::path base(dir);
        detail::write_file((base / "recall.csv").string(), recall_csv);
        detail::write_file((base / "ndcg.csv").string(), ndcg_csv);
        detail::write_file((base / "loess.csv").string(), loess_csv);
        detail::write_file((base / "completion.csv").string(), completion_csv);
    }
};

// session_id,label lines; a header line "session_id,label" is skipped.
inline GroupMap parse_groups_csv(const std::string& text) {
    GroupMap groups;
    std::size_t start = 0;
    std::size_t lineno = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("groups csv line " + std::to_string(lineno) + ": expected session_id,label");
        }
        auto id = line.substr(0, comma);
        auto label = line.substr(comma + 1);
        if (lineno == 1 && id == "session_id") continue;
        groups[id] = label;
        if (end == text.size()) break;
    }
    return groups;
}

namespace detail {

inline std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

inline ReportBundle report(std::vector<SessionLog> logs, const SearchContext& ctx, const RelevanceSpec& spec,
                           const GroupMap& groups, const ReportOptions& opts = {}) {
    using detail::csv_field;
    using detail::fmt_num;

    const auto judgments = judge_all(ctx.catalog(), spec);
    std::sort(logs.begin(), logs.end(),
              [](const SessionLog& a, const SessionLog& b) { return a.header.session_id < b.header.session_id; });

    auto group_of = [&](const std::string& id) {
        auto it = groups.find(id);
        return it == groups.end() ? std::string(kUnlabeledGroup) : it->second;
    };

    ReportBundle out;
    out.recall_csv = "session_id,engine,group,threshold,seen,relevant,recall\n";
    out.ndcg_csv = "session_id,engine,group,event_index,action,time_s,ndcg\n";
    out.loess_csv = "engine,group,x,y,degree_used,degraded\n";
    out.completion_csv = "engine,group,sessions,median_completion_s\n";

    // engine -> group -> points / completion times
    std::map<std::string, std::map<std::string, std::vector<Point2>>> scatter;
    std::map<std::string, std::map<std::string, std::vector<double>>> completion;

    for (const auto& log : logs) {
        const auto& id = log.header.session_id;
        try {
            replay(log, ctx);
        } catch (const Error& e) {
            out.errors.push_back("session " + id + ": " + e.what());
            continue;
        }
        const std::string engine = to_string(log.header.engine);
        const auto group = group_of(id);

        for (int threshold : recall_thresholds()) {
            const auto c = seen_counts(log, judgments, threshold);
            out.recall_csv += csv_field(id) + "," + engine + "," + csv_field(group) + "," +
                              std::to_string(threshold) + "," + std::to_string(c.seen) + "," +
                              std::to_string(c.relevant) + "," + (c.relevant ? fmt_num(c.ratio()) : "NA") + "\n";
        }
        for (std::size_t i = 0; i < log.events.size(); ++i) {
            const auto& e = log.events[i];
            if (!is_search_action(e.action)) continue;
            const double t = static_cast<double>(e.timestamp_ms) / 1000.0;
            const double v = ndcg(e.ranked_ids, judgments, opts.ndcg_cutoff);
            out.ndcg_csv += csv_field(id) + "," + engine + "," + csv_field(group) + "," + std::to_string(i) + "," +
                            to_string(e.action) + "," + fmt_num(t) + "," + fmt_num(v) + "\n";
            scatter[engine][group].push_back({t, v});
            scatter[engine][kOverallGroup].push_back({t, v});
        }
        if (!log.events.empty()) {
            const double done = static_cast<double>(log.events.back().timestamp_ms) / 1000.0;
            completion[engine][group].push_back(done);
            completion[engine][kOverallGroup].push_back(done);
        }
    }

    for (const auto& [engine, by_group] : scatter) {
        const auto& all = by_group.at(kOverallGroup);
        double lo = all.front().x;
        double hi = all.front().x;
        for (const auto& p : all) {
            lo = std::min(lo, p.x);
            hi = std::max(hi, p.x);
        }
        const auto grid = linear_grid(lo, hi, opts.grid_points);
        for (const auto& [group, points] : by_group) {
            try {
                for (const auto& s : loess(points, grid, opts.loess)) {
                    out.loess_csv += engine + "," + csv_field(group) + "," + fmt_num(s.x) + "," + fmt_num(s.y) + "," +
                                     std::to_string(s.degree_used) + "," + (s.degraded ? "1" : "0") + "\n";
                }
            } catch (const EvalError& e) {
                out.warnings.push_back("loess " + engine + "/" + group + ": " + e.what());
            }
        }
    }
    for (const auto& [engine, by_group] : completion) {
        for (const auto& [group, times] : by_group) {
            out.completion_csv += engine + "," + csv_field(group) + "," + std::to_string(times.size()) + "," +
                                  fmt_num(detail::median(times)) + "\n";
        }
    }
    return out;
}

} // namespace prefsearch
