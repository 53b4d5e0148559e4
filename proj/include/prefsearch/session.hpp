#pragma once
// Append-only session logs and deterministic replay.
//
// On disk a log is newline-delimited JSON: one header line
//   {"format":"prefsearch-session/1","session_id":..,"engine":..,
//    "catalog_id":..,"page_size":15}
// followed by one line per QueryEvent.

#include "prefsearch/catalog.hpp"
#include "prefsearch/engine.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/facetbase.hpp"
#include "prefsearch/json_util.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace prefsearch {

inline constexpr const char* kSessionFormat = "prefsearch-session/1";

enum class EngineKind { Weighted, Faceted };

enum class Action { AddTerm, RemoveTerm, SetWeight, SelectFacet, DeselectFacet, Sort, NextPage, SelectProduct };

inline const char* to_string(EngineKind e) { return e == EngineKind::Weighted ? "weighted" : "faceted"; }

inline EngineKind engine_from(const std::string& s) {
    if (s == "weighted") return EngineKind::Weighted;
    if (s == "faceted") return EngineKind::Faceted;
    throw ParseError("unknown engine \"" + s + "\"");
}

inline const char* to_string(Action a) {
    switch (a) {
        case Action::AddTerm: return "AddTerm";
        case Action::RemoveTerm: return "RemoveTerm";
        case Action::SetWeight: return "SetWeight";
        case Action::SelectFacet: return "SelectFacet";
        case Action::DeselectFacet: return "DeselectFacet";
        case Action::Sort: return "Sort";
        case Action::NextPage: return "NextPage";
        case Action::SelectProduct: return "SelectProduct";
    }
    return "?";
}

inline Action action_from(const std::string& s) {
    for (auto a : {Action::AddTerm, Action::RemoveTerm, Action::SetWeight, Action::SelectFacet,
                   Action::DeselectFacet, Action::Sort, Action::NextPage, Action::SelectProduct}) {
        if (s == to_string(a)) return a;
    }
    throw ParseError("unknown action \"" + s + "\"");
}

// True for actions that produce a new result list (as opposed to paging
// through or picking from the current one).
inline bool is_search_action(Action a) { return a != Action::NextPage && a != Action::SelectProduct; }

struct QueryEvent {
    std::string session_id;
    std::int64_t timestamp_ms = 0;  // since session start
    EngineKind engine = EngineKind::Weighted;
    Action action = Action::AddTerm;
    json query_state;  // WeightedQuery or FacetSelection
    std::vector<ProductId> ranked_ids;
    std::vector<ProductId> visible_ids;
    std::optional<ProductId> product_id;  // SelectProduct only
    std::optional<std::string> request_id;

    bool operator==(const QueryEvent&) const = default;
};

struct SessionHeader {
    std::string session_id;
    EngineKind engine = EngineKind::Weighted;
    std::string catalog_id;
    std::size_t page_size = kPageSize;

    bool operator==(const SessionHeader&) const = default;
};

struct SessionLog {
    SessionHeader header;
    std::vector<QueryEvent> events;

    bool closed() const { return !events.empty() && events.back().action == Action::SelectProduct; }
    std::optional<ProductId> final_selection() const {
        if (closed()) return events.back().product_id;
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// JSON

inline json header_to_json(const SessionHeader& h) {
    return {{"format", kSessionFormat},
            {"session_id", h.session_id},
            {"engine", to_string(h.engine)},
            {"catalog_id", h.catalog_id},
            {"page_size", h.page_size}};
}

inline SessionHeader header_from_json(const json& j) {
    const auto format = detail::field<std::string>(j, "format", "session header");
    if (format != kSessionFormat) throw ParseError("session header: unsupported format \"" + format + "\"");
    SessionHeader h;
    h.session_id = detail::field<std::string>(j, "session_id", "session header");
    h.engine = engine_from(detail::field<std::string>(j, "engine", "session header"));
    h.catalog_id = detail::field<std::string>(j, "catalog_id", "session header");
    h.page_size = detail::field_or<std::size_t>(j, "page_size", kPageSize, "session header");
    if (h.page_size == 0) throw ParseError("session header: page_size must be >= 1");
    return h;
}

inline json event_to_json(const QueryEvent& e) {
    json j = {{"session_id", e.session_id},
              {"t_ms", e.timestamp_ms},
              {"engine", to_string(e.engine)},
              {"action", to_string(e.action)},
              {"query", e.query_state},
              {"ranked", e.ranked_ids},
              {"visible", e.visible_ids}};
    if (e.product_id) j["product_id"] = *e.product_id;
    if (e.request_id) j["request_id"] = *e.request_id;
    return j;
}

inline QueryEvent event_from_json(const json& j, const std::string& where) {
    QueryEvent e;
    e.session_id = detail::field<std::string>(j, "session_id", where);
    e.timestamp_ms = detail::field<std::int64_t>(j, "t_ms", where);
    e.engine = engine_from(detail::field<std::string>(j, "engine", where));
    e.action = action_from(detail::field<std::string>(j, "action", where));
    e.query_state = detail::require(j, "query", where);
    e.ranked_ids = detail::field<std::vector<ProductId>>(j, "ranked", where);
    e.visible_ids = detail::field<std::vector<ProductId>>(j, "visible", where);
    if (j.contains("product_id")) e.product_id = detail::field<std::string>(j, "product_id", where);
    if (j.contains("request_id")) e.request_id = detail::field<std::string>(j, "request_id", where);
    return e;
}

// ---------------------------------------------------------------------------
// Invariants

// Throws SessionError if appending `e` to `log` would break a log invariant.
inline void check_appendable(const SessionLog& log, const QueryEvent& e) {
    const auto& h = log.header;
    if (log.closed()) throw SessionError("session \"" + h.session_id + "\" is closed");
    if (e.session_id != h.session_id) {
        throw SessionError("event for session \"" + e.session_id + "\" in log of \"" + h.session_id + "\"");
    }
    if (e.engine != h.engine) throw SessionError("event engine does not match session engine");
    if (e.timestamp_ms < 0) throw SessionError("negative timestamp");
    if (!log.events.empty() && e.timestamp_ms < log.events.back().timestamp_ms) {
        throw SessionError("timestamp regression: " + std::to_string(e.timestamp_ms) + " < " +
                           std::to_string(log.events.back().timestamp_ms));
    }
    const auto& ranked = e.ranked_ids;
    const auto& visible = e.visible_ids;
    if (visible.size() > ranked.size() || !std::equal(visible.begin(), visible.end(), ranked.begin())) {
        throw SessionError("visible ids are not a prefix of the ranked ids");
    }
    const bool whole_pages = visible.size() % h.page_size == 0;
    const bool capped = visible.size() == ranked.size();
    if (!(whole_pages || capped) || (visible.empty() && !ranked.empty())) {
        throw SessionError("visible ids must cover whole viewed pages");
    }
    if (e.action == Action::SelectProduct) {
        if (!e.product_id) throw SessionError("SelectProduct without product_id");
    } else if (e.product_id) {
        throw SessionError("product_id only allowed on SelectProduct");
    }
}

// ---------------------------------------------------------------------------
// Recording

// Single writer for one session. With a path, every recorded event is
// written and flushed before record() returns.
class SessionRecorder {
public:
    explicit SessionRecorder(SessionHeader header, const std::string& path = {}) {
        log_.header = std::move(header);
        if (log_.header.page_size == 0) throw SessionError("page_size must be >= 1");
        if (!path.empty()) {
            out_.open(path, std::ios::binary | std::ios::trunc);
            if (!out_) throw SessionError("cannot open session log: " + path);
            write_line(header_to_json(log_.header));
        }
    }

    const SessionLog& log() const { return log_; }
    bool closed() const { return log_.closed(); }

    void record(QueryEvent event) {
        check_appendable(log_, event);
        if (out_.is_open()) write_line(event_to_json(event));
        log_.events.push_back(std::move(event));
    }

private:
    void write_line(const json& j) {
        out_ << j.dump() << '\n';
        out_.flush();
        if (!out_) throw SessionError("session log write failed");
    }

    SessionLog log_;
    std::ofstream out_;
};

inline std::string dump_session_log(const SessionLog& log) {
    std::string out = header_to_json(log.header).dump() + "\n";
    for (const auto& e : log.events) out += event_to_json(e).dump() + "\n";
    return out;
}

inline void save_session_log(const SessionLog& log, const std::string& path) {
    detail::write_file(path, dump_session_log(log));
}

inline SessionLog parse_session_log(const std::string& text, const std::string& where = "session log") {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::optional<SessionLog> log;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto j = detail::parse_text(line, where + ":" + std::to_string(lineno));
        if (!log) {
            log.emplace();
            log->header = header_from_json(j);
            continue;
        }
        auto e = event_from_json(j, where + ":" + std::to_string(lineno));
        try {
            check_appendable(*log, e);
        } catch (const SessionError& err) {
            throw SessionError(where + ":" + std::to_string(lineno) + ": " + err.what());
        }
        log->events.push_back(std::move(e));
    }
    if (!log) throw ParseError(where + ": empty session log");
    return *log;
}

inline SessionLog load_session_log(const std::string& path) {
    return parse_session_log(detail::read_file(path), path);
}

// ---------------------------------------------------------------------------
// Replay

inline std::vector<ProductId> compute_ranked_ids(EngineKind engine, const json& query_state,
                                                 const SearchContext& ctx) {
    if (engine == EngineKind::Weighted) return ranked_ids(rank(query_from_json(query_state), ctx));
    return facet_filter(selection_from_json(query_state), ctx.catalog());
}

// Recomputes every event's ranked list and compares it with the recorded
// one. Throws ReplayDivergence at the first mismatch.
inline std::vector<std::vector<ProductId>> replay(const SessionLog& log, const SearchContext& ctx) {
    const auto hash = catalog_hash(ctx.catalog());
    if (log.header.catalog_id != hash) {
        throw SessionError("catalog mismatch: log \"" + log.header.session_id + "\" was recorded against " +
                           log.header.catalog_id + ", got " + hash);
    }
    std::vector<std::vector<ProductId>> out;
    out.reserve(log.events.size());
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const auto& e = log.events[i];
        auto ids = compute_ranked_ids(log.header.engine, e.query_state, ctx);
        if (ids != e.ranked_ids) {
            throw ReplayDivergence(i, "replay of session \"" + log.header.session_id + "\" diverges at event " +
                                          std::to_string(i) + " (" + to_string(e.action) + ")");
        }
        out.push_back(std::move(ids));
    }
    return out;
}

} // namespace prefsearch
