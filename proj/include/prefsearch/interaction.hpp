#pragma once
// Per-session interaction state shared by the HTTP service and scripted
// sessions: applies one user action, recomputes the result list and records
// the matching QueryEvent.

#include "prefsearch/engine.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/facetbase.hpp"
#include "prefsearch/session.hpp"

#include <optional>
#include <string>
#include <vector>

namespace prefsearch {

class InteractiveSession {
public:
    // `log_path` may be empty for an in-memory session.
    InteractiveSession(SessionHeader header, const SearchContext& ctx, const std::string& log_path = {})
        : ctx_(&ctx), recorder_(std::move(header), log_path) {
        recompute();
    }

    const SessionLog& log() const { return recorder_.log(); }
    const SessionHeader& header() const { return recorder_.log().header; }
    EngineKind engine() const { return header().engine; }
    bool closed() const { return recorder_.closed(); }
    const WeightedQuery& query() const { return query_; }
    const FacetSelection& selection() const { return selection_; }
    std::size_t pages_viewed() const { return pages_viewed_; }
    std::size_t total_count() const { return results_.size(); }

    // Weighted engine -------------------------------------------------------

    ResultPage add_term(Criterion c, std::int64_t t_ms, std::optional<std::string> request_id = {}) {
        require_engine(EngineKind::Weighted);
        if (query_.find(c.criterion_id) != nullptr) {
            throw QueryError("criterion \"" + c.criterion_id + "\" already present");
        }
        auto next = query_;
        next.criteria.push_back(std::move(c));
        return submit_query(std::move(next), Action::AddTerm, t_ms, std::move(request_id));
    }

    ResultPage remove_term(const std::string& id, std::int64_t t_ms, std::optional<std::string> request_id = {}) {
        require_engine(EngineKind::Weighted);
        auto next = query_;
        const auto before = next.criteria.size();
        std::erase_if(next.criteria, [&](const Criterion& c) { return c.criterion_id == id; });
        if (next.criteria.size() == before) throw QueryError("no criterion \"" + id + "\"");
        return submit_query(std::move(next), Action::RemoveTerm, t_ms, std::move(request_id));
    }

    ResultPage set_weight(const std::string& id, double weight, std::int64_t t_ms,
                          std::optional<std::string> request_id = {}) {
        require_engine(EngineKind::Weighted);
        auto next = query_;
        auto* c = next.find(id);
        if (c == nullptr) throw QueryError("no criterion \"" + id + "\"");
        c->weight = weight;
        return submit_query(std::move(next), Action::SetWeight, t_ms, std::move(request_id));
    }

    // Replaces the whole query state (what a client submits).
    ResultPage submit_query(WeightedQuery next, Action action, std::int64_t t_ms,
                            std::optional<std::string> request_id = {}) {
        require_engine(EngineKind::Weighted);
        require_open();
        ctx_->validate(next);
        auto results = rank(next, *ctx_);
        query_ = std::move(next);
        results_ = std::move(results);
        return commit_new_list(action, t_ms, std::move(request_id));
    }

    // Facet baseline --------------------------------------------------------

    ResultPage select_facet(FacetValue v, std::int64_t t_ms, std::optional<std::string> request_id = {}) {
        auto next = selection_;
        if (!next.selected.insert(std::move(v)).second) throw QueryError("facet value already selected");
        return submit_selection(std::move(next), Action::SelectFacet, t_ms, std::move(request_id));
    }

    ResultPage deselect_facet(const FacetValue& v, std::int64_t t_ms, std::optional<std::string> request_id = {}) {
        auto next = selection_;
        if (next.selected.erase(v) == 0) throw QueryError("facet value not selected");
        return submit_selection(std::move(next), Action::DeselectFacet, t_ms, std::move(request_id));
    }

    ResultPage set_sort(SortOrder sort, std::int64_t t_ms, std::optional<std::string> request_id = {}) {
        auto next = selection_;
        next.sort = sort;
        return submit_selection(std::move(next), Action::Sort, t_ms, std::move(request_id));
    }

    ResultPage submit_selection(FacetSelection next, Action action, std::int64_t t_ms,
                                std::optional<std::string> request_id = {}) {
        require_engine(EngineKind::Faceted);
        require_open();
        validate_selection(next, ctx_->catalog());
        selection_ = std::move(next);
        recompute();
        return commit_new_list(action, t_ms, std::move(request_id));
    }

    // Both engines ----------------------------------------------------------

    ResultPage next_page(std::int64_t t_ms, std::optional<std::string> request_id = {}) {
        require_open();
        if (pages_viewed_ * page_size() >= results_.size()) throw QueryError("no further result page");
        ++pages_viewed_;
        record(Action::NextPage, t_ms, std::move(request_id), std::nullopt);
        return page(pages_viewed_ - 1);
    }

    // Read-only view of an already viewed page; does not log.
    ResultPage page(std::size_t index) const { return paginate(results_, index, page_size()); }

    void select_product(const ProductId& id, std::int64_t t_ms, std::optional<std::string> request_id = {}) {
        require_open();
        const auto visible = visible_ids();
        if (std::find(visible.begin(), visible.end(), id) == visible.end()) {
            throw QueryError("product \"" + id + "\" is not on a viewed page");
        }
        record(Action::SelectProduct, t_ms, std::move(request_id), id);
    }

    std::vector<ProductId> visible_ids() const {
        const auto n = std::min(results_.size(), pages_viewed_ * page_size());
        std::vector<ProductId> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(results_[i].product_id);
        return out;
    }

    std::map<FacetValue, std::size_t> facet_counts() const {
        return prefsearch::facet_counts(selection_, ctx_->catalog());
    }

private:
    std::size_t page_size() const { return header().page_size; }

    void require_engine(EngineKind e) const {
        if (engine() != e) {
            throw QueryError(std::string("action not available for the ") + to_string(engine()) + " engine");
        }
    }

    void require_open() const {
        if (closed()) throw SessionError("session \"" + header().session_id + "\" is closed");
    }

    void recompute() {
        if (engine() == EngineKind::Weighted) {
            results_ = rank(query_, *ctx_);
            return;
        }
        results_.clear();
        const double matched = static_cast<double>(selection_.selected.size());
        for (auto& id : facet_filter(selection_, ctx_->catalog())) {
            results_.push_back({std::move(id), matched, {}});
        }
    }

    json state_json() const {
        return engine() == EngineKind::Weighted ? query_to_json(query_) : selection_to_json(selection_);
    }

    ResultPage commit_new_list(Action action, std::int64_t t_ms, std::optional<std::string> request_id) {
        pages_viewed_ = 1;
        record(action, t_ms, std::move(request_id), std::nullopt);
        return page(0);
    }

    void record(Action action, std::int64_t t_ms, std::optional<std::string> request_id,
                std::optional<ProductId> product) {
        QueryEvent e;
        e.session_id = header().session_id;
        e.timestamp_ms = t_ms;
        e.engine = engine();
        e.action = action;
        e.query_state = state_json();
        e.ranked_ids = ranked_ids(results_);
        e.visible_ids = visible_ids();
        e.product_id = std::move(product);
        e.request_id = std::move(request_id);
        recorder_.record(std::move(e));
    }

    const SearchContext* ctx_;
    SessionRecorder recorder_;
    WeightedQuery query_;
    FacetSelection selection_;
    std::vector<ScoredResult> results_;
    std::size_t pages_viewed_ = 1;
};

// ---------------------------------------------------------------------------
// Scripted sessions

inline constexpr const char* kScriptFormat = "prefsearch-script/1";

struct ScriptStep {
    std::int64_t t_ms = 0;
    Action action = Action::AddTerm;
    json args;  // the step's JSON object
};

struct ScriptedSession {
    std::string session_id;
    EngineKind engine = EngineKind::Weighted;
    std::size_t page_size = kPageSize;
    std::vector<ScriptStep> steps;
};

inline ScriptedSession script_from_json(const json& j) {
    const std::string where = "script";
    const auto format = detail::field<std::string>(j, "format", where);
    if (format != kScriptFormat) throw ParseError("script: unsupported format \"" + format + "\"");
    ScriptedSession s;
    s.session_id = detail::field<std::string>(j, "session_id", where);
    s.engine = engine_from(detail::field<std::string>(j, "engine", where));
    s.page_size = detail::field_or<std::size_t>(j, "page_size", kPageSize, where);
    const auto& actions = detail::require(j, "actions", where);
    if (!actions.is_array()) throw ParseError("script.actions: expected an array");
    std::int64_t last = 0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const std::string at = "script.actions[" + std::to_string(i) + "]";
        ScriptStep step;
        step.t_ms = detail::field<std::int64_t>(actions[i], "t_ms", at);
        step.action = action_from(detail::field<std::string>(actions[i], "action", at));
        step.args = actions[i];
        if (step.t_ms < last) throw ValidationError(at + ": timestamps must be non-decreasing");
        last = step.t_ms;
        s.steps.push_back(std::move(step));
    }
    return s;
}

inline ScriptedSession load_script(const std::string& path) {
    return script_from_json(detail::read_json_file(path));
}

// Runs a script against the catalog and returns the recorded log (also
// written to `log_path` when given).
inline SessionLog run_script(const ScriptedSession& script, const SearchContext& ctx,
                             const std::string& log_path = {}) {
    SessionHeader header{script.session_id, script.engine, catalog_hash(ctx.catalog()), script.page_size};
    InteractiveSession session(header, ctx, log_path);
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        const auto& step = script.steps[i];
        const auto& a = step.args;
        const std::string at = "script step " + std::to_string(i);
        auto facet_value = [&] {
            return FacetValue{detail::field<std::string>(a, "facet", at), detail::field<std::string>(a, "value", at)};
        };
        switch (step.action) {
            case Action::AddTerm:
                session.add_term(criterion_from_json(detail::require(a, "criterion", at), at + ".criterion"),
                                 step.t_ms);
                break;
            case Action::RemoveTerm:
                session.remove_term(detail::field<std::string>(a, "id", at), step.t_ms);
                break;
            case Action::SetWeight:
                session.set_weight(detail::field<std::string>(a, "id", at), detail::field<double>(a, "weight", at),
                                   step.t_ms);
                break;
            case Action::SelectFacet:
                session.select_facet(facet_value(), step.t_ms);
                break;
            case Action::DeselectFacet:
                session.deselect_facet(facet_value(), step.t_ms);
                break;
            case Action::Sort:
                session.set_sort(sort_order_from(detail::field<std::string>(a, "sort", at)), step.t_ms);
                break;
            case Action::NextPage:
                session.next_page(step.t_ms);
                break;
            case Action::SelectProduct: {
                ProductId id;
                if (a.contains("product_id")) {
                    id = detail::field<std::string>(a, "product_id", at);
                } else {
                    const auto rank_pos = detail::field<std::size_t>(a, "rank", at);
                    const auto visible = session.visible_ids();
                    if (rank_pos < 1 || rank_pos > visible.size()) {
                        throw ValidationError(at + ": rank outside the viewed results");
                    }
                    id = visible[rank_pos - 1];
                }
                session.select_product(id, step.t_ms);
                break;
            }
        }
    }
    return session.log();
}

} // namespace prefsearch
