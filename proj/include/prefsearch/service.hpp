#pragma once
// HTTP API over both engines. SearchService holds the catalog, the open
// sessions and the clock; HttpServer maps REST routes onto it.
//
// Routes (JSON bodies, see docs/api.md):
//   GET  /api/health                      readiness + catalog hash
//   POST /api/sessions                    {"engine", "session_id"?, "catalog_id"?}
//   GET  /api/suggest?prefix=..&limit=..
//   POST /api/sessions/{id}/query         {"request_id"?, "action", "query"}
//   POST /api/sessions/{id}/selection     {"request_id"?, "action", "selection"}
//   POST /api/sessions/{id}/page          {"request_id"?, "page"}
//   POST /api/sessions/{id}/select        {"request_id"?, "product_id"}
//   GET  /api/sessions/{id}/facet-counts
//   POST /api/eval/report                 {"spec"?, "groups"?}

#include "prefsearch/catalog.hpp"
#include "prefsearch/engine.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/facetbase.hpp"
#include "prefsearch/interaction.hpp"
#include "prefsearch/relevance.hpp"
#include "prefsearch/report.hpp"
#include "prefsearch/session.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace prefsearch {

struct ServiceConfig {
    std::string catalog_path;
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::string log_dir;
    std::size_t page_size = kPageSize;
    std::size_t suggestion_limit = 10;
    std::string static_dir;  // optional UI bundle
};

// Error carrying the HTTP status it maps to.
class ServiceError : public Error {
public:
    ServiceError(int status, const std::string& what) : Error(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

using Clock = std::function<std::int64_t()>;  // milliseconds, monotonic

inline Clock steady_clock_ms() {
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    };
}

class SearchService {
public:
    explicit SearchService(ServiceConfig config, Clock clock = steady_clock_ms())
        : config_(std::move(config)), clock_(std::move(clock)) {
        if (config_.page_size < 1) throw ValidationError("page size must be >= 1");
        if (!std::filesystem::exists(config_.catalog_path)) {
            throw ValidationError("catalog file not found: " + config_.catalog_path);
        }
        if (config_.log_dir.empty() || !std::filesystem::is_directory(config_.log_dir)) {
            throw ValidationError("log directory not found: " + config_.log_dir);
        }
        if (!config_.static_dir.empty() && !std::filesystem::is_directory(config_.static_dir)) {
            throw ValidationError("static asset directory not found: " + config_.static_dir);
        }
        catalog_ = std::make_unique<Catalog>(load_catalog(config_.catalog_path));
        ctx_ = std::make_unique<SearchContext>(*catalog_);
        hash_ = catalog_hash(*catalog_);
    }

    const ServiceConfig& config() const { return config_; }
    const Catalog& catalog() const { return *catalog_; }
    const std::string& catalog_id() const { return hash_; }

    json health() const { return {{"status", "ok"}, {"catalog_hash", hash_}}; }

    json create_session(const json& request) {
        const json body = request.is_null() ? json::object() : request;
        const auto engine = engine_from(detail::field_or<std::string>(body, "engine", "weighted", "session"));
        if (body.contains("catalog_id") && body.at("catalog_id") != hash_) {
            throw ServiceError(409, "catalog_id does not match the served catalog");
        }
        std::lock_guard lock(sessions_mutex_);
        std::string id = detail::field_or<std::string>(body, "session_id", "", "session");
        if (id.empty()) id = "s" + std::to_string(++session_counter_);
        if (!valid_session_id(id)) throw ServiceError(400, "invalid session_id");
        if (sessions_.count(id) > 0) throw ServiceError(409, "session already exists: " + id);
        const auto path = (std::filesystem::path(config_.log_dir) / (id + ".ndjson")).string();
        auto entry = std::make_shared<Entry>();
        entry->started_ms = clock_();
        entry->session = std::make_unique<InteractiveSession>(
            SessionHeader{id, engine, hash_, config_.page_size}, *ctx_, path);
        sessions_[id] = entry;
        return {{"session_id", id},
                {"engine", to_string(engine)},
                {"catalog_id", hash_},
                {"page", page_json(entry->session->page(0))}};
    }

    json suggest(const std::string& prefix, std::optional<std::size_t> limit) const {
        json out = json::array();
        for (const auto& s : prefsearch::suggest(prefix, *catalog_, limit.value_or(config_.suggestion_limit))) {
            out.push_back(suggestion_to_json(s));
        }
        return {{"suggestions", std::move(out)}};
    }

    json submit_query(const std::string& session_id, const json& body) {
        return mutate(session_id, body, [&](Entry& e, std::int64_t t, std::optional<std::string> rid) {
            const auto action = action_from(detail::field<std::string>(body, "action", "request"));
            if (!is_search_action(action)) throw ServiceError(400, "action not valid for a query update");
            auto query = query_from_json(detail::require(body, "query", "request"));
            const auto page = e.session->submit_query(std::move(query), action, t, std::move(rid));
            return json{{"page", page_json(page)}, {"query", query_to_json(e.session->query())}};
        });
    }

    json submit_selection(const std::string& session_id, const json& body) {
        return mutate(session_id, body, [&](Entry& e, std::int64_t t, std::optional<std::string> rid) {
            const auto action = action_from(detail::field<std::string>(body, "action", "request"));
            if (!is_search_action(action)) throw ServiceError(400, "action not valid for a selection update");
            auto sel = selection_from_json(detail::require(body, "selection", "request"));
            const auto page = e.session->submit_selection(std::move(sel), action, t, std::move(rid));
            return json{{"page", page_json(page)},
                        {"selection", selection_to_json(e.session->selection())},
                        {"facet_counts", counts_to_json(e.session->facet_counts())}};
        });
    }

    // Pages already viewed are returned without logging; the next unseen
    // page is logged as NextPage. Skipping ahead is rejected.
    json fetch_page(const std::string& session_id, const json& body) {
        const auto index = detail::field<std::size_t>(body, "page", "request");
        auto entry = find(session_id);
        {
            std::lock_guard lock(entry->mutex);
            if (index < entry->session->pages_viewed()) {
                return {{"page", page_json(entry->session->page(index))}};
            }
            if (index > entry->session->pages_viewed()) {
                throw ServiceError(400, "pages must be viewed in order");
            }
        }
        return mutate(session_id, body, [&](Entry& e, std::int64_t t, std::optional<std::string> rid) {
            if (index < e.session->pages_viewed()) return json{{"page", page_json(e.session->page(index))}};
            return json{{"page", page_json(e.session->next_page(t, std::move(rid)))}};
        });
    }

    json select_product(const std::string& session_id, const json& body) {
        return mutate(session_id, body, [&](Entry& e, std::int64_t t, std::optional<std::string> rid) {
            const auto id = detail::field<std::string>(body, "product_id", "request");
            e.session->select_product(id, t, std::move(rid));
            return json{{"closed", true}, {"product_id", id}};
        });
    }

    json facet_counts(const std::string& session_id) {
        auto entry = find(session_id);
        std::lock_guard lock(entry->mutex);
        return {{"facet_counts", counts_to_json(entry->session->facet_counts())}};
    }

    json session_state(const std::string& session_id) {
        auto entry = find(session_id);
        std::lock_guard lock(entry->mutex);
        const auto& s = *entry->session;
        return {{"session_id", session_id},
                {"engine", to_string(s.engine())},
                {"closed", s.closed()},
                {"events", s.log().events.size()},
                {"pages_viewed", s.pages_viewed()},
                {"query", query_to_json(s.query())},
                {"selection", selection_to_json(s.selection())}};
    }

    // Report over every log in the log directory.
    json run_report(const json& body) const {
        RelevanceSpec spec = paul_scenario_spec();
        if (body.contains("spec")) spec = relevance_spec_from_json(body.at("spec"));
        GroupMap groups;
        if (body.contains("groups")) groups = detail::get_as<GroupMap>(body.at("groups"), "request.groups");
        std::vector<SessionLog> logs;
        std::vector<std::string> errors;
        for (const auto& entry : std::filesystem::directory_iterator(config_.log_dir)) {
            if (entry.path().extension() != ".ndjson") continue;
            try {
                logs.push_back(load_session_log(entry.path().string()));
            } catch (const Error& e) {
                errors.push_back(entry.path().filename().string() + ": " + e.what());
            }
        }
        auto bundle = report(std::move(logs), *ctx_, spec, groups);
        errors.insert(errors.end(), bundle.errors.begin(), bundle.errors.end());
        return {{"recall_csv", bundle.recall_csv},
                {"ndcg_csv", bundle.ndcg_csv},
                {"loess_csv", bundle.loess_csv},
                {"completion_csv", bundle.completion_csv},
                {"errors", errors},
                {"warnings", bundle.warnings}};
    }

private:
    struct Entry {
        std::mutex mutex;  // serializes requests within one session
        std::unique_ptr<InteractiveSession> session;
        std::int64_t started_ms = 0;
        std::map<std::string, json> responses;  // by client request id
    };

    static bool valid_session_id(const std::string& id) {
        if (id.empty() || id.size() > 64) return false;
        return std::all_of(id.begin(), id.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
        });
    }

    std::shared_ptr<Entry> find(const std::string& id) {
        std::lock_guard lock(sessions_mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw ServiceError(404, "unknown session: " + id);
        return it->second;
    }

    // Runs a state-changing request under the session lock. A repeated
    // request id returns the stored response without touching the log.
    template <typename Fn>
    json mutate(const std::string& session_id, const json& body, Fn&& fn) {
        auto entry = find(session_id);
        std::lock_guard lock(entry->mutex);
        std::optional<std::string> rid;
        if (body.contains("request_id")) rid = detail::field<std::string>(body, "request_id", "request");
        if (rid) {
            auto it = entry->responses.find(*rid);
            if (it != entry->responses.end()) return it->second;
        }
        if (entry->session->closed()) throw ServiceError(409, "session is closed: " + session_id);
        const auto t = std::max<std::int64_t>(0, clock_() - entry->started_ms);
        auto response = fn(*entry, t, rid);
        if (rid) entry->responses[*rid] = response;
        return response;
    }

    json page_json(const ResultPage& page) const {
        json j = page_to_json(page);
        for (auto& item : j["items"]) {
            const auto* p = ctx_->product(item["product_id"].get<std::string>());
            if (p == nullptr) continue;
            json features = json::object();
            for (const auto& [facet, values] : p->nominal_features) {
                features[facet] = std::vector<std::string>(values.begin(), values.end());
            }
            item["name"] = p->name;
            item["price"] = p->price;
            item["stars"] = p->stars;
            item["rating"] = p->rating;
            item["features"] = std::move(features);
        }
        return j;
    }

    ServiceConfig config_;
    Clock clock_;
    std::unique_ptr<Catalog> catalog_;
    std::unique_ptr<SearchContext> ctx_;
    std::string hash_;

    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::size_t session_counter_ = 0;
};

// ---------------------------------------------------------------------------
// HTTP binding

class HttpServer {
public:
    explicit HttpServer(SearchService& service) : service_(service) { routes(); }

    ~HttpServer() { stop(); }

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds and serves on a background thread; returns the bound port.
    int start() {
        const auto& cfg = service_.config();
        if (!cfg.static_dir.empty()) server_.set_mount_point("/", cfg.static_dir);
        if (cfg.port == 0) {
            port_ = server_.bind_to_any_port(cfg.host);
        } else {
            port_ = server_.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1;
        }
        if (port_ < 0) {
            throw Error("bind failure on " + cfg.host + ":" + std::to_string(cfg.port));
        }
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port_;
    }

    // Serves on the calling thread until stop() is called elsewhere.
    void run() {
        if (!thread_.joinable()) start();
        thread_.join();
    }

    void stop() {
        if (server_.is_running()) server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    int port() const { return port_; }

private:
    template <typename Fn>
    httplib::Server::Handler wrap(Fn fn) {
        return [this, fn](const httplib::Request& req, httplib::Response& res) {
            try {
                json body = json::object();
                if (!req.body.empty()) body = detail::parse_text(req.body, "request body");
                respond(res, 200, fn(req, body));
            } catch (const ServiceError& e) {
                respond(res, e.status(), {{"error", e.what()}});
            } catch (const SessionError& e) {
                respond(res, 409, {{"error", e.what()}});
            } catch (const ParseError& e) {
                respond(res, 400, {{"error", e.what()}});
            } catch (const ValidationError& e) {
                respond(res, 400, {{"error", e.what()}});
            } catch (const std::exception& e) {
                const auto id = "err-" + std::to_string(++error_counter_);
                std::cerr << "[prefsearch] " << id << ": " << e.what() << "\n";
                respond(res, 500, {{"error", "internal error"}, {"error_id", id}});
            }
        };
    }

    static void respond(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    void routes() {
        auto& s = service_;
        server_.Get("/api/health", wrap([&s](const auto&, const json&) { return s.health(); }));
        server_.Post("/api/sessions", wrap([&s](const auto&, const json& b) { return s.create_session(b); }));
        server_.Get("/api/suggest", wrap([&s](const httplib::Request& req, const json&) {
                        std::optional<std::size_t> limit;
                        if (req.has_param("limit")) {
                            try {
                                limit = static_cast<std::size_t>(std::stoul(req.get_param_value("limit")));
                            } catch (const std::exception&) {
                                throw ServiceError(400, "invalid limit");
                            }
                        }
                        return s.suggest(req.get_param_value("prefix"), limit);
                    }));
        server_.Get("/api/sessions/:id", wrap([&s](const httplib::Request& req, const json&) {
                        return s.session_state(req.path_params.at("id"));
                    }));
        server_.Post("/api/sessions/:id/query", wrap([&s](const httplib::Request& req, const json& b) {
                         return s.submit_query(req.path_params.at("id"), b);
                     }));
        server_.Post("/api/sessions/:id/selection", wrap([&s](const httplib::Request& req, const json& b) {
                         return s.submit_selection(req.path_params.at("id"), b);
                     }));
        server_.Post("/api/sessions/:id/page", wrap([&s](const httplib::Request& req, const json& b) {
                         return s.fetch_page(req.path_params.at("id"), b);
                     }));
        server_.Post("/api/sessions/:id/select", wrap([&s](const httplib::Request& req, const json& b) {
                         return s.select_product(req.path_params.at("id"), b);
                     }));
        server_.Get("/api/sessions/:id/facet-counts", wrap([&s](const httplib::Request& req, const json&) {
                        return s.facet_counts(req.path_params.at("id"));
                    }));
        server_.Post("/api/eval/report", wrap([&s](const auto&, const json& b) { return s.run_report(b); }));
    }

    SearchService& service_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = -1;
    std::atomic<std::size_t> error_counter_{0};
};

} // namespace prefsearch
