#pragma once
// Command-line front end. run_command() is the whole CLI; tools/prefsearch.cpp
// only forwards argv to it.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input (parse or
// validation), 3 runtime failure (replay divergence, generator self-check,
// I/O, ...).

#include "prefsearch/catalog.hpp"
#include "prefsearch/engine.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/facetbase.hpp"
#include "prefsearch/generator.hpp"
#include "prefsearch/interaction.hpp"
#include "prefsearch/metrics.hpp"
#include "prefsearch/relevance.hpp"
#include "prefsearch/report.hpp"
#include "prefsearch/service.hpp"
#include "prefsearch/session.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace prefsearch {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInvalid = 2, kExitRuntime = 3 };

namespace detail {

inline void check_format(const std::string& f) {
    if (f != "json" && f != "csv" && f != "text") throw ValidationError("unknown --format \"" + f + "\"");
}

inline std::vector<std::string> expand_log_paths(const std::vector<std::string>& inputs) {
    std::vector<std::string> out;
    for (const auto& in : inputs) {
        if (std::filesystem::is_directory(in)) {
            std::vector<std::string> found;
            for (const auto& e : std::filesystem::directory_iterator(in)) {
                if (e.path().extension() == ".ndjson") found.push_back(e.path().string());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(in);
        }
    }
    return out;
}

struct CliState {
    std::string format = "text";
    std::string catalog;
    std::string out;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> rename_seed;
    std::string query;
    std::string engine = "weighted";
    std::size_t page = 0;
    std::string prefix;
    std::size_t limit = 10;
    std::string spec;
    std::string log;
    std::vector<std::string> logs;
    std::string groups;
    std::string script;
    std::string log_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t page_size = kPageSize;
    std::string static_dir;
};

inline RelevanceSpec spec_or_default(const std::string& path) {
    return path.empty() ? paul_scenario_spec() : load_relevance_spec(path);
}

inline int cmd_generate(const CliState& s, std::ostream& out) {
    auto catalog = generate_dataset(s.seed);
    if (s.rename_seed) catalog = clone_with_renames(catalog, *s.rename_seed);
    if (s.out.empty() || s.out == "-") {
        out << dump_catalog(catalog);
    } else {
        save_catalog(catalog, s.out);
        if (s.format == "json") {
            out << json{{"out", s.out}, {"products", catalog.products.size()}, {"catalog_id", catalog_hash(catalog)}}
                       .dump()
                << "\n";
        } else {
            out << "wrote " << catalog.products.size() << " products to " << s.out << " ("
                << catalog_hash(catalog) << ")\n";
        }
    }
    return kExitOk;
}

inline int cmd_validate(const CliState& s, std::ostream& out) {
    const auto catalog = load_catalog(s.catalog);
    if (!s.spec.empty()) validate_relevance_spec(load_relevance_spec(s.spec), catalog);
    if (s.format == "json") {
        out << json{{"valid", true},
                    {"products", catalog.products.size()},
                    {"facets", catalog.schema.size()},
                    {"categories", catalog.categories().size()},
                    {"catalog_id", catalog_hash(catalog)}}
                   .dump()
            << "\n";
    } else {
        out << "ok: " << catalog.products.size() << " products, " << catalog.schema.size() << " facets, "
            << catalog.categories().size() << " categories (" << catalog_hash(catalog) << ")\n";
    }
    return kExitOk;
}

inline int cmd_search(const CliState& s, std::ostream& out) {
    const auto catalog = load_catalog(s.catalog);
    const SearchContext ctx(catalog);
    const auto doc = s.query.empty() || s.query == "-" ? parse_text(std::string(std::istreambuf_iterator<char>(std::cin), {}), "stdin")
                                                       : read_json_file(s.query);
    std::vector<ScoredResult> results;
    if (engine_from(s.engine) == EngineKind::Weighted) {
        results = rank(query_from_json(doc), ctx);
    } else {
        const auto sel = selection_from_json(doc);
        for (auto& id : facet_filter(sel, catalog)) {
            results.push_back({std::move(id), static_cast<double>(sel.selected.size()), {}});
        }
    }
    const auto page = paginate(results, s.page);
    if (s.format == "json") {
        out << page_to_json(page).dump(2) << "\n";
    } else if (s.format == "csv") {
        out << "rank,product_id,srs\n";
        for (std::size_t i = 0; i < page.items.size(); ++i) {
            out << (page.page_index * page.page_size + i + 1) << "," << page.items[i].product_id << ","
                << fmt_num(page.items[i].srs) << "\n";
        }
    } else {
        out << page.total_count << " results, page " << page.page_index << "\n";
        for (std::size_t i = 0; i < page.items.size(); ++i) {
            const auto& r = page.items[i];
            const auto* p = ctx.product(r.product_id);
            out << std::setw(4) << (page.page_index * page.page_size + i + 1) << "  " << r.product_id << "  "
                << std::fixed << std::setprecision(4) << r.srs << std::defaultfloat << "  " << (p ? p->name : "")
                << "\n";
        }
    }
    return kExitOk;
}

inline int cmd_suggest(const CliState& s, std::ostream& out) {
    const auto catalog = load_catalog(s.catalog);
    const auto list = suggest(s.prefix, catalog, s.limit);
    if (s.format == "json") {
        json arr = json::array();
        for (const auto& x : list) arr.push_back(suggestion_to_json(x));
        out << arr.dump(2) << "\n";
    } else if (s.format == "csv") {
        out << "kind,text,facet,category\n";
        for (const auto& x : list) {
            out << to_string(x.kind) << "," << csv_field(x.text) << "," << x.facet_id << "," << csv_field(x.category)
                << "\n";
        }
    } else {
        for (const auto& x : list) {
            out << x.text;
            if (x.kind == SuggestionKind::FacetTerm) out << " (" << x.category << ")";
            if (x.kind == SuggestionKind::FacetCategory) out << " [category]";
            if (x.kind == SuggestionKind::FreeText) out << " [free text]";
            out << "\n";
        }
    }
    return kExitOk;
}

inline int cmd_judge(const CliState& s, std::ostream& out) {
    const auto catalog = load_catalog(s.catalog);
    const auto spec = spec_or_default(s.spec);
    const auto judgments = judge_all(catalog, spec);
    const auto hist = grade_histogram(judgments);
    const int top = hist.empty() ? 0 : hist.rbegin()->first;
    if (s.format == "json") {
        json h = json::object();
        for (const auto& [g, n] : hist) h[std::to_string(g)] = n;
        out << json{{"histogram", h},
                    {"relevant", count_at_least(judgments, 1)},
                    {"max_grade_reached", top},
                    {"max_attainable", spec.max_grade()},
                    {"judgments", judgments}}
                   .dump(2)
            << "\n";
    } else if (s.format == "csv") {
        out << "product_id,grade\n";
        for (const auto& [id, g] : judgments) out << id << "," << g << "\n";
    } else {
        out << "grade  count\n";
        for (const auto& [g, n] : hist) out << std::setw(5) << g << "  " << n << "\n";
        out << "relevant (grade >= 1): " << count_at_least(judgments, 1) << "\n";
        out << "highest grade reached: " << top << " (attainable " << spec.max_grade() << ")\n";
    }
    return kExitOk;
}

inline int cmd_replay(const CliState& s, std::ostream& out) {
    const auto catalog = load_catalog(s.catalog);
    const SearchContext ctx(catalog);
    const auto log = load_session_log(s.log);
    replay(log, ctx);
    if (s.format == "json") {
        out << json{{"session_id", log.header.session_id}, {"events", log.events.size()}, {"replay", "ok"}}.dump()
            << "\n";
    } else {
        out << "replay ok: session " << log.header.session_id << ", " << log.events.size() << " events\n";
    }
    return kExitOk;
}

inline int cmd_eval(const CliState& s, std::ostream& out, std::ostream& err) {
    const auto catalog = load_catalog(s.catalog);
    const SearchContext ctx(catalog);
    const auto spec = spec_or_default(s.spec);
    GroupMap groups;
    if (!s.groups.empty()) groups = parse_groups_csv(read_file(s.groups));
    std::vector<SessionLog> logs;
    for (const auto& path : expand_log_paths(s.logs)) logs.push_back(load_session_log(path));
    const auto bundle = report(std::move(logs), ctx, spec, groups);
    if (s.out.empty()) {
        out << bundle.recall_csv;
    } else {
        bundle.write_to(s.out);
        out << "wrote recall.csv, ndcg.csv, loess.csv, completion.csv to " << s.out << "\n";
    }
    for (const auto& w : bundle.warnings) err << "warning: " << w << "\n";
    for (const auto& e : bundle.errors) err << "error: " << e << "\n";
    return bundle.errors.empty() ? kExitOk : kExitRuntime;
}

inline int cmd_script_run(const CliState& s, std::ostream& out) {
    const auto catalog = load_catalog(s.catalog);
    const SearchContext ctx(catalog);
    const auto script = load_script(s.script);
    std::string path = s.log;
    if (path.empty() && !s.log_dir.empty()) {
        std::filesystem::create_directories(s.log_dir);
        path = (std::filesystem::path(s.log_dir) / (script.session_id + ".ndjson")).string();
    }
    const auto log = run_script(script, ctx, path);
    const auto selected = log.final_selection();
    std::string top;
    if (!log.events.empty() && !log.events.back().ranked_ids.empty()) top = log.events.back().ranked_ids.front();
    if (s.format == "json") {
        out << json{{"session_id", log.header.session_id},
                    {"events", log.events.size()},
                    {"top_product", top},
                    {"final_selection", selected ? json(*selected) : json(nullptr)},
                    {"log", path}}
                   .dump()
            << "\n";
    } else {
        out << "session " << log.header.session_id << ": " << log.events.size() << " events, top product "
            << (top.empty() ? "-" : top) << ", selected " << (selected ? *selected : "-");
        if (!path.empty()) out << ", log " << path;
        out << "\n";
    }
    return kExitOk;
}

inline int cmd_serve(const CliState& s, std::ostream& out) {
    ServiceConfig cfg;
    cfg.catalog_path = s.catalog;
    cfg.log_dir = s.log_dir;
    cfg.host = s.host;
    cfg.port = s.port;
    cfg.page_size = s.page_size;
    cfg.static_dir = s.static_dir;
    SearchService service(cfg);
    HttpServer server(service);
    const int port = server.start();
    out << "serving " << service.catalog_id() << " on http://" << cfg.host << ":" << port << std::endl;
    server.run();
    return kExitOk;
}

} // namespace detail

inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    using namespace detail;
    CliState s;
    CLI::App app{"Preference-based product search: engines, sessions and evaluation", "prefsearch"};
    app.require_subcommand(1);
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", s.format, "Output format: json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    };

    auto* generate = app.add_subcommand("generate", "Generate the synthetic hotel catalog");
    generate->add_option("--seed", s.seed, "Generator seed")->default_val(1);
    generate->add_option("--out", s.out, "Output file (stdout when omitted)");
    generate->add_option("--rename-seed", s.rename_seed, "Redraw product names with this seed");
    add_format(generate);

    auto* validate = app.add_subcommand("validate", "Validate a catalog (and optionally a relevance spec)");
    validate->add_option("--catalog", s.catalog)->required();
    validate->add_option("--spec", s.spec, "Relevance spec to check against the catalog");
    add_format(validate);

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--catalog", s.catalog)->required();
    serve->add_option("--log-dir", s.log_dir, "Directory for session logs")->required();
    serve->add_option("--host", s.host);
    serve->add_option("--port", s.port);
    serve->add_option("--page-size", s.page_size);
    serve->add_option("--static", s.static_dir, "Directory with the web UI bundle");

    auto* search = app.add_subcommand("search", "Run one query and print a result page");
    search->add_option("--catalog", s.catalog)->required();
    search->add_option("--query", s.query, "Query JSON file (weighted query or facet selection); - for stdin");
    search->add_option("--engine", s.engine)->check(CLI::IsMember({"weighted", "faceted"}));
    search->add_option("--page", s.page);
    add_format(search);

    auto* suggest_cmd = app.add_subcommand("suggest", "Autocomplete suggestions for a prefix");
    suggest_cmd->add_option("--catalog", s.catalog)->required();
    suggest_cmd->add_option("--prefix", s.prefix);
    suggest_cmd->add_option("--limit", s.limit);
    add_format(suggest_cmd);

    auto* judge_cmd = app.add_subcommand("judge", "Graded relevance of every product");
    judge_cmd->add_option("--catalog", s.catalog)->required();
    judge_cmd->add_option("--spec", s.spec, "Relevance spec (default: bundled scenario)");
    add_format(judge_cmd);

    auto* replay_cmd = app.add_subcommand("replay", "Re-run a session log and compare result lists");
    replay_cmd->add_option("--catalog", s.catalog)->required();
    replay_cmd->add_option("--log", s.log)->required();
    add_format(replay_cmd);

    auto* eval = app.add_subcommand("eval", "Write recall, NDCG, LOESS and completion CSVs");
    eval->add_option("--catalog", s.catalog)->required();
    eval->add_option("--spec", s.spec, "Relevance spec (default: bundled scenario)");
    eval->add_option("--logs", s.logs, "Session log files or directories")->required();
    eval->add_option("--groups", s.groups, "CSV mapping session_id,label");
    eval->add_option("--out", s.out, "Output directory (recall table to stdout when omitted)");

    auto* script = app.add_subcommand("script-run", "Execute a scripted session and record its log");
    script->add_option("--catalog", s.catalog)->required();
    script->add_option("--script", s.script)->required();
    script->add_option("--log", s.log, "Session log output file");
    script->add_option("--log-dir", s.log_dir, "Write <session_id>.ndjson here instead");
    add_format(script);

    std::vector<const char*> argv;
    argv.push_back("prefsearch");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        check_format(s.format);
        if (*generate) return cmd_generate(s, out);
        if (*validate) return cmd_validate(s, out);
        if (*serve) return cmd_serve(s, out);
        if (*search) return cmd_search(s, out);
        if (*suggest_cmd) return cmd_suggest(s, out);
        if (*judge_cmd) return cmd_judge(s, out);
        if (*replay_cmd) return cmd_replay(s, out);
        if (*eval) return cmd_eval(s, out, err);
        if (*script) return cmd_script_run(s, out);
    } catch (const ReplayDivergence& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    err << app.help();
    return kExitUsage;
}

} // namespace prefsearch
