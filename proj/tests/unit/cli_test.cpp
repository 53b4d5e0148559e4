#include "prefsearch/cli.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace prefsearch;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

const std::string kCatalog = testutil::data_path("hotels.json");
const std::string kSpec = testutil::data_path("paul-scenario.json");

} // namespace

TEST(Cli, GenerateThenJudgeShowsScenarioHistogram) {
    testutil::TempDir dir;
    const auto path = dir.file("d.json");
    ASSERT_EQ(cli({"generate", "--seed", "1", "--out", path}).code, 0);
    const auto r = cli({"judge", "--catalog", path, "--spec", kSpec, "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["relevant"], 15);
    EXPECT_EQ(j["histogram"]["8"], 5);
    EXPECT_EQ(j["max_grade_reached"], 8);
    EXPECT_EQ(j["max_attainable"], 10);
    EXPECT_EQ(detail::read_file(path), detail::read_file(kCatalog));
}

TEST(Cli, JudgeTextAndCsv) {
    const auto text = cli({"judge", "--catalog", kCatalog});
    EXPECT_EQ(text.code, 0);
    EXPECT_NE(text.out.find("relevant (grade >= 1): 15"), std::string::npos);
    const auto csv = cli({"judge", "--catalog", kCatalog, "--format", "csv"});
    EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 151);
}

TEST(Cli, EmptyQuerySearchReturnsAllProducts) {
    testutil::TempDir dir;
    detail::write_file(dir.file("q.json"), R"({"criteria": []})");
    const auto r = cli({"search", "--catalog", kCatalog, "--query", dir.file("q.json"), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto page = json::parse(r.out);
    EXPECT_EQ(page["total_count"], 150);
    EXPECT_EQ(page["items"].size(), 15u);
}

TEST(Cli, FacetedSearchCsv) {
    testutil::TempDir dir;
    detail::write_file(dir.file("s.json"), R"({"selected":[{"facet":"meal","value":"breakfast"}],"sort":"price_asc"})");
    const auto r = cli({"search", "--catalog", kCatalog, "--engine", "faceted", "--query", dir.file("s.json"),
                        "--format", "csv", "--page", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("rank,product_id,srs\n16,", 0), 0u);
}

TEST(Cli, ScriptRunThenEvalIsConsistentWithDirectRecall) {
    testutil::TempDir dir;
    const auto logs = dir.path() / "logs";
    std::filesystem::create_directories(logs);
    for (const auto& entry : std::filesystem::directory_iterator(testutil::data_path("scripts"))) {
        const auto r = cli({"script-run", "--catalog", kCatalog, "--script", entry.path().string(), "--log-dir",
                            logs.string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    const auto out = dir.file("report");
    const auto r = cli({"eval", "--catalog", kCatalog, "--spec", kSpec, "--logs", logs.string(), "--groups",
                        testutil::data_path("groups.csv"), "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto judgments = judge_all(testutil::bundled(), paul_scenario_spec());
    std::istringstream in(detail::read_file(out + "/recall.csv"));
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        const auto log = load_session_log((logs / (cells[0] + ".ndjson")).string());
        EXPECT_NEAR(std::stod(cells[6]), seen_recall(log, judgments, std::stoi(cells[3])), 1e-11);
        ++rows;
    }
    EXPECT_EQ(rows, 8 * recall_thresholds().size());
    for (const char* f : {"ndcg.csv", "loess.csv", "completion.csv"}) {
        EXPECT_TRUE(std::filesystem::exists(out + "/" + f)) << f;
    }
}

TEST(Cli, ReplayGoldenAndTampered) {
    const auto golden = testutil::data_path("sessions/paul-weighted-01.ndjson");
    EXPECT_EQ(cli({"replay", "--catalog", kCatalog, "--log", golden}).code, 0);
    auto log = load_session_log(golden);
    std::swap(log.events[2].ranked_ids[0], log.events[2].ranked_ids[1]);
    std::swap(log.events[2].visible_ids[0], log.events[2].visible_ids[1]);
    testutil::TempDir dir;
    save_session_log(log, dir.file("bad.ndjson"));
    const auto r = cli({"replay", "--catalog", kCatalog, "--log", dir.file("bad.ndjson")});
    EXPECT_EQ(r.code, kExitRuntime);
    EXPECT_NE(r.err.find("event 2"), std::string::npos);
}

TEST(Cli, ValidateAndSuggest) {
    const auto v = cli({"validate", "--catalog", kCatalog, "--spec", kSpec, "--format", "json"});
    ASSERT_EQ(v.code, 0);
    EXPECT_EQ(json::parse(v.out)["categories"], 18);
    const auto s = cli({"suggest", "--catalog", kCatalog, "--prefix", "brea", "--format", "json"});
    ASSERT_EQ(s.code, 0);
    EXPECT_EQ(json::parse(s.out)[0]["text"], "breakfast");
    const auto t = cli({"suggest", "--catalog", kCatalog, "--prefix", "xyzzy"});
    EXPECT_NE(t.out.find("[free text]"), std::string::npos);
}

TEST(Cli, ExitCodesDistinguishUsageValidationAndRuntime) {
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(cli({"judge"}).code, kExitUsage);
    EXPECT_EQ(cli({"judge", "--catalog", kCatalog, "--format", "xml"}).code, kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
    EXPECT_EQ(cli({"validate", "--catalog", testutil::fixture_path("unknown-facet.json")}).code, kExitInvalid);
    EXPECT_EQ(cli({"validate", "--catalog", "/nonexistent.json"}).code, kExitRuntime);
    testutil::TempDir dir;
    detail::write_file(dir.file("q.json"), R"({"criteria":[{"id":"a","weight":1.5,"target":{"type":"nominal","facet":"meal","value":"breakfast"}}]})");
    EXPECT_EQ(cli({"search", "--catalog", kCatalog, "--query", dir.file("q.json")}).code, kExitInvalid);
}

TEST(Cli, GenerateIsDeterministicAndRenameChangesNamesOnly) {
    testutil::TempDir dir;
    ASSERT_EQ(cli({"generate", "--seed", "4", "--out", dir.file("a.json")}).code, 0);
    ASSERT_EQ(cli({"generate", "--seed", "4", "--out", dir.file("b.json")}).code, 0);
    ASSERT_EQ(cli({"generate", "--seed", "4", "--rename-seed", "9", "--out", dir.file("c.json")}).code, 0);
    EXPECT_EQ(detail::read_file(dir.file("a.json")), detail::read_file(dir.file("b.json")));
    EXPECT_NE(detail::read_file(dir.file("a.json")), detail::read_file(dir.file("c.json")));
    const auto a = load_catalog(dir.file("a.json"));
    EXPECT_EQ(clone_with_renames(a, 9), load_catalog(dir.file("c.json")));
}
