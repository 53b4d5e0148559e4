#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace prefsearch;

namespace {

const SearchContext& ctx() {
    static const SearchContext c(testutil::bundled());
    return c;
}

SessionHeader header(const std::string& id = "s1", EngineKind engine = EngineKind::Weighted) {
    return {id, engine, catalog_hash(testutil::bundled()), kPageSize};
}

QueryEvent event_for(const WeightedQuery& q, Action action, std::int64_t t, std::size_t pages = 1) {
    QueryEvent e;
    e.session_id = "s1";
    e.timestamp_ms = t;
    e.engine = EngineKind::Weighted;
    e.action = action;
    e.query_state = query_to_json(q);
    e.ranked_ids = ranked_ids(rank(q, ctx()));
    const auto n = std::min(e.ranked_ids.size(), pages * kPageSize);
    e.visible_ids.assign(e.ranked_ids.begin(), e.ranked_ids.begin() + static_cast<std::ptrdiff_t>(n));
    return e;
}

SessionLog ten_event_log() {
    SessionRecorder rec(header());
    WeightedQuery q;
    const auto paul = testutil::paul_query();
    std::int64_t t = 0;
    for (std::size_t i = 0; i < 9; ++i) {
        q.criteria.push_back(paul.criteria[i]);
        rec.record(event_for(q, Action::AddTerm, t += 1000));
    }
    auto e = event_for(q, Action::SelectProduct, t += 1000);
    e.product_id = e.visible_ids.front();
    rec.record(e);
    return rec.log();
}

} // namespace

TEST(Record, FirstEventAtZero) {
    SessionRecorder rec(header());
    rec.record(event_for(WeightedQuery{}, Action::AddTerm, 0));
    EXPECT_EQ(rec.log().events.size(), 1u);
}

TEST(Record, EventAfterSelectProductIsRejected) {
    auto log = ten_event_log();
    EXPECT_TRUE(log.closed());
    SessionRecorder rec(header());
    for (const auto& e : log.events) rec.record(e);
    EXPECT_THROW(rec.record(event_for(WeightedQuery{}, Action::AddTerm, 20000)), SessionError);
}

TEST(Record, TimestampRegressionRejected) {
    SessionRecorder rec(header());
    rec.record(event_for(WeightedQuery{}, Action::AddTerm, 500));
    EXPECT_THROW(rec.record(event_for(WeightedQuery{}, Action::AddTerm, 499)), SessionError);
}

TEST(Record, VisibleMustBeRankedPrefixOfWholePages) {
    SessionRecorder rec(header());
    auto e = event_for(WeightedQuery{}, Action::AddTerm, 0);
    auto bad = e;
    bad.visible_ids.pop_back();
    EXPECT_THROW(rec.record(bad), SessionError);
    bad = e;
    std::swap(bad.visible_ids[0], bad.visible_ids[1]);
    EXPECT_THROW(rec.record(bad), SessionError);
    rec.record(e);
}

TEST(Record, ProductIdOnlyOnSelectProduct) {
    SessionRecorder rec(header());
    auto e = event_for(WeightedQuery{}, Action::AddTerm, 0);
    e.product_id = "h001";
    EXPECT_THROW(rec.record(e), SessionError);
    auto sel = event_for(WeightedQuery{}, Action::SelectProduct, 0);
    EXPECT_THROW(rec.record(sel), SessionError);
}

TEST(Record, MismatchedSessionOrEngineRejected) {
    SessionRecorder rec(header());
    auto e = event_for(WeightedQuery{}, Action::AddTerm, 0);
    e.session_id = "other";
    EXPECT_THROW(rec.record(e), SessionError);
    e.session_id = "s1";
    e.engine = EngineKind::Faceted;
    EXPECT_THROW(rec.record(e), SessionError);
}

TEST(Record, TenEventFileRoundTrips) {
    testutil::TempDir dir;
    const auto path = dir.file("s1.ndjson");
    {
        SessionRecorder rec(header(), path);
        for (const auto& e : ten_event_log().events) rec.record(e);
    }
    const auto text = detail::read_file(path);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 11);  // header + 10 events
    const auto parsed = load_session_log(path);
    EXPECT_EQ(parsed.events.size(), 10u);
    EXPECT_EQ(parsed.header, header());
    EXPECT_EQ(dump_session_log(parsed), text);
}

TEST(Parse, RejectsInvalidLogs) {
    EXPECT_THROW(parse_session_log(""), ParseError);
    EXPECT_THROW(parse_session_log("{\"format\":\"x\"}\n"), ParseError);
    auto log = ten_event_log();
    log.events[3].timestamp_ms = 0;
    EXPECT_THROW(parse_session_log(dump_session_log(log)), SessionError);
}

TEST(Replay, FreshSessionMatches) {
    const auto log = ten_event_log();
    const auto lists = replay(log, ctx());
    ASSERT_EQ(lists.size(), log.events.size());
    for (std::size_t i = 0; i < lists.size(); ++i) EXPECT_EQ(lists[i], log.events[i].ranked_ids);
}

TEST(Replay, TamperedRankedIdsDivergeAtThatEvent) {
    auto log = ten_event_log();
    std::swap(log.events[4].ranked_ids[0], log.events[4].ranked_ids[1]);
    std::swap(log.events[4].visible_ids[0], log.events[4].visible_ids[1]);
    try {
        replay(log, ctx());
        FAIL() << "expected divergence";
    } catch (const ReplayDivergence& e) {
        EXPECT_EQ(e.event_index(), 4u);
    }
}

TEST(Replay, CatalogMismatchRejected) {
    auto log = ten_event_log();
    log.header.catalog_id = "fnv1a64:0000000000000000";
    EXPECT_THROW(replay(log, ctx()), SessionError);
}

TEST(Replay, GoldenLogsReplay) {
    for (const char* name : {"sessions/paul-weighted-01.ndjson", "sessions/paul-facet-01.ndjson"}) {
        const auto path = testutil::data_path(name);
        const auto log = load_session_log(path);
        EXPECT_NO_THROW(replay(log, ctx())) << name;
        EXPECT_EQ(dump_session_log(log), detail::read_file(path)) << name;
    }
}

TEST(EnumStrings, RoundTrip) {
    for (auto a : {Action::AddTerm, Action::RemoveTerm, Action::SetWeight, Action::SelectFacet, Action::DeselectFacet,
                   Action::Sort, Action::NextPage, Action::SelectProduct}) {
        EXPECT_EQ(action_from(to_string(a)), a);
    }
    EXPECT_EQ(engine_from("faceted"), EngineKind::Faceted);
    EXPECT_THROW(engine_from("boolean"), ParseError);
    EXPECT_FALSE(is_search_action(Action::NextPage));
    EXPECT_TRUE(is_search_action(Action::Sort));
}
