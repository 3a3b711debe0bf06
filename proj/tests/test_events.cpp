#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "fm/dsl.hpp"
#include "fm/events.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fm;
using S = StageKind;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an fm::Error");
  return ErrorCode::kIo;
}

Event plain(const std::string& id, const Schema& s, const std::vector<std::string>& machines) {
  return eventize(s, id, machines_region(s, machines), TimeMachine::past());
}

EventGraph load_pair(const std::string& stem, Schema* schema_out = nullptr) {
  Schema s = load_schema_file(test::corpus(stem + ".fm"));
  auto g = load_events_file(test::corpus(stem + ".events"), s);
  if (schema_out) *schema_out = s;
  return g;
}

std::vector<Step> steps_of(const Trace& t, const std::string& event, int occurrence) {
  std::vector<Step> out;
  for (const auto& s : t.steps) {
    if (s.event == event && s.occurrence == occurrence) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("time machine") {
  CHECK_FALSE(is_complete(eventize(load_schema_file(test::corpus("hold.fm")), "e",
                                   full_region(load_schema_file(test::corpus("hold.fm"))), TimeMachine::now())));
  CHECK(code_of([] { TimeMachine::make({S::Process}, {S::Release}); }) == ErrorCode::kTime);
  CHECK(code_of([] { TimeMachine::make(TimeMachine::kStandardStages, {S::Transfer}); }) == ErrorCode::kTime);
  CHECK(TimeMachine::make({S::Create, S::Process}, {S::Create}).traversed() == StageSet{S::Create});
  CHECK(TimeMachine::past().traversed() == TimeMachine::kStandardStages);
  CHECK(TimeMachine::pending().traversed().empty());
}

TEST_CASE("repetition") {
  CHECK_THROWS_AS(Repetition::times(0), std::invalid_argument);
  CHECK(Repetition::times(3).count() == 3);
  CHECK(Repetition::ongoing().is_ongoing());
  CHECK_FALSE(Repetition::times(1).is_ongoing());
}

TEST_CASE("eventize") {
  const Schema remove = load_schema_file(test::corpus("remove.fm"));
  Event e = eventize(remove, "removal", full_region(remove), TimeMachine::past());
  CHECK(is_complete(e));
  CHECK(e.region.stages.size() == 5);
  CHECK(e.region.flows.size() == 4);
  CHECK(e.event_stages.contains(S::Process));

  Event created = eventize(remove, "c", full_region(remove), TimeMachine::now(), std::nullopt, {S::Create});
  CHECK(created.event_stages == StageSet{S::Create, S::Process});
  CHECK_FALSE(is_complete(created));
  CHECK_FALSE(is_complete(eventize(remove, "p", full_region(remove), TimeMachine::pending())));

  CHECK(code_of([&] { eventize(remove, "x", Region{}, TimeMachine::now()); }) == ErrorCode::kRegion);
  CHECK(code_of([&] { eventize(remove, "x", Region{{{"ghost", S::Create}}, {}}, TimeMachine::now()); }) ==
        ErrorCode::kRegion);
  CHECK(code_of([&] { eventize(remove, "x", Region{{{"theme_agent", S::Create}}, {}}, TimeMachine::now()); }) ==
        ErrorCode::kRegion);
  // A flow needs both endpoints inside the region.
  CHECK(code_of([&] { eventize(remove, "x", Region{{{"theme_agent", S::Receive}}, {"dispose"}}, TimeMachine::now()); }) ==
        ErrorCode::kRegion);
  CHECK(code_of([&] { eventize(remove, "x", Region{{{"theme_agent", S::Receive}}, {"nope"}}, TimeMachine::now()); }) ==
        ErrorCode::kRegion);
  CHECK(code_of([&] { eventize(remove, "bad id", full_region(remove), TimeMachine::now()); }) == ErrorCode::kRegion);

  const Region r = machines_region(remove, {"theme_agent"});
  CHECK(r.stages.size() == 3);
  CHECK(r.flows == std::vector<std::string>{"dispose", "receive"});
}

TEST_CASE("regions") {
  Region a{{{"m", S::Process}, {"a", S::Create}, {"m", S::Process}}, {"f2", "f10", "f2"}};
  a.normalize();
  CHECK(a.stages.size() == 2);
  CHECK(a.stages[0].machine == "a");
  CHECK(a.flows == std::vector<std::string>{"f2", "f10"});
  Region b = a;
  b.stages.push_back({"z", S::Create});
  b.normalize();
  CHECK(a.is_subset_of(b));
  CHECK_FALSE(b.is_subset_of(a));
}

TEST_CASE("chronology construction") {
  Schema poem;
  auto g = load_pair("poem", &poem);
  CHECK(g.events.size() == 11);
  CHECK(g.edges.size() == 10);
  CHECK(g.events.front().id == "1");
  CHECK(g.events.back().id == "11");

  auto email = load_pair("email");
  CHECK(email.sub_event_of.size() == 1);
  CHECK(email.sub_event_of.at("2") == "1");

  const Schema hold = load_schema_file(test::corpus("hold.fm"));
  auto a = plain("a", hold, {"theme_agent"});
  auto b = plain("b", hold, {"theme_agent"});
  CHECK(code_of([&] { build_chronology({a, b}, {{"a", "b"}, {"b", "a"}}, {}); }) == ErrorCode::kCycle);
  CHECK(code_of([&] { build_chronology({a, b}, {{"a", "a"}}, {}); }) == ErrorCode::kCycle);
  CHECK(code_of([&] { build_chronology({a, a}, {}, {}); }) == ErrorCode::kGraph);
  CHECK(code_of([&] { build_chronology({a, b}, {{"a", "c"}}, {}); }) == ErrorCode::kGraph);
  CHECK(code_of([&] { build_chronology({a, b}, {}, {{"a", "b"}, {"b", "a"}}); }) == ErrorCode::kCycle);
  CHECK(code_of([&] { build_chronology({a, b}, {}, {{"a", "zzz"}}); }) == ErrorCode::kGraph);

  Event small = eventize(hold, "s", Region{{{"theme_agent", S::Receive}}, {}}, TimeMachine::now());
  CHECK_NOTHROW(build_chronology({a, small}, {}, {{"s", "a"}}));
  CHECK(code_of([&] { build_chronology({a, small}, {}, {{"a", "s"}}); }) == ErrorCode::kSubRegion);

  auto dup_edges = build_chronology({a, b}, {{"a", "b"}, {"a", "b"}}, {});
  CHECK(dup_edges.edges.size() == 1);
}

TEST_CASE("temporal order") {
  const Schema hold = load_schema_file(test::corpus("hold.fm"));
  auto g = build_chronology({plain("3", hold, {"theme_agent"}), plain("1", hold, {"theme_agent"}),
                             plain("2", hold, {"theme_agent"})},
                            {{"1", "3"}, {"2", "3"}}, {});
  CHECK(temporal_order(g) == std::vector<std::string>{"1", "2", "3"});
  CHECK(temporal_order(g) == oracle::least_linear_extension({"1", "2", "3"}, {{"1", "3"}, {"2", "3"}}));

  std::mt19937 rng(2024);
  for (int i = 0; i < 200; ++i) {
    auto dag = oracle::random_dag(rng, 7);
    std::vector<Event> events;
    for (const auto& id : dag.ids) events.push_back(plain(id, hold, {"theme_agent"}));
    std::vector<ChronologyEdge> edges;
    for (const auto& [a, b] : dag.edges) edges.push_back({a, b});
    auto graph = build_chronology(events, edges, {});
    CHECK(temporal_order(graph) == oracle::least_linear_extension(dag.ids, dag.edges));
  }
}

TEST_CASE("simulation") {
  CHECK(simulate(EventGraph{}, Schema{}, 1) == Trace{});
  CHECK_THROWS_AS(simulate(EventGraph{}, Schema{}, 0), std::invalid_argument);

  SUBCASE("poem") {
    Schema poem;
    auto g = load_pair("poem", &poem);
    auto t = simulate(g, poem, 1);
    CHECK(t.temporal_order ==
          std::vector<std::string>{"1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11"});
    CHECK_FALSE(t.incomplete);
    for (const auto& e : g.events) {
      CAPTURE(e.id);
      CHECK(oracle::walk_is_causal(poem, e, operational_sequence(t, e.id)));
    }
    // Event 7: the breath triggers the song.
    auto seven = operational_sequence(t, "7");
    REQUIRE(seven.size() >= 2);
    CHECK(seven[0] == Endpoint{"breath", S::Process});
    CHECK(seven[1] == Endpoint{"song_I", S::Create});
    CHECK(simulate(g, poem, 1) == t);
  }

  SUBCASE("put") {
    const Schema put = load_schema_file(test::corpus("put.fm"));
    auto g = build_chronology({eventize(put, "put", full_region(put), TimeMachine::past())}, {}, {});
    CHECK(operational_sequence(simulate(g, put, 1), "put") ==
          std::vector<Endpoint>{{"theme_agent", S::Release},
                                {"theme_agent", S::Transfer},
                                {"theme_goal", S::Transfer},
                                {"theme_goal", S::Receive}});
    CHECK(code_of([&] { operational_sequence(simulate(g, put, 1), "nope"); }) == ErrorCode::kNoEvent);
  }

  SUBCASE("learn") {
    const Schema learn = load_schema_file(test::corpus("learn.fm"));
    auto g = build_chronology({eventize(learn, "learn", full_region(learn), TimeMachine::past())}, {}, {});
    std::vector<S> stages;
    for (const auto& s : operational_sequence(simulate(g, learn, 1), "learn")) stages.push_back(s.stage);
    CHECK(stages == std::vector<S>{S::Transfer, S::Transfer, S::Receive, S::Process});
  }

  SUBCASE("repetition bound") {
    Schema email;
    auto g = load_pair("email", &email);
    auto t = simulate(g, email, 3);
    CHECK(t.incomplete);
    CHECK(steps_of(t, "2", 3).size() == 1);
    CHECK(steps_of(t, "2", 4).empty());
    CHECK(steps_of(t, "1", 2).empty());

    const Schema hold = load_schema_file(test::corpus("hold.fm"));
    Event twice = eventize(hold, "r", full_region(hold), TimeMachine::now(), Repetition::times(2));
    auto t2 = simulate(build_chronology({twice}, {}, {}), hold, 5);
    CHECK_FALSE(t2.incomplete);
    CHECK(t2.steps.size() == 4);
    CHECK(simulate(build_chronology({twice}, {}, {}), hold, 1).steps.size() == 2);
  }

  SUBCASE("cycles are still walked") {
    const Schema poem = load_schema_file(test::corpus("poem.fm"));
    Event loop = eventize(poem, "loop", machines_region(poem, {"arrow_air"}), TimeMachine::now());
    auto seq = operational_sequence(simulate(build_chronology({loop}, {}, {}), poem, 1), "loop");
    CHECK(seq.size() == 4);
    CHECK(oracle::walk_is_causal(poem, loop, seq));
  }

  SUBCASE("region must fit the schema") {
    const Schema put = load_schema_file(test::corpus("put.fm"));
    const Schema hold = load_schema_file(test::corpus("hold.fm"));
    auto g = build_chronology({eventize(put, "p", full_region(put), TimeMachine::past())}, {}, {});
    CHECK(code_of([&] { simulate(g, hold, 1); }) == ErrorCode::kGraph);
  }
}

TEST_CASE("trace text") {
  Schema email;
  auto g = load_pair("email", &email);
  auto t = simulate(g, email, 2);
  const std::string text = format_trace(t);
  CHECK(text.rfind("order\t1\t2\nstatus\tincomplete\n1\t1\temail\tCreate\n", 0) == 0);
  CHECK(parse_trace(text) == t);
  CHECK(format_trace(Trace{}) == "order\nstatus\tcomplete\n");
  CHECK(parse_trace(format_trace(Trace{})) == Trace{});
  CHECK(code_of([] { parse_trace("nonsense"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_trace("order\t1\nstatus\tcomplete\n1\tx\tm\tCreate\n"); }) == ErrorCode::kParse);
}

TEST_CASE("events text") {
  for (const auto& file : test::corpus_files(".events")) {
    CAPTURE(file);
    const Schema s = load_schema_file(test::schema_for(file));
    const auto g = load_events_file(file, s);
    const std::string text = print_events(g);
    auto reparsed = parse_events(text);
    REQUIRE(reparsed.ok());
    CHECK(resolve_events(s, *reparsed.document) == g);
    CHECK(print_events(resolve_events(s, *reparsed.document)) == text);
  }
  CHECK(print_events(EventGraph{}) == "events {}\n");

  auto bad = parse_events("events { event 1 { region [m.Cook]; } event 2 { repeat 0; } order 1 2; }");
  CHECK_FALSE(bad.ok());
  CHECK(bad.errors.size() == 3);

  const Schema email = load_schema_file(test::corpus("email.fm"));
  CHECK(code_of([&] { load_events_file(test::inputs("cycle.events"), email); }) == ErrorCode::kCycle);
  CHECK(code_of([&] { load_events_file(test::corpus("nope.events"), email); }) == ErrorCode::kIo);
}
