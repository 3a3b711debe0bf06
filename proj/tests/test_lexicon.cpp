#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "fm/dsl.hpp"
#include "fm/lexicon.hpp"
#include "test_support.hpp"

using namespace fm;
using S = StageKind;
namespace fs = std::filesystem;

namespace {

const Lexicon& lex() {
  static const Lexicon l = Lexicon::load(Lexicon::bundled_path());
  return l;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an fm::Error");
  return ErrorCode::kIo;
}

Schema corpus_schema(const std::string& name) { return canonicalize(load_schema_file(test::corpus(name))); }

const Event& event(const TenseStructure& t, std::string_view id) {
  const Event* e = t.graph.find(id);
  REQUIRE(e != nullptr);
  return *e;
}

std::string random_label(std::mt19937& rng) {
  static const std::string alphabet = "abcXYZ 019_-\"\\${}é";
  std::string out;
  const int n = 1 + static_cast<int>(rng() % 12);
  for (int i = 0; i < n; ++i) out += alphabet[rng() % alphabet.size()];
  return out;
}

// Scratch directory holding a copy of the bundled data.
struct ScratchData {
  fs::path root;
  ScratchData() {
    root = fs::temp_directory_path() / ("fm_lexicon_" + std::to_string(std::random_device{}()));
    fs::create_directories(root);
    fs::copy(test::data(""), root, fs::copy_options::recursive);
  }
  ~ScratchData() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
  void write(const std::string& rel, const std::string& text) const {
    std::ofstream(root / rel, std::ios::binary) << text;
  }
  std::string tsv() const { return (root / "lexicon.tsv").string(); }
};

}  // namespace

TEST_CASE("lookup") {
  CHECK(lex().lookup("put").name == "Putting");
  CHECK(lex().lookup("warn").name == "Advice");
  CHECK(lex().lookup("learn").dynamic_stative == "Cognition");
  CHECK(lex().lookup("know").name.empty());
  CHECK(lex().entry("know").vendler_default == VendlerCategory::State);
  CHECK(code_of([] { lex().lookup("flarb"); }) == ErrorCode::kUnknownVerb);
  CHECK(lex().entries().size() >= 40);
}

TEST_CASE("the nine classes and their signatures") {
  for (const char* name : {"Putting", "Removing", "SendingCarrying", "ExertingForce", "ChangeOfPossession",
                           "Learning", "HoldingKeeping", "Concealment", "Advice"}) {
    CAPTURE(name);
    CHECK_NOTHROW(lex().find_template(name));
  }
  CHECK(lex().signature("Putting") == std::vector<S>{S::Release, S::Transfer, S::Transfer, S::Receive});
  CHECK(lex().signature("Learning") == std::vector<S>{S::Transfer, S::Transfer, S::Receive, S::Process});
  CHECK(lex().signature("ExertingForce") == std::vector<S>{S::Receive, S::Process});
  CHECK(lex().signature("HoldingKeeping") == std::vector<S>{S::Receive, S::Process});
  CHECK(lex().signature("Concealment") == std::vector<S>{S::Receive, S::Process});
  CHECK(lex().signature("Removing") == std::vector<S>{S::Transfer, S::Receive, S::Process});
  CHECK(lex().signature("SendingCarrying") == std::vector<S>{S::Release, S::Transfer, S::Transfer, S::Receive});
  CHECK(lex().signature("Advice") == std::vector<S>{S::Process});
  CHECK(code_of([] { lex().signature("Dancing"); }) == ErrorCode::kNoTemplate);
  CHECK(code_of([] { lex().find_template("Advice", "beside"); }) == ErrorCode::kNoTemplate);
  CHECK(lex().find_template("Advice", "to").ungrammatical);
  CHECK_FALSE(lex().find_template("Advice", "against").ungrammatical);
}

TEST_CASE("instantiation reproduces the corpus") {
  CHECK(lex().instantiate("Putting", {{"agent", "I"}, {"theme", "book"}, {"goal", "table"}}) ==
        corpus_schema("put.fm"));
  CHECK(lex().instantiate("ChangeOfPossession", {{"agent", "They"}, {"theme", "bicycle"}, {"goal", "me"}}) ==
        corpus_schema("lend.fm"));
  CHECK(lex().instantiate("Removing", {{"agent", "Doug"}, {"theme", "smudges"}, {"source", "tabletop"}}) ==
        corpus_schema("remove.fm"));
  CHECK(lex().instantiate("SendingCarrying", {{"agent", "Nora"}, {"theme", "book"}, {"goal", "Peter"}}) ==
        corpus_schema("send.fm"));
  CHECK(lex().instantiate("ExertingForce", {{"agent", "Nora"}, {"theme", "chair"}}) ==
        corpus_schema("push_chair.fm"));
  CHECK(lex().instantiate("Learning", {{"agent", "Rhoda"}, {"theme", "French"}, {"source", "old book"}}) ==
        corpus_schema("learn.fm"));
  CHECK(lex().instantiate("HoldingKeeping", {{"agent", "She"}, {"theme", "rail"}}) == corpus_schema("hold.fm"));
  CHECK(lex().instantiate("Concealment", {{"agent", "Frances"}, {"theme", "presents"}, {"source", "Sally"}}) ==
        corpus_schema("hide.fm"));
  CHECK(lex().instantiate("Advice", {{"agent", "Ellen"}, {"theme", "Helen"}}) == corpus_schema("warn.fm"));
  CHECK(lex().instantiate("Advice", {{"agent", "Ellen"}, {"theme", "Helen"}}, "to") ==
        corpus_schema("warn_to.fm"));
  CHECK(lex().instantiate("Advice", {{"agent", "Ellen"}, {"theme", "Helen"}, {"goal", "skating on thin ice"}},
                          "against") == corpus_schema("warn_against.fm"));
}

TEST_CASE("bindings") {
  CHECK(code_of([] { lex().instantiate("Putting", {{"agent", "I"}}); }) == ErrorCode::kBinding);
  CHECK(code_of([] {
          lex().instantiate("Putting", {{"agent", "I"}, {"theme", "b"}, {"goal", "t"}, {"mood", "x"}});
        }) == ErrorCode::kBinding);
  CHECK(lex().default_binding("walk").at("theme") == "walk");
  CHECK(lex().default_binding("put").at("goal") == "table");

  // Labels are taken literally, placeholders included.
  Schema s = lex().instantiate("Putting", {{"agent", "${goal}"}, {"theme", "a \"b\" \\ c"}, {"goal", "}{"}});
  CHECK(s.find_sphere("agent")->label == "${goal}");
  CHECK(s.find_machine("theme_agent")->thing == "a \"b\" \\ c");
  CHECK(s.find_sphere("goal")->label == "}{");
}

TEST_CASE("random bindings keep the signature") {
  std::mt19937 rng(99);
  for (const VerbTemplate* t : lex().templates()) {
    CAPTURE(t->class_name);
    CAPTURE(t->variant);
    for (int i = 0; i < 30; ++i) {
      RoleBinding b;
      for (const auto& r : t->roles) b[r] = random_label(rng);
      const Schema s = t->instantiate(b);
      CHECK(validate(s).empty());
      CHECK(theme_walk(s, t->theme_machines) == t->signature);
    }
  }
}

TEST_CASE("lexicon data is checked on load") {
  SUBCASE("override path") {
    ScratchData d;
    d.write("lexicon.tsv", "verb\tclass\tdynamic_stative\tvendler_default\nfling\tPutting\tActivity\t-\n");
    auto l = Lexicon::load(d.tsv());
    CHECK(l.lookup("fling").name == "Putting");
    CHECK(code_of([&] { l.lookup("put"); }) == ErrorCode::kUnknownVerb);
  }
  SUBCASE("unknown class") {
    ScratchData d;
    d.write("lexicon.tsv", "fling\tThrowing\tActivity\t-\n");
    CHECK(code_of([&] { Lexicon::load(d.tsv()); }) == ErrorCode::kLexicon);
  }
  SUBCASE("bad tag") {
    ScratchData d;
    d.write("lexicon.tsv", "fling\tPutting\tSpeedy\t-\n");
    CHECK(code_of([&] { Lexicon::load(d.tsv()); }) == ErrorCode::kLexicon);
  }
  SUBCASE("duplicate verb") {
    ScratchData d;
    d.write("lexicon.tsv", "fling\tPutting\tActivity\t-\nfling\tPutting\tActivity\t-\n");
    CHECK(code_of([&] { Lexicon::load(d.tsv()); }) == ErrorCode::kLexicon);
  }
  SUBCASE("signature that does not match the template") {
    ScratchData d;
    std::string text = read_text_file((d.root / "templates" / "HoldingKeeping.fm").string());
    text.replace(text.find("#! signature Receive Process"), 28, "#! signature Process Receive");
    d.write("templates/HoldingKeeping.fm", text);
    CHECK(code_of([&] { Lexicon::load(d.tsv()); }) == ErrorCode::kLexicon);
  }
  SUBCASE("template that does not validate") {
    ScratchData d;
    d.write("templates/Broken.fm",
            "#! class Broken\n#! roles agent\n#! default agent A\n#! theme m\n#! signature Process\n"
            "sphere agent \"${agent}\" { machine m thing \"x\" stages [Process Transfer] }\n"
            "flow f: m.Transfer -> m.Process;\n");
    CHECK(code_of([&] { Lexicon::load(d.tsv()); }) == ErrorCode::kLexicon);
  }
  SUBCASE("missing file") {
    CHECK(code_of([] { Lexicon::load("/nonexistent/lexicon.tsv"); }) == ErrorCode::kIo);
  }
}

TEST_CASE("tenses") {
  const Schema walk = lex().instantiate("Performing", lex().default_binding("walk"));
  const Region all = full_region(walk);

  SUBCASE("simple") {
    auto past = apply_tense(walk, all, Tense::SimplePast, "agent");
    CHECK(past.graph.events.size() == 1);
    CHECK(is_complete(event(past, "event")));
    auto present = apply_tense(walk, all, Tense::SimplePresent, "agent");
    CHECK_FALSE(is_complete(event(present, "event")));
    CHECK(event(present, "event").time.traversed() == StageSet{S::Process});
    auto future = apply_tense(walk, all, Tense::SimpleFuture, "agent");
    CHECK(event(future, "event").time.traversed().empty());
    CHECK(temporal_order(future.graph) == std::vector<std::string>{"now", "event"});
    CHECK(future.schema == walk);
  }

  SUBCASE("progressive") {
    for (auto t : {Tense::PresentProgressive, Tense::PastProgressive, Tense::FutureProgressive}) {
      CAPTURE(to_string(t));
      auto p = apply_tense(walk, all, t, "agent");
      CHECK_FALSE(is_complete(event(p, "event")));
      const Event& step = event(p, "step");
      REQUIRE(step.repetition.has_value());
      CHECK(step.repetition->is_ongoing());
      CHECK(is_complete(step));
      CHECK(p.graph.sub_event_of.at("step") == "event");
      CHECK(simulate(p.graph, p.schema, 3).incomplete);
    }
    auto past = apply_tense(walk, all, Tense::PastProgressive, "agent");
    CHECK(temporal_order(past.graph) == std::vector<std::string>{"event", "step", "now"});
    auto future = apply_tense(walk, all, Tense::FutureProgressive, "agent");
    CHECK(temporal_order(future.graph) == std::vector<std::string>{"now", "event", "step"});
  }

  SUBCASE("perfect") {
    const Schema wash = lex().instantiate("ExertingForce", {{"agent", "I"}, {"theme", "dishes"}});
    for (auto t : {Tense::PresentPerfect, Tense::PastPerfect, Tense::FuturePerfect}) {
      CAPTURE(to_string(t));
      auto p = apply_tense(wash, full_region(wash), t, "agent");
      CHECK(validate(p.schema).empty());
      const Sphere* have = p.schema.find_sphere("have");
      REQUIRE(have != nullptr);
      CHECK(have->label == "Have");
      CHECK(have->parent == std::optional<std::string>("agent"));
      CHECK(p.schema.machines_in("have").size() == 2);
      CHECK(is_complete(event(p, "event")));
      CHECK(p.graph.sub_event_of.at("event") == "have");
    }
    CHECK(event(apply_tense(wash, full_region(wash), Tense::PastPerfect, "agent"), "have").time ==
          TimeMachine::past());
    CHECK(code_of([&] { apply_tense(wash, full_region(wash), Tense::PresentPerfect, "nobody"); }) ==
          ErrorCode::kRegion);
    // A sphere already called "have" gets a fresh id.
    Schema clash = wash;
    clash.spheres.push_back({"have", "taken", std::nullopt});
    auto p = apply_tense(clash, full_region(clash), Tense::PresentPerfect, "agent");
    CHECK(p.schema.find_sphere("have_2") != nullptr);
    CHECK(validate(p.schema).empty());
  }

  SUBCASE("names") {
    for (auto t : kAllTenses) CHECK(parse_tense(to_string(t)) == t);
    CHECK_FALSE(parse_tense("Pluperfect").has_value());
  }
}

TEST_CASE("vendler") {
  auto golden = [](const std::string& stem) {
    const Schema s = load_schema_file(test::corpus(stem + ".fm"));
    return load_events_file(test::corpus(stem + ".events"), s);
  };
  CHECK(classify_vendler(golden("push_cart")) == VendlerCategory::Activity);
  CHECK(classify_vendler(golden("draw_circle")) == VendlerCategory::Accomplishment);
  CHECK(classify_vendler(golden("email")) == VendlerCategory::Accomplishment);
  CHECK_FALSE(classify_vendler(golden("remove")).has_value());
  CHECK_FALSE(classify_vendler(golden("poem")).has_value());

  const Schema run = lex().instantiate("Performing", lex().default_binding("run"));
  CHECK(classify_vendler(apply_tense(run, full_region(run), Tense::PresentProgressive, "agent").graph) ==
        VendlerCategory::Activity);
  CHECK_FALSE(classify_vendler(apply_tense(run, full_region(run), Tense::SimplePast, "agent").graph).has_value());

  // A repeated event that ends in an unfinished creation is not bounded.
  EventGraph g = golden("draw_circle");
  for (auto& e : g.events) {
    if (e.id != "2") e.time = TimeMachine::now();
  }
  CHECK(classify_vendler(g) == VendlerCategory::Activity);
}

TEST_CASE("tense goldens") {
  const Schema walk = lex().instantiate("Performing", lex().default_binding("walk"));
  const Schema wash = lex().instantiate("ExertingForce", {{"agent", "I"}, {"theme", "dishes"}});
  const std::vector<std::tuple<std::string, const Schema*, Tense>> cases = {
      {"walk_present", &walk, Tense::SimplePresent},
      {"walk_past", &walk, Tense::SimplePast},
      {"walk_future", &walk, Tense::SimpleFuture},
      {"walk_progressive", &walk, Tense::PresentProgressive},
      {"wash_present_perfect", &wash, Tense::PresentPerfect},
      {"wash_past_perfect", &wash, Tense::PastPerfect},
      {"wash_future_perfect", &wash, Tense::FuturePerfect}};
  for (const auto& [stem, schema, tense] : cases) {
    CAPTURE(stem);
    auto t = apply_tense(*schema, full_region(*schema), tense, "agent");
    const Schema golden = load_schema_file(test::corpus(stem + ".fm"));
    CHECK(canonicalize(t.schema) == canonicalize(golden));
    CHECK(t.graph == load_events_file(test::corpus(stem + ".events"), golden));
  }
}
