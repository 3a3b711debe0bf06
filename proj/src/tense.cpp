#include <algorithm>
#include <set>

#include "fm/lexicon.hpp"

namespace fm {

std::string_view to_string(Tense tense) {
  switch (tense) {
    case Tense::SimplePresent: return "SimplePresent";
    case Tense::SimplePast: return "SimplePast";
    case Tense::SimpleFuture: return "SimpleFuture";
    case Tense::PresentProgressive: return "PresentProgressive";
    case Tense::PastProgressive: return "PastProgressive";
    case Tense::FutureProgressive: return "FutureProgressive";
    case Tense::PresentPerfect: return "PresentPerfect";
    case Tense::PastPerfect: return "PastPerfect";
    case Tense::FuturePerfect: return "FuturePerfect";
  }
  return "?";
}

std::optional<Tense> parse_tense(std::string_view name) {
  for (auto t : kAllTenses) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

bool is_progressive(Tense tense) {
  return tense == Tense::PresentProgressive || tense == Tense::PastProgressive ||
         tense == Tense::FutureProgressive;
}

bool is_perfect(Tense tense) {
  return tense == Tense::PresentPerfect || tense == Tense::PastPerfect || tense == Tense::FuturePerfect;
}

namespace {

// First of base, base_2, base_3, ... not already used in the schema.
std::string fresh_id(const Schema& s, const std::string& base) {
  auto taken = [&](const std::string& id) {
    return s.find_sphere(id) || s.find_machine(id) || s.find_flow(id) ||
           std::any_of(s.triggers.begin(), s.triggers.end(), [&](const Trigger& t) { return t.id == id; });
  };
  if (!taken(base)) return base;
  for (int n = 2;; ++n) {
    std::string id = base + "_" + std::to_string(n);
    if (!taken(id)) return id;
  }
}

// The repeated unit of a progressive: the Process stages of the region,
// or the whole region when it has none.
Region step_region(const Region& region) {
  Region step;
  for (const auto& e : region.stages) {
    if (e.stage == StageKind::Process) step.stages.push_back(e);
  }
  if (step.stages.empty()) return region;
  step.normalize();
  return step;
}

// Adds the Have sphere under the agent, holding an event machine and a
// time machine. Returns the region covering the new machines.
Region add_have_sphere(Schema& s, std::string_view agent_sphere, StageSet event_stages) {
  if (s.find_sphere(agent_sphere) == nullptr) {
    throw Error(ErrorCode::kRegion, "agent sphere '" + std::string(agent_sphere) + "' is not in the schema");
  }
  const std::string have = fresh_id(s, "have");
  s.spheres.push_back(Sphere{have, "Have", std::string(agent_sphere)});
  const std::string event_machine = fresh_id(s, "have_event");
  s.machines.push_back(Machine{event_machine, "event", have, event_stages});
  const std::string time_machine = fresh_id(s, "have_time");
  s.machines.push_back(Machine{time_machine, "time", have, TimeMachine::kStandardStages});
  const std::string released = fresh_id(s, "have_time_release");
  s.flows.push_back(Flow{released, {time_machine, StageKind::Process}, {time_machine, StageKind::Release}});
  const std::string transferred = fresh_id(s, "have_time_transfer");
  s.flows.push_back(
      Flow{transferred, {time_machine, StageKind::Release}, {time_machine, StageKind::Transfer}});
  return machines_region(s, {event_machine, time_machine});
}

}  // namespace

TenseStructure apply_tense(const Schema& schema, Region region, Tense tense, std::string_view agent_sphere) {
  if (auto diags = validate(schema); !diags.empty()) {
    throw Error(ErrorCode::kInvalid, "schema has " + std::to_string(diags.size()) + " diagnostics");
  }
  TenseStructure out;
  out.schema = schema;
  out.main_event = std::string(kMainEventId);

  const std::string main(kMainEventId), step(kStepEventId), now(kNowEventId), have(kHaveEventId);
  std::vector<Event> events;
  std::vector<ChronologyEdge> edges;
  std::map<std::string, std::string> parents;

  auto event = [&](const std::string& id, const Region& r, TimeMachine time, std::string label) {
    Event e = eventize(out.schema, id, r, time);
    e.label = std::move(label);
    events.push_back(std::move(e));
  };

  switch (tense) {
    case Tense::SimplePresent:
      event(main, region, TimeMachine::now(), "event at Now");
      break;
    case Tense::SimplePast:
      event(main, region, TimeMachine::past(), "completed event");
      break;
    case Tense::SimpleFuture:
      event(now, region, TimeMachine::now(), "Now");
      event(main, region, TimeMachine::pending(), "event whose time has not arrived");
      edges.push_back({now, main});
      break;
    case Tense::PresentProgressive:
    case Tense::PastProgressive:
    case Tense::FutureProgressive: {
      const bool future = tense == Tense::FutureProgressive;
      event(main, region, future ? TimeMachine::pending() : TimeMachine::now(), "whole event, ongoing");
      event(step, step_region(events.back().region), TimeMachine::past(), "repeated unit");
      events.back().repetition = Repetition::ongoing();
      parents[step] = main;
      edges.push_back({main, step});
      if (tense == Tense::PastProgressive) {
        event(now, region, TimeMachine::now(), "Now");
        edges.push_back({step, now});
      } else if (future) {
        event(now, region, TimeMachine::now(), "Now");
        edges.push_back({now, main});
      }
      break;
    }
    case Tense::PresentPerfect:
    case Tense::PastPerfect:
    case Tense::FuturePerfect: {
      region.normalize();
      Region owned = add_have_sphere(out.schema, agent_sphere, {StageKind::Process});
      owned.stages.insert(owned.stages.end(), region.stages.begin(), region.stages.end());
      owned.flows.insert(owned.flows.end(), region.flows.begin(), region.flows.end());
      const TimeMachine having = tense == Tense::PresentPerfect ? TimeMachine::now()
                                 : tense == Tense::PastPerfect  ? TimeMachine::past()
                                                                : TimeMachine::pending();
      event(main, region, TimeMachine::past(), "owned past event");
      event(have, owned, having, "Have");
      parents[main] = have;
      edges.push_back({main, have});
      break;
    }
  }
  out.graph = build_chronology(std::move(events), std::move(edges), std::move(parents));
  return out;
}

namespace {

bool creates(const Event& e) {
  return std::any_of(e.region.stages.begin(), e.region.stages.end(),
                     [](const Endpoint& s) { return s.stage == StageKind::Create; });
}

// Events reachable from `from` along chronology edges, plus its enclosing
// events.
std::set<std::string> fed_by(const EventGraph& g, const std::string& from) {
  std::set<std::string> out;
  std::vector<std::string> work{from};
  while (!work.empty()) {
    std::string cur = std::move(work.back());
    work.pop_back();
    for (const auto& e : g.edges) {
      if (e.before == cur && out.insert(e.after).second) work.push_back(e.after);
    }
  }
  for (auto it = g.sub_event_of.find(from); it != g.sub_event_of.end(); it = g.sub_event_of.find(it->second)) {
    if (!out.insert(it->second).second) break;
  }
  out.erase(from);
  return out;
}

}  // namespace

std::optional<VendlerCategory> classify_vendler(const EventGraph& graph) {
  bool repeated = false;
  for (const auto& r : graph.events) {
    if (!r.repetition) continue;
    repeated = true;
    for (const auto& id : fed_by(graph, r.id)) {
      const Event& t = *graph.find(id);
      if (!t.repetition && creates(t) && is_complete(t)) return VendlerCategory::Accomplishment;
    }
  }
  if (repeated) return VendlerCategory::Activity;
  return std::nullopt;
}

}  // namespace fm
