#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fm/core.hpp"
#include "fm/dsl.hpp"

namespace fm {

// The FM machine for time. A stage in `traversed` has already been passed;
// time that has been released and transferred marks a finished event.
class TimeMachine {
 public:
  // The usual time machine: {Process, Release, Transfer}.
  static constexpr StageSet kStandardStages{StageKind::Process, StageKind::Release,
                                            StageKind::Transfer};

  TimeMachine() : present_(kStandardStages) {}

  // Throws Error{kTime} unless traversed is a subset of present and a
  // traversed Transfer is preceded by a traversed Release.
  static TimeMachine make(StageSet present, StageSet traversed);

  static TimeMachine pending() { return make(kStandardStages, {}); }
  static TimeMachine now() { return make(kStandardStages, {StageKind::Process}); }
  static TimeMachine past() { return make(kStandardStages, kStandardStages); }

  StageSet stages_present() const { return present_; }
  StageSet traversed() const { return traversed_; }

  friend bool operator==(const TimeMachine&, const TimeMachine&) = default;

 private:
  StageSet present_;
  StageSet traversed_;
};

class Repetition {
 public:
  // Throws std::invalid_argument for n < 1.
  static Repetition times(int n);
  static Repetition ongoing() { return Repetition(0); }

  bool is_ongoing() const { return count_ == 0; }
  int count() const { return count_; }  // 0 when ongoing

  friend bool operator==(const Repetition&, const Repetition&) = default;

 private:
  explicit Repetition(int count) : count_(count) {}
  int count_;
};

// A set of schema stages plus flow ids; kept sorted and duplicate-free.
struct Region {
  std::vector<Endpoint> stages;
  std::vector<std::string> flows;

  void normalize();
  bool empty() const { return stages.empty() && flows.empty(); }
  bool contains(const Endpoint& e) const;
  bool contains_flow(std::string_view id) const;
  bool is_subset_of(const Region& other) const;

  friend bool operator==(const Region&, const Region&) = default;
};

// Every stage and flow of the schema.
Region full_region(const Schema& schema);

// The stages of the named machines and the flows running between them.
Region machines_region(const Schema& schema, const std::vector<std::string>& machine_ids);

struct Event {
  std::string id;
  std::string label;
  Region region;
  TimeMachine time;
  StageSet event_stages{StageKind::Process};
  std::optional<Repetition> repetition;
  std::string duration;  // ordinal time only; kept as a label

  friend bool operator==(const Event&, const Event&) = default;
};

// Event ids: [A-Za-z0-9_]+ (numerals allowed, as in "event 7").
bool is_event_id(std::string_view id);

// Overlays an event on the schema. Process is always added to the event's
// own stages. Throws Error{kRegion} for an empty region, a reference to
// anything absent from the schema, a flow whose endpoints are outside the
// region, or a malformed id.
Event eventize(const Schema& schema, std::string id, Region region, TimeMachine time,
               std::optional<Repetition> repetition = std::nullopt,
               StageSet event_stages = {StageKind::Process});

// Release and Transfer of time have both been traversed.
bool is_complete(const Event& event);

struct ChronologyEdge {
  std::string before;
  std::string after;

  friend bool operator==(const ChronologyEdge&, const ChronologyEdge&) = default;
};

struct EventGraph {
  std::vector<Event> events;               // sorted by id
  std::vector<ChronologyEdge> edges;       // sorted, unique
  std::map<std::string, std::string> sub_event_of;  // child -> parent

  const Event* find(std::string_view id) const;

  friend bool operator==(const EventGraph&, const EventGraph&) = default;
};

// Throws Error{kGraph} for duplicate or unknown event ids, Error{kCycle} if
// the edges or the sub-event relation are cyclic, Error{kSubRegion} when a
// sub-event's region leaves its parent's.
EventGraph build_chronology(std::vector<Event> events, std::vector<ChronologyEdge> edges,
                            std::map<std::string, std::string> sub_event_of);

// Topological order of the edges, ties broken by ascending id.
std::vector<std::string> temporal_order(const EventGraph& graph);

struct Step {
  std::string event;
  int occurrence = 1;  // 1-based repetition index
  Endpoint at;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Trace {
  std::vector<Step> steps;
  std::vector<std::string> temporal_order;
  bool incomplete = false;  // some ongoing repetition was cut at the bound

  friend bool operator==(const Trace&, const Trace&) = default;
};

// Runs every event in temporal order. An event repeated r times yields
// min(r, rep_bound) occurrences; an ongoing one yields rep_bound and flags
// the trace incomplete. Within an occurrence the region is walked depth
// first from its source stages (those with no inbound region flow or
// trigger) in (machine id, stage order); each stage is visited once, and a
// trigger whose ends both lie in the region queues a walk from its target
// when its source stage is stepped. Throws Error{kGraph} when a region does
// not fit the schema; std::invalid_argument when rep_bound < 1.
Trace simulate(const EventGraph& graph, const Schema& schema, int rep_bound);

// Steps of the event's first occurrence. Throws Error{kNoEvent}.
std::vector<Endpoint> operational_sequence(const Trace& trace, std::string_view event_id);

// Line format:
//   order<TAB>id<TAB>id...
//   status<TAB>complete|incomplete
//   event_id<TAB>occurrence<TAB>machine_id<TAB>stage   (one per step)
std::string format_trace(const Trace& trace);
Trace parse_trace(std::string_view text);  // throws Error{kParse}

// ---- Events text (.events files) -------------------------------------

// One declared event before it is checked against a schema.
struct EventDecl {
  std::string id;
  std::string label;
  Region region;
  StageSet time_stages = TimeMachine::kStandardStages;
  StageSet traversed;
  StageSet event_stages{StageKind::Process};
  std::optional<Repetition> repetition;
  std::string duration;
  std::optional<std::string> within;  // parent event
};

struct EventsDocument {
  std::vector<EventDecl> events;
  std::vector<ChronologyEdge> order;
};

struct EventsParseResult {
  std::optional<EventsDocument> document;
  std::vector<ParseError> errors;

  bool ok() const { return document.has_value(); }
};

EventsParseResult parse_events(std::string_view text);

// eventize every declaration, then build_chronology.
EventGraph resolve_events(const Schema& schema, const EventsDocument& doc);

// Canonical events text; parse_events + resolve_events reproduces the graph.
std::string print_events(const EventGraph& graph);

// Reads and resolves an events file against a schema.
EventGraph load_events_file(const std::string& path, const Schema& schema);

}  // namespace fm
