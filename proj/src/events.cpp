#include "fm/events.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fm {

TimeMachine TimeMachine::make(StageSet present, StageSet traversed) {
  if (!traversed.is_subset_of(present)) {
    throw Error(ErrorCode::kTime, "traversed time stages must be present on the time machine");
  }
  if (traversed.contains(StageKind::Transfer) && !traversed.contains(StageKind::Release)) {
    throw Error(ErrorCode::kTime, "time is transferred only after it is released");
  }
  TimeMachine t;
  t.present_ = present;
  t.traversed_ = traversed;
  return t;
}

Repetition Repetition::times(int n) {
  if (n < 1) throw std::invalid_argument("repetition count must be positive");
  return Repetition(n);
}

void Region::normalize() {
  std::sort(stages.begin(), stages.end(), endpoint_less);
  stages.erase(std::unique(stages.begin(), stages.end()), stages.end());
  std::sort(flows.begin(), flows.end(), id_less);
  flows.erase(std::unique(flows.begin(), flows.end()), flows.end());
}

bool Region::contains(const Endpoint& e) const {
  return std::binary_search(stages.begin(), stages.end(), e, endpoint_less);
}

bool Region::contains_flow(std::string_view id) const {
  return std::find(flows.begin(), flows.end(), id) != flows.end();
}

bool Region::is_subset_of(const Region& other) const {
  return std::all_of(stages.begin(), stages.end(), [&](const Endpoint& e) { return other.contains(e); }) &&
         std::all_of(flows.begin(), flows.end(), [&](const std::string& f) { return other.contains_flow(f); });
}

Region full_region(const Schema& schema) {
  Region r;
  for (const auto& m : schema.machines) {
    for (auto s : m.stages.members()) r.stages.push_back(Endpoint{m.id, s});
  }
  for (const auto& f : schema.flows) r.flows.push_back(f.id);
  r.normalize();
  return r;
}

Region machines_region(const Schema& schema, const std::vector<std::string>& machine_ids) {
  Region r;
  auto wanted = [&](const std::string& id) {
    return std::find(machine_ids.begin(), machine_ids.end(), id) != machine_ids.end();
  };
  for (const auto& m : schema.machines) {
    if (!wanted(m.id)) continue;
    for (auto s : m.stages.members()) r.stages.push_back(Endpoint{m.id, s});
  }
  for (const auto& f : schema.flows) {
    if (wanted(f.from.machine) && wanted(f.to.machine)) r.flows.push_back(f.id);
  }
  r.normalize();
  return r;
}

bool is_event_id(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

namespace {

std::string endpoint_text(const Endpoint& e) {
  return e.machine + "." + std::string(to_string(e.stage));
}

// Empty string when the region fits the schema, otherwise the first problem.
std::string region_problem(const Schema& schema, const Region& region) {
  if (region.empty()) return "region is empty";
  for (const auto& e : region.stages) {
    if (schema.find_machine(e.machine) == nullptr) return "unknown machine '" + e.machine + "'";
    if (!schema.has_stage(e)) return "machine '" + e.machine + "' has no stage " + endpoint_text(e);
  }
  for (const auto& fid : region.flows) {
    const Flow* f = schema.find_flow(fid);
    if (f == nullptr) return "unknown flow '" + fid + "'";
    if (!region.contains(f->from) || !region.contains(f->to)) {
      return "flow '" + fid + "' has an endpoint outside the region";
    }
  }
  return {};
}

}  // namespace

Event eventize(const Schema& schema, std::string id, Region region, TimeMachine time,
               std::optional<Repetition> repetition, StageSet event_stages) {
  if (!is_event_id(id)) throw Error(ErrorCode::kRegion, "malformed event id '" + id + "'");
  region.normalize();
  if (auto problem = region_problem(schema, region); !problem.empty()) {
    throw Error(ErrorCode::kRegion, "event '" + id + "': " + problem);
  }
  event_stages.insert(StageKind::Process);
  Event e;
  e.id = std::move(id);
  e.region = std::move(region);
  e.time = time;
  e.event_stages = event_stages;
  e.repetition = repetition;
  return e;
}

bool is_complete(const Event& event) {
  const StageSet t = event.time.traversed();
  return t.contains(StageKind::Release) && t.contains(StageKind::Transfer);
}

const Event* EventGraph::find(std::string_view id) const {
  auto it = std::find_if(events.begin(), events.end(), [&](const Event& e) { return e.id == id; });
  return it == events.end() ? nullptr : &*it;
}

namespace {

struct IdLess {
  bool operator()(const std::string& a, const std::string& b) const { return id_less(a, b); }
};

// Kahn's algorithm with a min-queue; returns fewer ids than events on a cycle.
std::vector<std::string> kahn(const std::vector<Event>& events, const std::vector<ChronologyEdge>& edges) {
  std::map<std::string, int, IdLess> indegree;
  std::map<std::string, std::vector<std::string>, IdLess> succ;
  for (const auto& e : events) indegree[e.id] = 0;
  for (const auto& edge : edges) {
    ++indegree[edge.after];
    succ[edge.before].push_back(edge.after);
  }
  std::priority_queue<std::string, std::vector<std::string>, std::function<bool(const std::string&, const std::string&)>>
      ready([](const std::string& a, const std::string& b) { return id_less(b, a); });
  for (const auto& [id, d] : indegree) {
    if (d == 0) ready.push(id);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string id = ready.top();
    ready.pop();
    for (const auto& next : succ[id]) {
      if (--indegree[next] == 0) ready.push(next);
    }
    order.push_back(std::move(id));
  }
  return order;
}

}  // namespace

EventGraph build_chronology(std::vector<Event> events, std::vector<ChronologyEdge> edges,
                            std::map<std::string, std::string> sub_event_of) {
  EventGraph g;
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return id_less(a.id, b.id); });
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].id == events[i - 1].id) {
      throw Error(ErrorCode::kGraph, "duplicate event id '" + events[i].id + "'");
    }
  }
  g.events = std::move(events);

  for (const auto& edge : edges) {
    for (const auto* id : {&edge.before, &edge.after}) {
      if (g.find(*id) == nullptr) throw Error(ErrorCode::kGraph, "edge names unknown event '" + *id + "'");
    }
  }
  std::sort(edges.begin(), edges.end(), [](const ChronologyEdge& a, const ChronologyEdge& b) {
    if (a.before != b.before) return id_less(a.before, b.before);
    return id_less(a.after, b.after);
  });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);

  if (kahn(g.events, g.edges).size() != g.events.size()) {
    throw Error(ErrorCode::kCycle, "chronology edges contain a cycle");
  }

  for (const auto& [child, parent] : sub_event_of) {
    const Event* c = g.find(child);
    const Event* p = g.find(parent);
    if (c == nullptr || p == nullptr) {
      throw Error(ErrorCode::kGraph, "sub-event link '" + child + "' -> '" + parent + "' names an unknown event");
    }
    // Walk up from the child; revisiting it means the relation is cyclic.
    std::set<std::string> seen{child};
    for (std::string cur = parent;;) {
      if (!seen.insert(cur).second) {
        throw Error(ErrorCode::kCycle, "sub-event relation is cyclic at '" + child + "'");
      }
      auto up = sub_event_of.find(cur);
      if (up == sub_event_of.end()) break;
      cur = up->second;
    }
    if (!c->region.is_subset_of(p->region)) {
      throw Error(ErrorCode::kSubRegion, "sub-event '" + child + "' leaves the region of '" + parent + "'");
    }
  }
  g.sub_event_of = std::move(sub_event_of);
  return g;
}

std::vector<std::string> temporal_order(const EventGraph& graph) {
  auto order = kahn(graph.events, graph.edges);
  if (order.size() != graph.events.size()) throw Error(ErrorCode::kCycle, "chronology edges contain a cycle");
  return order;
}

namespace {

class OccurrenceWalk {
 public:
  OccurrenceWalk(const Schema& schema, const Event& event) : region_(event.region) {
    for (const auto& fid : region_.flows) {
      const Flow* f = schema.find_flow(fid);
      successors_[key(f->from)].push_back(f->to);
      inbound_.insert(key(f->to));
    }
    for (auto& [k, v] : successors_) {
      std::sort(v.begin(), v.end(), endpoint_less);
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    std::vector<const Trigger*> triggers;
    for (const auto& t : schema.triggers) {
      if (region_.contains(t.from) && region_.contains(t.to)) triggers.push_back(&t);
    }
    std::sort(triggers.begin(), triggers.end(),
              [](const Trigger* a, const Trigger* b) { return id_less(a->id, b->id); });
    for (const auto* t : triggers) {
      fires_[key(t->from)].push_back(t->to);
      inbound_.insert(key(t->to));
    }
  }

  std::vector<Endpoint> run() {
    for (const auto& s : region_.stages) {
      if (!inbound_.count(key(s))) walk_from(s);
    }
    // Stages reachable only around a cycle.
    for (const auto& s : region_.stages) walk_from(s);
    return std::move(out_);
  }

 private:
  static std::string key(const Endpoint& e) { return e.machine + '\x1f' + std::string(to_string(e.stage)); }

  void walk_from(const Endpoint& root) {
    visit(root);
    while (!queued_.empty()) {
      Endpoint next = queued_.front();
      queued_.pop_front();
      visit(next);
    }
  }

  // Iterative depth-first visit.
  void visit(const Endpoint& root) {
    if (visited_.count(key(root))) return;
    std::vector<std::pair<Endpoint, std::size_t>> stack;
    enter(root);
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [node, idx] = stack.back();
      auto it = successors_.find(key(node));
      if (it == successors_.end() || idx >= it->second.size()) {
        stack.pop_back();
        continue;
      }
      Endpoint next = it->second[idx++];
      if (visited_.count(key(next))) continue;
      enter(next);
      stack.emplace_back(std::move(next), 0);
    }
  }

  void enter(const Endpoint& e) {
    visited_.insert(key(e));
    out_.push_back(e);
    if (auto it = fires_.find(key(e)); it != fires_.end()) {
      for (const auto& target : it->second) queued_.push_back(target);
    }
  }

  const Region& region_;
  std::unordered_map<std::string, std::vector<Endpoint>> successors_;
  std::unordered_map<std::string, std::vector<Endpoint>> fires_;
  std::set<std::string> inbound_;
  std::set<std::string> visited_;
  std::deque<Endpoint> queued_;
  std::vector<Endpoint> out_;
};

}  // namespace

Trace simulate(const EventGraph& graph, const Schema& schema, int rep_bound) {
  if (rep_bound < 1) throw std::invalid_argument("rep_bound must be positive");
  for (const auto& e : graph.events) {
    if (auto problem = region_problem(schema, e.region); !problem.empty()) {
      throw Error(ErrorCode::kGraph, "event '" + e.id + "': " + problem);
    }
  }

  Trace trace;
  trace.temporal_order = temporal_order(graph);
  for (const auto& id : trace.temporal_order) {
    const Event& e = *graph.find(id);
    int occurrences = 1;
    if (e.repetition) {
      if (e.repetition->is_ongoing()) {
        occurrences = rep_bound;
        trace.incomplete = true;
      } else {
        occurrences = std::min(e.repetition->count(), rep_bound);
      }
    }
    const auto steps = OccurrenceWalk(schema, e).run();
    for (int k = 1; k <= occurrences; ++k) {
      for (const auto& at : steps) trace.steps.push_back(Step{id, k, at});
    }
  }
  return trace;
}

std::vector<Endpoint> operational_sequence(const Trace& trace, std::string_view event_id) {
  if (std::find(trace.temporal_order.begin(), trace.temporal_order.end(), event_id) ==
      trace.temporal_order.end()) {
    throw Error(ErrorCode::kNoEvent, "event '" + std::string(event_id) + "' is not in the trace");
  }
  std::vector<Endpoint> out;
  for (const auto& s : trace.steps) {
    if (s.event == event_id && s.occurrence == 1) out.push_back(s.at);
  }
  return out;
}

std::string format_trace(const Trace& trace) {
  std::ostringstream os;
  os << "order";
  for (const auto& id : trace.temporal_order) os << '\t' << id;
  os << "\nstatus\t" << (trace.incomplete ? "incomplete" : "complete") << '\n';
  for (const auto& s : trace.steps) {
    os << s.event << '\t' << s.occurrence << '\t' << s.at.machine << '\t' << to_string(s.at.stage) << '\n';
  }
  return os.str();
}

Trace parse_trace(std::string_view text) {
  auto fail = [](int line, const std::string& why) -> Trace {
    throw Error(ErrorCode::kParse, "trace line " + std::to_string(line) + ": " + why);
  };
  auto split = [](std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    return out;
  };

  Trace trace;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    auto cols = split(line);
    if (lineno == 1) {
      if (cols.front() != "order") return fail(lineno, "expected order header");
      trace.temporal_order.assign(cols.begin() + 1, cols.end());
    } else if (lineno == 2) {
      if (cols.size() != 2 || cols[0] != "status" || (cols[1] != "complete" && cols[1] != "incomplete")) {
        return fail(lineno, "expected status header");
      }
      trace.incomplete = cols[1] == "incomplete";
    } else {
      if (cols.size() != 4) return fail(lineno, "expected 4 tab-separated fields");
      auto stage = parse_stage(cols[3]);
      if (!stage) return fail(lineno, "unknown stage '" + cols[3] + "'");
      int occurrence = 0;
      try {
        occurrence = std::stoi(cols[1]);
      } catch (const std::exception&) {
        return fail(lineno, "bad occurrence '" + cols[1] + "'");
      }
      trace.steps.push_back(Step{cols[0], occurrence, Endpoint{cols[2], *stage}});
    }
  }
  if (lineno < 2) return fail(lineno, "missing headers");
  return trace;
}

}  // namespace fm
