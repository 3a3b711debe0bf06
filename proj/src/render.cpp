#include "fm/render.hpp"

#include <sstream>

namespace fm {

namespace {

std::string quoted(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string node_id(const Endpoint& e) { return quoted(e.machine + "." + std::string(to_string(e.stage))); }

class SchemaWriter {
 public:
  SchemaWriter(const Schema& schema, const RenderOptions& opts) : s_(schema), opts_(opts) {}

  void header(std::ostream& os) const {
    os << "digraph fm {\n";
    os << "  rankdir=" << (opts_.rankdir == RankDir::LeftRight ? "LR" : "TB") << ";\n";
    os << "  compound=true;\n";
    os << "  node [shape=box, style=rounded];\n";
  }

  void body(std::ostream& os) const {
    for (const auto& sphere : s_.spheres) {
      if (!sphere.parent) write_sphere(os, sphere, 1);
    }
    for (const auto& f : s_.flows) {
      os << "  " << node_id(f.from) << " -> " << node_id(f.to);
      if (opts_.show_ids) os << " [label=" << quoted(f.id) << "]";
      os << ";\n";
    }
    for (const auto& t : s_.triggers) {
      os << "  " << node_id(t.from) << " -> " << node_id(t.to) << " [style=dashed";
      if (opts_.show_ids) os << ", label=" << quoted(t.id);
      os << "];\n";
    }
  }

 private:
  void write_sphere(std::ostream& os, const Sphere& sphere, int depth) const {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    os << pad << "subgraph " << quoted("cluster_" + sphere.id) << " {\n";
    os << pad << "  label=" << quoted(sphere.label) << ";\n";
    for (const auto& mid : s_.machines_in(sphere.id)) {
      const Machine& m = *s_.find_machine(mid);
      for (auto stage : m.stages.members()) {
        std::string label = std::string(to_string(stage)) + "(" + m.thing + ")";
        if (opts_.show_ids) label += "\n" + m.id;
        os << pad << "  " << node_id(Endpoint{m.id, stage}) << " [label=" << quoted(label) << "];\n";
      }
    }
    for (const auto& cid : s_.children_of(sphere.id)) write_sphere(os, *s_.find_sphere(cid), depth + 1);
    os << pad << "}\n";
  }

  const Schema& s_;
  const RenderOptions& opts_;
};

std::string render_with(const Schema& schema, const RenderOptions& opts,
                        const std::vector<const Event*>& overlays) {
  const Schema s = canonicalize(schema);
  if (s.spheres.empty() && s.flows.empty() && s.triggers.empty() && overlays.empty()) {
    return "digraph fm {\n}\n";
  }
  SchemaWriter w(s, opts);
  std::ostringstream os;
  w.header(os);
  w.body(os);
  for (const Event* e : overlays) {
    os << "  subgraph " << quoted("cluster_event_" + e->id) << " {\n";
    std::string label = "Event " + e->id;
    if (!e->label.empty()) label += ": " + e->label;
    os << "    label=" << quoted(label) << ";\n";
    os << "    style=bold;\n";
    for (const auto& st : e->region.stages) os << "    " << node_id(st) << ";\n";
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace

std::string render_schema(const Schema& schema, const RenderOptions& opts) {
  return render_with(schema, opts, {});
}

std::string render_events(const Schema& schema, const EventGraph& events, const RenderOptions& opts) {
  std::vector<const Event*> overlays;
  for (const auto& id : opts.overlay_events) {
    const Event* e = events.find(id);
    if (e == nullptr) throw Error(ErrorCode::kRegion, "no event '" + id + "' to overlay");
    for (const auto& st : e->region.stages) {
      if (!schema.has_stage(st)) {
        throw Error(ErrorCode::kRegion, "event '" + id + "' covers " + st.machine + "." +
                                            std::string(to_string(st.stage)) + ", absent from the schema");
      }
    }
    overlays.push_back(e);
  }
  return render_with(schema, opts, overlays);
}

std::string render_chronology(const EventGraph& graph) {
  if (graph.events.empty()) return "digraph chronology {\n}\n";
  std::ostringstream os;
  os << "digraph chronology {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=ellipse];\n";
  for (const auto& e : graph.events) {
    std::string label = "Event " + e.id;
    if (!e.label.empty()) label += "\n" + e.label;
    if (auto it = graph.sub_event_of.find(e.id); it != graph.sub_event_of.end()) {
      label += "\n(sub-event of " + it->second + ")";
    }
    if (!e.duration.empty()) label += "\n[" + e.duration + "]";
    os << "  " << quoted(e.id) << " [label=" << quoted(label);
    if (e.repetition) {
      const std::string marker =
          e.repetition->is_ongoing() ? "repeat: ongoing" : "repeat: " + std::to_string(e.repetition->count());
      os << ", xlabel=" << quoted(marker) << ", peripheries=2";
    }
    os << "];\n";
  }
  for (const auto& edge : graph.edges) os << "  " << quoted(edge.before) << " -> " << quoted(edge.after) << ";\n";
  for (const auto& e : graph.events) {
    if (e.repetition) os << "  " << quoted(e.id) << " -> " << quoted(e.id) << " [dir=both, style=bold];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace fm
