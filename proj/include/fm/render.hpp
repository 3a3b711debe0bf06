#pragma once

#include <string>
#include <vector>

#include "fm/core.hpp"
#include "fm/events.hpp"

namespace fm {

enum class RankDir { LeftRight, TopBottom };

struct RenderOptions {
  bool show_ids = false;
  std::vector<std::string> overlay_events;
  RankDir rankdir = RankDir::LeftRight;
};

// DOT with one cluster per sphere (nested as the spheres nest), one node per
// machine stage, solid edges for flows and dashed edges for triggers.
// Throws Error{kInvalid} if the schema does not validate.
std::string render_schema(const Schema& schema, const RenderOptions& opts = {});

// render_schema plus a bold labeled cluster per overlaid event, listing the
// stages in its region. Throws Error{kRegion} for an unknown overlay id or a
// region that does not fit the schema.
std::string render_events(const Schema& schema, const EventGraph& events, const RenderOptions& opts);

// One node per event, one edge per chronology edge; repeated events carry a
// repeat marker and a double-headed self loop.
std::string render_chronology(const EventGraph& graph);

}  // namespace fm
