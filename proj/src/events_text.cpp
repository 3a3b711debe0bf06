#include <sstream>

#include "fm/events.hpp"
#include "lexer.hpp"

namespace fm {

namespace {

using detail::Bail;
using detail::Resync;
using detail::Tok;
using detail::Token;

class EventsParser : public detail::ParserBase {
 public:
  using ParserBase::ParserBase;

  EventsParseResult run() {
    try {
      if (at_word("events")) {
        advance();
        guarded([&] { expect(Tok::LBrace, "'{'"); });
        statements();
        guarded([&] { expect(Tok::RBrace, "'}'"); });
      } else {
        statements();
      }
      if (!at(Tok::End)) error("end of input");
    } catch (const Bail&) {
    }
    EventsParseResult result;
    result.errors = take_errors();
    if (result.errors.empty()) result.document = std::move(doc_);
    return result;
  }

 private:
  template <typename F>
  void guarded(F&& f) {
    try {
      f();
    } catch (const Resync&) {
    }
  }

  void statements() {
    while (!at(Tok::RBrace) && !at(Tok::End)) {
      const auto before = position();
      try {
        if (at_word("event")) {
          event();
        } else if (at_word("order")) {
          order();
        } else {
          error("'event' or 'order'");
          throw Resync{};
        }
      } catch (const Resync&) {
        synchronize({"event", "order"});
        if (position() == before && !at(Tok::RBrace) && !at(Tok::End)) advance();
      }
    }
  }

  std::string event_id() {
    if (at(Tok::Ident) || at(Tok::Number)) return advance().text;
    error("event id");
    throw Resync{};
  }

  void order() {
    advance();
    std::string first = event_id();
    expect(Tok::Arrow, "'->'");
    std::string second = event_id();
    doc_.order.push_back(ChronologyEdge{first, second});
    // Chains: order 1 -> 2 -> 3;
    while (at(Tok::Arrow)) {
      advance();
      first = std::move(second);
      second = event_id();
      doc_.order.push_back(ChronologyEdge{first, second});
    }
    expect(Tok::Semi, "';'");
  }

  void event() {
    advance();
    EventDecl d;
    d.id = event_id();
    if (at(Tok::String)) d.label = advance().text;
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) {
        error("'}'");
        throw Resync{};
      }
      try {
        clause(d);
      } catch (const Resync&) {
        synchronize({"region", "time", "stages", "repeat", "within", "duration"});
      }
    }
    advance();
    doc_.events.push_back(std::move(d));
  }

  void clause(EventDecl& d) {
    if (at_word("region")) {
      advance();
      expect(Tok::LBracket, "'['");
      while (!at(Tok::RBracket)) {
        std::string id = expect_ident("stage reference or flow id");
        if (at(Tok::Dot)) {
          advance();
          d.region.stages.push_back(Endpoint{std::move(id), expect_stage()});
        } else {
          d.region.flows.push_back(std::move(id));
        }
      }
      advance();
    } else if (at_word("time")) {
      advance();
      d.time_stages = stage_list();
      if (at_word("traversed")) {
        advance();
        d.traversed = stage_list();
      }
    } else if (at_word("stages")) {
      advance();
      d.event_stages = stage_list();
    } else if (at_word("repeat")) {
      advance();
      if (at_word("ongoing")) {
        advance();
        d.repetition = Repetition::ongoing();
      } else {
        Token n = expect(Tok::Number, "repeat count or 'ongoing'");
        int count = 0;
        for (char c : n.text) {
          if (c < '0' || c > '9' || count > 1'000'000) {
            count = 0;
            break;
          }
          count = count * 10 + (c - '0');
        }
        if (count < 1) {
          error("positive repeat count");
          throw Resync{};
        }
        d.repetition = Repetition::times(count);
      }
    } else if (at_word("within")) {
      advance();
      d.within = event_id();
    } else if (at_word("duration")) {
      advance();
      d.duration = expect(Tok::String, "duration label").text;
    } else {
      error("'region', 'time', 'stages', 'repeat', 'within' or 'duration'");
      throw Resync{};
    }
    expect(Tok::Semi, "';'");
  }

  EventsDocument doc_;
};

std::string stage_list_text(StageSet stages) {
  std::string out = "[";
  bool first = true;
  for (auto s : stages.members()) {
    if (!first) out += ' ';
    out += to_string(s);
    first = false;
  }
  return out + "]";
}

}  // namespace

EventsParseResult parse_events(std::string_view text) { return EventsParser(text).run(); }

EventGraph resolve_events(const Schema& schema, const EventsDocument& doc) {
  std::vector<Event> events;
  std::map<std::string, std::string> parents;
  for (const auto& d : doc.events) {
    Event e = eventize(schema, d.id, d.region, TimeMachine::make(d.time_stages, d.traversed),
                       d.repetition, d.event_stages);
    e.label = d.label;
    e.duration = d.duration;
    events.push_back(std::move(e));
    if (d.within) parents[d.id] = *d.within;
  }
  return build_chronology(std::move(events), doc.order, std::move(parents));
}

std::string print_events(const EventGraph& graph) {
  std::ostringstream os;
  if (graph.events.empty() && graph.edges.empty()) return "events {}\n";
  os << "events {\n";
  for (const auto& e : graph.events) {
    os << "  event " << e.id;
    if (!e.label.empty()) os << ' ' << detail::quote_label(e.label);
    os << " {\n    region [";
    bool first = true;
    for (const auto& s : e.region.stages) {
      os << (first ? "" : " ") << s.machine << '.' << to_string(s.stage);
      first = false;
    }
    for (const auto& f : e.region.flows) {
      os << (first ? "" : " ") << f;
      first = false;
    }
    os << "];\n";
    os << "    time " << stage_list_text(e.time.stages_present()) << " traversed "
       << stage_list_text(e.time.traversed()) << ";\n";
    os << "    stages " << stage_list_text(e.event_stages) << ";\n";
    if (e.repetition) {
      os << "    repeat ";
      if (e.repetition->is_ongoing()) {
        os << "ongoing";
      } else {
        os << e.repetition->count();
      }
      os << ";\n";
    }
    if (auto it = graph.sub_event_of.find(e.id); it != graph.sub_event_of.end()) {
      os << "    within " << it->second << ";\n";
    }
    if (!e.duration.empty()) os << "    duration " << detail::quote_label(e.duration) << ";\n";
    os << "  }\n";
  }
  for (const auto& edge : graph.edges) os << "  order " << edge.before << " -> " << edge.after << ";\n";
  os << "}\n";
  return os.str();
}

EventGraph load_events_file(const std::string& path, const Schema& schema) {
  auto result = parse_events(read_text_file(path));
  if (!result.ok()) {
    std::string msg = path;
    for (const auto& e : result.errors) msg += "\n  " + e.message();
    throw Error(ErrorCode::kParse, msg);
  }
  return resolve_events(schema, *result.document);
}

}  // namespace fm
