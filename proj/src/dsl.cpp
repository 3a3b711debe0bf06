#include "fm/dsl.hpp"

#include <fstream>
#include <sstream>

#include "lexer.hpp"

namespace fm {

std::string ParseError::message() const {
  std::ostringstream os;
  os << span.line << ":" << span.column << ": expected " << expected << ", found " << found;
  return os.str();
}

namespace {

using detail::Bail;
using detail::Resync;
using detail::Tok;

class SchemaParser : public detail::ParserBase {
 public:
  using ParserBase::ParserBase;

  ParseResult run() {
    try {
      if (at_word("schema")) {
        advance();
        guarded([&] { expect(Tok::LBrace, "'{'"); });
        items(std::nullopt, 0);
        guarded([&] { expect(Tok::RBrace, "'}'"); });
      } else {
        items(std::nullopt, 0);
      }
      if (!at(Tok::End)) error("end of input");
    } catch (const Bail&) {
    }
    ParseResult result;
    result.errors = take_errors();
    if (result.errors.empty()) result.schema = std::move(out_);
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

  // Statements until '}' or end of input. Top level (no parent) holds
  // spheres, flows and triggers; sphere bodies hold spheres and machines.
  void items(const std::optional<std::string>& parent, int depth) {
    while (!at(Tok::RBrace) && !at(Tok::End)) {
      const auto before = position();
      try {
        statement(parent, depth);
      } catch (const Resync&) {
        synchronize({"sphere", "machine", "flow", "trigger"});
        if (position() == before && !at(Tok::RBrace) && !at(Tok::End)) advance();
      }
    }
  }

  void statement(const std::optional<std::string>& parent, int depth) {
    if (at_word("sphere")) return sphere(parent, depth);
    if (parent && at_word("machine")) return machine(*parent);
    if (!parent && at_word("flow")) return link(/*trigger=*/false);
    if (!parent && at_word("trigger")) return link(/*trigger=*/true);
    error(parent ? "'sphere' or 'machine'" : "'sphere', 'flow' or 'trigger'");
    throw Resync{};
  }

  void sphere(const std::optional<std::string>& parent, int depth) {
    advance();
    Sphere s;
    s.id = expect_ident("sphere id");
    s.label = at(Tok::String) ? advance().text : s.id;
    s.parent = parent;
    expect(Tok::LBrace, "'{'");
    if (depth + 1 >= kMaxDepth) {
      error("sphere nesting shallower than " + std::to_string(kMaxDepth));
      throw Bail{};
    }
    const std::string id = s.id;
    out_.spheres.push_back(std::move(s));
    items(id, depth + 1);
    expect(Tok::RBrace, "'}'");
  }

  void machine(const std::string& sphere) {
    advance();
    Machine m;
    m.id = expect_ident("machine id");
    m.sphere = sphere;
    m.thing = m.id;
    if (at_word("thing")) {
      advance();
      m.thing = expect(Tok::String, "thing label").text;
    }
    expect_word("stages");
    m.stages = stage_list();
    if (at(Tok::Semi)) advance();
    out_.machines.push_back(std::move(m));
  }

  Endpoint endpoint() {
    Endpoint e;
    e.machine = expect_ident("machine id");
    expect(Tok::Dot, "'.'");
    e.stage = expect_stage();
    return e;
  }

  void link(bool trigger) {
    advance();
    std::string id = expect_ident(trigger ? "trigger id" : "flow id");
    expect(Tok::Colon, "':'");
    Endpoint from = endpoint();
    if (trigger) {
      expect(Tok::Squiggle, "'~>'");
    } else {
      expect(Tok::Arrow, "'->'");
    }
    Endpoint to = endpoint();
    expect(Tok::Semi, "';'");
    if (trigger) {
      out_.triggers.push_back(Trigger{std::move(id), std::move(from), std::move(to)});
    } else {
      out_.flows.push_back(Flow{std::move(id), std::move(from), std::move(to)});
    }
  }

  Schema out_;
};

std::string endpoint_text(const Endpoint& e) {
  return e.machine + "." + std::string(to_string(e.stage));
}

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

void print_sphere(std::ostream& os, const Schema& s, const Sphere& sphere, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  os << pad << "sphere " << sphere.id << " " << detail::quote_label(sphere.label) << " {\n";
  for (const auto& mid : s.machines_in(sphere.id)) {
    const Machine& m = *s.find_machine(mid);
    os << pad << "  machine " << m.id << " thing " << detail::quote_label(m.thing) << " stages "
       << stage_list_text(m.stages) << "\n";
  }
  for (const auto& cid : s.children_of(sphere.id)) print_sphere(os, s, *s.find_sphere(cid), indent + 1);
  os << pad << "}\n";
}

}  // namespace

ParseResult parse(std::string_view text) { return SchemaParser(text).run(); }

std::string print(const Schema& schema) {
  const Schema s = canonicalize(schema);
  if (s.spheres.empty() && s.flows.empty() && s.triggers.empty()) return "schema {}\n";

  std::ostringstream os;
  os << "schema {\n";
  for (const auto& sphere : s.spheres) {
    if (!sphere.parent) print_sphere(os, s, sphere, 1);
  }
  for (const auto& f : s.flows) {
    os << "  flow " << f.id << ": " << endpoint_text(f.from) << " -> " << endpoint_text(f.to) << ";\n";
  }
  for (const auto& t : s.triggers) {
    os << "  trigger " << t.id << ": " << endpoint_text(t.from) << " ~> " << endpoint_text(t.to)
       << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read '" + path + "'");
  return ss.str();
}

Schema load_schema_file(const std::string& path) {
  const std::string text = read_text_file(path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) return from_json(text);
  auto result = parse(text);
  if (!result.ok()) {
    std::string msg = path;
    for (const auto& e : result.errors) msg += "\n  " + e.message();
    throw Error(ErrorCode::kParse, msg);
  }
  return std::move(*result.schema);
}

}  // namespace fm
