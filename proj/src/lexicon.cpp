#include "fm/lexicon.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "fm/dsl.hpp"

#ifndef FM_DATA_DIR
#define FM_DATA_DIR "data"
#endif

namespace fm {

namespace {

const std::set<std::string, std::less<>> kDynamicStativeTags = {
    "Activity", "Process", "Sensation", "Momentary", "Cognition", "Perception", "Relational"};

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto at = line.find(sep, start);
    out.emplace_back(line.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream is{std::string(text)};
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Escaped for placement between the quotes of a DSL label.
std::string escape_label(std::string_view value) {
  std::string out;
  for (char c : value) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string substitute(std::string_view text, const RoleBinding& values, bool escape) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find("${", pos);
    if (open == std::string_view::npos) break;
    auto close = text.find('}', open + 2);
    if (close == std::string_view::npos) break;
    out.append(text.substr(pos, open - pos));
    const std::string key(text.substr(open + 2, close - open - 2));
    auto it = values.find(key);
    if (it == values.end()) throw Error(ErrorCode::kLexicon, "unbound placeholder ${" + key + "}");
    out += escape ? escape_label(it->second) : it->second;
    pos = close + 1;
  }
  out.append(text.substr(pos));
  return out;
}

VerbTemplate parse_template(const std::string& path) {
  const std::string text = read_text_file(path);
  VerbTemplate t;
  std::istringstream lines(text);
  std::ostringstream body;
  auto fail = [&](const std::string& why) { throw Error(ErrorCode::kLexicon, path + ": " + why); };
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("#!", 0) != 0) {
      body << line << '\n';
      continue;
    }
    auto w = words(std::string_view(line).substr(2));
    if (w.empty()) continue;
    const std::string key = w.front();
    w.erase(w.begin());
    if (key == "class" && w.size() == 1) {
      t.class_name = w[0];
    } else if (key == "variant" && w.size() == 1) {
      t.variant = w[0];
    } else if (key == "gloss") {
      t.gloss = trim(std::string_view(line).substr(line.find("gloss") + 5));
    } else if (key == "ungrammatical" && w.empty()) {
      t.ungrammatical = true;
    } else if (key == "roles" && !w.empty()) {
      t.roles = w;
    } else if (key == "default" && w.size() >= 2) {
      const auto at = line.find(w[0], line.find("default") + 7);
      t.defaults[w[0]] = trim(std::string_view(line).substr(at + w[0].size()));
    } else if (key == "theme" && !w.empty()) {
      t.theme_machines = w;
    } else if (key == "signature" && !w.empty()) {
      for (const auto& s : w) {
        auto stage = parse_stage(s);
        if (!stage) fail("unknown stage '" + s + "' in signature");
        t.signature.push_back(*stage);
      }
    } else {
      fail("bad directive '" + line + "'");
    }
  }
  t.fragment = body.str();
  if (t.class_name.empty()) fail("missing '#! class'");
  if (t.roles.empty()) fail("missing '#! roles'");
  if (t.theme_machines.empty()) fail("missing '#! theme'");
  if (t.signature.empty()) fail("missing '#! signature'");
  for (const auto& r : t.roles) {
    if (!t.defaults.count(r)) fail("role '" + r + "' has no default");
  }
  return t;
}

}  // namespace

std::string_view to_string(VendlerCategory category) {
  switch (category) {
    case VendlerCategory::Activity: return "Activity";
    case VendlerCategory::Accomplishment: return "Accomplishment";
    case VendlerCategory::Achievement: return "Achievement";
    case VendlerCategory::State: return "State";
  }
  return "?";
}

std::optional<VendlerCategory> parse_vendler(std::string_view name) {
  for (auto c : {VendlerCategory::Activity, VendlerCategory::Accomplishment, VendlerCategory::Achievement,
                 VendlerCategory::State}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

Schema VerbTemplate::instantiate(const RoleBinding& binding) const {
  for (const auto& r : roles) {
    if (!binding.count(r)) throw Error(ErrorCode::kBinding, class_name + " needs role '" + r + "'");
  }
  for (const auto& [role, value] : binding) {
    if (std::find(roles.begin(), roles.end(), role) == roles.end()) {
      throw Error(ErrorCode::kBinding, class_name + " has no role '" + role + "'");
    }
  }
  auto result = parse(substitute(fragment, binding, /*escape=*/true));
  if (!result.ok()) {
    throw Error(ErrorCode::kLexicon, class_name + " template does not parse: " + result.errors.front().message());
  }
  return canonicalize(*result.schema);
}

std::vector<StageKind> theme_walk(const Schema& schema, const std::vector<std::string>& machines) {
  Event e = eventize(schema, "theme", machines_region(schema, machines), TimeMachine::now());
  auto graph = build_chronology({e}, {}, {});
  std::vector<StageKind> out;
  for (const auto& step : operational_sequence(simulate(graph, schema, 1), "theme")) out.push_back(step.stage);
  return out;
}

Lexicon Lexicon::load(const std::string& tsv_path, const std::string& templates_dir) {
  Lexicon lex;
  namespace fs = std::filesystem;

  std::error_code ec;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(templates_dir, ec)) {
    if (entry.path().extension() == ".fm") files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::kIo, "cannot list templates in '" + templates_dir + "'");
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    VerbTemplate t = parse_template(f.string());
    RoleBinding probe;
    for (const auto& [role, value] : t.defaults) probe[role] = substitute(value, {{"verb", "verb"}}, false);
    Schema s;
    try {
      s = t.instantiate(probe);
    } catch (const Error& e) {
      throw Error(ErrorCode::kLexicon, f.string() + ": " + e.what());
    }
    if (theme_walk(s, t.theme_machines) != t.signature) {
      throw Error(ErrorCode::kLexicon, f.string() + ": theme walk does not match the declared signature");
    }
    for (const auto& other : lex.templates_) {
      if (other.class_name == t.class_name && other.variant == t.variant) {
        throw Error(ErrorCode::kLexicon, f.string() + ": duplicate template for " + t.class_name);
      }
    }
    lex.templates_.push_back(std::move(t));
  }

  const std::string text = read_text_file(tsv_path);
  std::istringstream lines(text);
  int lineno = 0;
  std::set<std::string, std::less<>> seen;
  for (std::string line; std::getline(lines, line);) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::kLexicon, tsv_path + ":" + std::to_string(lineno) + ": " + why);
    };
    if (cols.size() != 4) fail("expected 4 tab-separated columns");
    if (lineno == 1 && cols[0] == "verb") continue;  // header
    LexiconEntry e;
    e.verb = cols[0];
    if (e.verb.empty()) fail("empty verb");
    if (!seen.insert(e.verb).second) fail("duplicate verb '" + e.verb + "'");
    if (cols[1] != "-") {
      e.verb_class.name = cols[1];
      const bool known = std::any_of(lex.templates_.begin(), lex.templates_.end(),
                                     [&](const VerbTemplate& t) { return t.class_name == cols[1]; });
      if (!known) fail("class '" + cols[1] + "' has no template");
    }
    if (!kDynamicStativeTags.count(cols[2])) fail("unknown dynamic/stative tag '" + cols[2] + "'");
    e.verb_class.dynamic_stative = cols[2];
    if (cols[3] != "-") {
      e.vendler_default = parse_vendler(cols[3]);
      if (!e.vendler_default) fail("unknown Vendler category '" + cols[3] + "'");
    }
    lex.entries_.push_back(std::move(e));
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& tsv_path) {
  const auto dir = std::filesystem::path(tsv_path).parent_path() / "templates";
  return load(tsv_path, dir.string());
}

std::string Lexicon::bundled_path() { return std::string(FM_DATA_DIR) + "/lexicon.tsv"; }

const LexiconEntry& Lexicon::entry(std::string_view verb) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const LexiconEntry& e) { return e.verb == verb; });
  if (it == entries_.end()) throw Error(ErrorCode::kUnknownVerb, "'" + std::string(verb) + "' is not in the lexicon");
  return *it;
}

VerbClass Lexicon::lookup(std::string_view verb) const { return entry(verb).verb_class; }

const VerbTemplate& Lexicon::find_template(std::string_view class_name, std::string_view variant) const {
  for (const auto& t : templates_) {
    if (t.class_name == class_name && t.variant == variant) return t;
  }
  std::string what = class_name.empty() ? "verb has no class" : "no template for " + std::string(class_name);
  if (!variant.empty()) what += " variant " + std::string(variant);
  throw Error(ErrorCode::kNoTemplate, what);
}

std::vector<StageKind> Lexicon::signature(std::string_view class_name) const {
  return find_template(class_name).signature;
}

Schema Lexicon::instantiate(std::string_view class_name, const RoleBinding& binding,
                           std::string_view variant) const {
  return find_template(class_name, variant).instantiate(binding);
}

RoleBinding Lexicon::default_binding(std::string_view verb) const {
  const auto& t = find_template(lookup(verb).name);
  RoleBinding out;
  for (const auto& [role, value] : t.defaults) out[role] = substitute(value, {{"verb", std::string(verb)}}, false);
  return out;
}

std::vector<std::string> Lexicon::class_names() const {
  std::vector<std::string> out;
  for (const auto& t : templates_) {
    if (std::find(out.begin(), out.end(), t.class_name) == out.end()) out.push_back(t.class_name);
  }
  return out;
}

std::vector<const VerbTemplate*> Lexicon::templates() const {
  std::vector<const VerbTemplate*> out;
  for (const auto& t : templates_) out.push_back(&t);
  return out;
}

}  // namespace fm
