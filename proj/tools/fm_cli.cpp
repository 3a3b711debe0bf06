// fm: command-line front end for the flowthing library.
//
// Exit status: 0 success, 1 diagnostics or library error, 2 usage error,
// 3 I/O error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fm/core.hpp"
#include "fm/dsl.hpp"
#include "fm/events.hpp"
#include "fm/lexicon.hpp"
#include "fm/render.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kUsage = 2;
constexpr int kIoFailure = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    for (std::string part; std::getline(ss, part, ',');) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os || !(os << text)) throw fm::Error(fm::ErrorCode::kIo, "cannot write '" + out_path + "'");
}

// Parses a schema file, printing each parse error to stderr. Returns nullopt
// when the text does not parse.
std::optional<fm::Schema> read_schema(const std::string& path) {
  const std::string text = fm::read_text_file(path);
  if (ends_with(path, ".json")) {
    try {
      return fm::from_json(text);
    } catch (const fm::Error& e) {
      std::cerr << fm::to_string(e.code()) << '\t' << path << '\t' << e.what() << '\n';
      return std::nullopt;
    }
  }
  auto result = fm::parse(text);
  for (const auto& err : result.errors) {
    std::cerr << "E_PARSE\t" << path << ':' << err.span.line << ':' << err.span.column << "\texpected "
              << err.expected << ", found " << err.found << '\n';
  }
  return result.schema;
}

// Parses and validates; diagnostics go to stderr.
std::optional<fm::Schema> read_valid_schema(const std::string& path) {
  auto schema = read_schema(path);
  if (!schema) return std::nullopt;
  auto diags = fm::validate(*schema);
  for (const auto& d : diags) std::cerr << fm::to_string(d.code) << '\t' << d.location << '\t' << d.message << '\n';
  if (!diags.empty()) return std::nullopt;
  return schema;
}

std::string sibling_events(const std::string& schema_path) {
  std::string stem = schema_path;
  if (ends_with(stem, ".fm.json")) {
    stem.resize(stem.size() - 8);
  } else if (ends_with(stem, ".fm")) {
    stem.resize(stem.size() - 3);
  }
  std::ifstream probe(stem + ".events");
  return probe ? stem + ".events" : std::string();
}

fm::Lexicon open_lexicon(const std::string& flag) {
  std::string path = flag;
  if (path.empty()) {
    if (const char* env = std::getenv("FM_LEXICON"); env != nullptr && *env != '\0') path = env;
  }
  if (path.empty()) path = fm::Lexicon::bundled_path();
  return fm::Lexicon::load(path);
}

fm::RoleBinding parse_roles(const std::vector<std::string>& items) {
  fm::RoleBinding out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--roles expects key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

fm::StageSet parse_stage_words(const std::string& text) {
  fm::StageSet out;
  std::stringstream ss(text);
  for (std::string word; ss >> word;) {
    for (auto& c : word) {
      if (c == ',') c = ' ';
    }
    std::stringstream inner(word);
    for (std::string w; inner >> w;) {
      auto stage = fm::parse_stage(w);
      if (!stage) throw UsageError("unknown stage '" + w + "'");
      out.insert(*stage);
    }
  }
  return out;
}

// "all", or a list of machine.Stage items and flow ids.
fm::Region parse_region(const fm::Schema& schema, const std::vector<std::string>& raw) {
  const auto items = split_list(raw);
  if (items.size() == 1 && items[0] == "all") return fm::full_region(schema);
  fm::Region region;
  for (const auto& item : items) {
    const auto dot = item.find('.');
    if (dot == std::string::npos) {
      region.flows.push_back(item);
      continue;
    }
    auto stage = fm::parse_stage(item.substr(dot + 1));
    if (!stage) throw UsageError("unknown stage in '" + item + "'");
    region.stages.push_back(fm::Endpoint{item.substr(0, dot), *stage});
  }
  return region;
}

struct Options {
  std::string path;
  std::string events_path;
  std::string out;
  std::vector<std::string> overlay;
  bool chronology = false;
  bool show_ids = false;
  std::string rankdir = "LR";
  std::string verb;
  std::vector<std::string> roles;
  std::string tense;
  std::string variant;
  bool classify = false;
  std::string lexicon;
  std::string id;
  std::string label;
  std::vector<std::string> region;
  std::string traversed;
  std::string repeat;
  int rep_bound = 1;
  bool json = false;
};

int cmd_validate(const Options& o) {
  return read_valid_schema(o.path) ? kOk : kDiagnostics;
}

int cmd_render(const Options& o) {
  auto schema = read_valid_schema(o.path);
  if (!schema) return kDiagnostics;
  const std::string events_path = o.events_path.empty() ? sibling_events(o.path) : o.events_path;
  const auto overlay = split_list(o.overlay);
  if ((o.chronology || !overlay.empty()) && events_path.empty()) {
    throw UsageError("--chronology and --events need an events file (--event-file or a sibling .events)");
  }
  fm::RenderOptions opts;
  opts.show_ids = o.show_ids;
  opts.rankdir = o.rankdir == "TB" ? fm::RankDir::TopBottom : fm::RankDir::LeftRight;
  if (!o.chronology && overlay.empty()) {
    emit(fm::render_schema(*schema, opts), o.out);
    return kOk;
  }
  const auto graph = fm::load_events_file(events_path, *schema);
  if (o.chronology) {
    emit(fm::render_chronology(graph), o.out);
  } else {
    opts.overlay_events = overlay;
    emit(fm::render_events(*schema, graph, opts), o.out);
  }
  return kOk;
}

int cmd_verb(const Options& o) {
  const auto lexicon = open_lexicon(o.lexicon);
  const auto& entry = lexicon.entry(o.verb);
  const auto& tmpl = lexicon.find_template(entry.verb_class.name, o.variant);
  fm::RoleBinding binding;
  if (o.roles.empty()) {
    // The template's own example, with ${verb} standing for the lemma.
    for (auto [role, value] : tmpl.defaults) {
      for (auto at = value.find("${verb}"); at != std::string::npos; at = value.find("${verb}")) {
        value.replace(at, 7, o.verb);
      }
      binding[role] = value;
    }
  } else {
    binding = parse_roles(o.roles);
  }
  if (tmpl.ungrammatical) std::cerr << "note: " << tmpl.class_name << " variant '" << tmpl.variant
                                     << "' is ungrammatical English\n";
  const fm::Schema schema = tmpl.instantiate(binding);

  std::optional<fm::Tense> tense;
  if (!o.tense.empty()) {
    tense = fm::parse_tense(o.tense);
    if (!tense) throw UsageError("unknown tense '" + o.tense + "'");
  }
  if (!tense && !o.classify) {
    emit(fm::print(schema), o.out);
    return kOk;
  }
  // A bare verb is classified by its -ing form.
  const auto structure =
      fm::apply_tense(schema, fm::full_region(schema), tense.value_or(fm::Tense::PresentProgressive), "agent");
  std::string text = fm::print(tense ? structure.schema : schema);
  if (tense) text += fm::print_events(structure.graph);
  if (o.classify) {
    auto category = fm::classify_vendler(structure.graph);
    text += category ? std::string(fm::to_string(*category)) : std::string("E_UNCLASSIFIED");
    text += '\n';
  }
  emit(text, o.out);
  return kOk;
}

int cmd_eventize(const Options& o) {
  auto schema = read_valid_schema(o.path);
  if (!schema) return kDiagnostics;
  const auto region = parse_region(*schema, o.region);
  const auto time = fm::TimeMachine::make(fm::TimeMachine::kStandardStages, parse_stage_words(o.traversed));
  std::optional<fm::Repetition> repetition;
  if (o.repeat == "ongoing") {
    repetition = fm::Repetition::ongoing();
  } else if (!o.repeat.empty()) {
    int n = 0;
    try {
      n = std::stoi(o.repeat);
    } catch (const std::exception&) {
      throw UsageError("--repeat expects a positive count or 'ongoing'");
    }
    if (n < 1) throw UsageError("--repeat expects a positive count or 'ongoing'");
    repetition = fm::Repetition::times(n);
  }
  fm::Event e = fm::eventize(*schema, o.id, region, time, repetition);
  e.label = o.label;
  emit(fm::print_events(fm::build_chronology({e}, {}, {})), o.out);
  return kOk;
}

int cmd_simulate(const Options& o) {
  auto schema = read_valid_schema(o.path);
  if (!schema) return kDiagnostics;
  if (o.rep_bound < 1) throw UsageError("--rep-bound must be positive");
  const auto graph = fm::load_events_file(o.events_path, *schema);
  emit(fm::format_trace(fm::simulate(graph, *schema, o.rep_bound)), o.out);
  return kOk;
}

int cmd_fmt(const Options& o) {
  auto schema = read_valid_schema(o.path);
  if (!schema) return kDiagnostics;
  emit(o.json ? fm::to_json(*schema) + "\n" : fm::print(*schema), o.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flowthing machine schemas: validate, render, eventize, simulate, and build verb models."};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check a schema; diagnostics go to stderr");
  validate->add_option("path", o.path, "Schema (.fm or .fm.json)")->required();

  auto* render = app.add_subcommand("render", "Emit DOT for a schema, its events, or its chronology");
  render->add_option("path", o.path, "Schema (.fm or .fm.json)")->required();
  render->add_option("--events", o.overlay, "Event ids to overlay (comma separated)");
  render->add_option("--event-file", o.events_path, "Events file (default: sibling <stem>.events)");
  render->add_flag("--chronology", o.chronology, "Render the chronology graph instead");
  render->add_flag("--show-ids", o.show_ids, "Label nodes and edges with their ids");
  render->add_option("--rankdir", o.rankdir, "LR or TB")->check(CLI::IsMember({"LR", "TB"}));
  render->add_option("-o,--output", o.out, "Write to a file instead of stdout");

  auto* verb = app.add_subcommand("verb", "Instantiate the FM schema of a verb");
  verb->add_option("verb", o.verb, "Verb lemma")->required();
  verb->add_option("--roles", o.roles, "role=label pairs (default: the template's example)");
  verb->add_option("--tense", o.tense, "Tense, e.g. PresentProgressive");
  verb->add_option("--variant", o.variant, "Template variant, e.g. 'to' or 'against' for Advice");
  verb->add_flag("--classify", o.classify, "Print the Vendler category");
  verb->add_option("--lexicon", o.lexicon, "Lexicon TSV (default: $FM_LEXICON, then the bundled one)");
  verb->add_option("-o,--output", o.out, "Write to a file instead of stdout");

  auto* eventize = app.add_subcommand("eventize", "Carve an event out of a schema");
  eventize->add_option("path", o.path, "Schema (.fm or .fm.json)")->required();
  eventize->add_option("--id", o.id, "Event id")->required();
  eventize->add_option("--label", o.label, "Event label");
  eventize->add_option("--region", o.region, "'all', or machine.Stage items and flow ids")->required();
  eventize->add_option("--traversed", o.traversed, "Time stages already passed, e.g. 'Process Release Transfer'");
  eventize->add_option("--repeat", o.repeat, "Repetition count or 'ongoing'");
  eventize->add_option("-o,--output", o.out, "Write to a file instead of stdout");

  auto* simulate = app.add_subcommand("simulate", "Print the deterministic trace of an event graph");
  simulate->add_option("schema", o.path, "Schema (.fm or .fm.json)")->required();
  simulate->add_option("events", o.events_path, "Events file")->required();
  simulate->add_option("--rep-bound", o.rep_bound, "Occurrences of ongoing repetitions");
  simulate->add_option("-o,--output", o.out, "Write to a file instead of stdout");

  auto* fmt = app.add_subcommand("fmt", "Reprint a schema canonically");
  fmt->add_option("path", o.path, "Schema (.fm or .fm.json)")->required();
  fmt->add_flag("--json", o.json, "Emit the JSON interchange form");
  fmt->add_option("-o,--output", o.out, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(o);
    if (render->parsed()) return cmd_render(o);
    if (verb->parsed()) return cmd_verb(o);
    if (eventize->parsed()) return cmd_eventize(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (fmt->parsed()) return cmd_fmt(o);
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const fm::Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == fm::ErrorCode::kIo ? kIoFailure : kDiagnostics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiagnostics;
  }
  return kUsage;
}
