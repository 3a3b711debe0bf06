#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fm/core.hpp"
#include "fm/events.hpp"

namespace fm {

// A verb class plus the dynamic/stative tag of the looked-up verb
// (Activity, Process, Sensation, Momentary, Cognition, Perception,
// Relational). `name` is empty for verbs that carry only the tag.
struct VerbClass {
  std::string name;
  std::string dynamic_stative;

  friend bool operator==(const VerbClass&, const VerbClass&) = default;
};

enum class VendlerCategory { Activity, Accomplishment, Achievement, State };

std::string_view to_string(VendlerCategory category);
std::optional<VendlerCategory> parse_vendler(std::string_view name);

enum class Tense {
  SimplePresent,
  SimplePast,
  SimpleFuture,
  PresentProgressive,
  PastProgressive,
  FutureProgressive,
  PresentPerfect,
  PastPerfect,
  FuturePerfect,
};

inline constexpr std::array<Tense, 9> kAllTenses = {
    Tense::SimplePresent,      Tense::SimplePast,      Tense::SimpleFuture,
    Tense::PresentProgressive, Tense::PastProgressive, Tense::FutureProgressive,
    Tense::PresentPerfect,     Tense::PastPerfect,     Tense::FuturePerfect};

std::string_view to_string(Tense tense);
std::optional<Tense> parse_tense(std::string_view name);
bool is_progressive(Tense tense);
bool is_perfect(Tense tense);

// role -> label, e.g. agent -> "Nora".
using RoleBinding = std::map<std::string, std::string>;

// An FM fragment for one verb class (or one variant of it). The fragment is
// DSL text whose labels hold ${role} placeholders.
struct VerbTemplate {
  std::string class_name;
  std::string variant;  // empty for the class default
  std::string gloss;    // example sentence
  bool ungrammatical = false;
  std::vector<std::string> roles;
  RoleBinding defaults;  // values may use ${verb}
  std::vector<std::string> theme_machines;
  std::vector<StageKind> signature;
  std::string fragment;

  // Throws Error{kBinding} unless the binding covers exactly `roles`.
  Schema instantiate(const RoleBinding& binding) const;
};

struct LexiconEntry {
  std::string verb;
  VerbClass verb_class;
  std::optional<VendlerCategory> vendler_default;
};

// Verb table plus class templates. Immutable once loaded.
class Lexicon {
 public:
  // TSV columns: verb, class, dynamic_stative, vendler_default ("-" for
  // none). Templates are every *.fm file in templates_dir. Each template is
  // checked on load: its default instantiation must validate and its theme
  // walk must equal its declared signature. Throws Error{kLexicon} or
  // Error{kIo}.
  static Lexicon load(const std::string& tsv_path, const std::string& templates_dir);

  // Templates from the "templates" directory beside the TSV.
  static Lexicon load(const std::string& tsv_path);

  // The bundled seed lexicon.
  static std::string bundled_path();

  // Throws Error{kUnknownVerb}.
  VerbClass lookup(std::string_view verb) const;
  const LexiconEntry& entry(std::string_view verb) const;

  // Throws Error{kNoTemplate} for an unknown class or variant.
  const VerbTemplate& find_template(std::string_view class_name, std::string_view variant = {}) const;
  std::vector<StageKind> signature(std::string_view class_name) const;
  Schema instantiate(std::string_view class_name, const RoleBinding& binding,
                     std::string_view variant = {}) const;

  // Template defaults with ${verb} replaced by the lemma.
  RoleBinding default_binding(std::string_view verb) const;

  std::vector<std::string> class_names() const;
  std::vector<const VerbTemplate*> templates() const;
  const std::vector<LexiconEntry>& entries() const { return entries_; }

 private:
  std::vector<LexiconEntry> entries_;
  std::vector<VerbTemplate> templates_;
};

// Operational sequence of one event spanning the given machines (their
// stages and the flows between them).
std::vector<StageKind> theme_walk(const Schema& schema, const std::vector<std::string>& machines);

struct TenseStructure {
  Schema schema;           // input schema, plus a "Have" sphere for perfects
  EventGraph graph;
  std::string main_event;  // the whole event; the inner event for perfects
};

// Event ids used by apply_tense.
inline constexpr std::string_view kMainEventId = "event";
inline constexpr std::string_view kStepEventId = "step";
inline constexpr std::string_view kNowEventId = "now";
inline constexpr std::string_view kHaveEventId = "have";

// Encodes a tense as time-machine configurations:
//   simple present   event at Now (time processed, not released)
//   simple past      event with time released and transferred
//   simple future    Now marker, then an event whose time has not started
//   progressive      whole event that is never complete (at Now; not yet
//                    started for the future) plus an ongoing repeated step
//                    sub-event; past puts a Now marker after it, future
//                    puts one before it
//   perfect          a finished inner event owned by a "Have" event, with a
//                    "Have" sphere under the agent sphere holding the event
//                    and time machines; the Have event's time sits at
//                    present, past, or future
// Throws Error{kRegion} as eventize does, or when the agent sphere is
// missing for a perfect tense; Error{kInvalid} for an invalid schema.
TenseStructure apply_tense(const Schema& schema, Region region, Tense tense,
                           std::string_view agent_sphere);

// Accomplishment: some repeated event feeds a finished, unrepeated event
// that creates something (reached by chronology edges or as an enclosing
// event). Activity: repetition without such a terminal point. Otherwise
// nullopt (the unclassified outcome).
std::optional<VendlerCategory> classify_vendler(const EventGraph& graph);

}  // namespace fm
