#include "fm/core.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace fm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalid: return "E_INVALID";
    case ErrorCode::kJson: return "E_JSON";
    case ErrorCode::kVersion: return "E_VERSION";
    case ErrorCode::kRegion: return "E_REGION";
    case ErrorCode::kTime: return "E_TIME";
    case ErrorCode::kCycle: return "E_CYCLE";
    case ErrorCode::kSubRegion: return "E_SUBREGION";
    case ErrorCode::kGraph: return "E_GRAPH";
    case ErrorCode::kNoEvent: return "E_NOEVENT";
    case ErrorCode::kUnknownVerb: return "E_UNKNOWN_VERB";
    case ErrorCode::kBinding: return "E_BINDING";
    case ErrorCode::kNoTemplate: return "E_NO_TEMPLATE";
    case ErrorCode::kLexicon: return "E_LEXICON";
    case ErrorCode::kParse: return "E_PARSE";
    case ErrorCode::kIo: return "E_IO";
  }
  return "E_UNKNOWN";
}

std::string_view to_string(StageKind stage) {
  switch (stage) {
    case StageKind::Create: return "Create";
    case StageKind::Receive: return "Receive";
    case StageKind::Process: return "Process";
    case StageKind::Release: return "Release";
    case StageKind::Transfer: return "Transfer";
  }
  return "?";
}

std::optional<StageKind> parse_stage(std::string_view name) {
  for (auto s : kAllStages) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

int StageSet::size() const {
  int n = 0;
  for (auto s : kAllStages) n += contains(s) ? 1 : 0;
  return n;
}

std::vector<StageKind> StageSet::members() const {
  std::vector<StageKind> out;
  for (auto s : kAllStages) {
    if (contains(s)) out.push_back(s);
  }
  return out;
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

int natural_compare(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      // Strip leading zeros, then compare by length and digits.
      std::size_t is = i, js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      const auto da = a.substr(is, ie - is);
      const auto db = b.substr(js, je - js);
      if (da.size() != db.size()) return da.size() < db.size() ? -1 : 1;
      if (int c = da.compare(db); c != 0) return c < 0 ? -1 : 1;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) {
      return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]) ? -1 : 1;
    }
    ++i;
    ++j;
  }
  if (i < a.size()) return 1;
  if (j < b.size()) return -1;
  return 0;
}

}  // namespace

bool id_less(std::string_view a, std::string_view b) {
  if (int c = natural_compare(a, b); c != 0) return c < 0;
  return a < b;
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(), [&](char c) { return alpha(c) || is_digit(c); });
}

bool endpoint_less(const Endpoint& a, const Endpoint& b) {
  if (a.machine != b.machine) return id_less(a.machine, b.machine);
  return a.stage < b.stage;
}

const Sphere* Schema::find_sphere(std::string_view id) const {
  auto it = std::find_if(spheres.begin(), spheres.end(), [&](const Sphere& s) { return s.id == id; });
  return it == spheres.end() ? nullptr : &*it;
}

const Machine* Schema::find_machine(std::string_view id) const {
  auto it = std::find_if(machines.begin(), machines.end(), [&](const Machine& m) { return m.id == id; });
  return it == machines.end() ? nullptr : &*it;
}

const Flow* Schema::find_flow(std::string_view id) const {
  auto it = std::find_if(flows.begin(), flows.end(), [&](const Flow& f) { return f.id == id; });
  return it == flows.end() ? nullptr : &*it;
}

std::vector<std::string> Schema::children_of(std::string_view sphere_id) const {
  std::vector<std::string> out;
  for (const auto& s : spheres) {
    if (s.parent && *s.parent == sphere_id) out.push_back(s.id);
  }
  std::sort(out.begin(), out.end(), id_less);
  return out;
}

std::vector<std::string> Schema::machines_in(std::string_view sphere_id) const {
  std::vector<std::string> out;
  for (const auto& m : machines) {
    if (m.sphere == sphere_id) out.push_back(m.id);
  }
  std::sort(out.begin(), out.end(), id_less);
  return out;
}

bool Schema::has_stage(const Endpoint& e) const {
  const Machine* m = find_machine(e.machine);
  return m != nullptr && m->stages.contains(e.stage);
}

std::string_view to_string(DiagCode code) {
  switch (code) {
    case DiagCode::E_ADJ: return "E_ADJ";
    case DiagCode::E_XFER: return "E_XFER";
    case DiagCode::E_REF: return "E_REF";
    case DiagCode::E_SPHERE_CYCLE: return "E_SPHERE_CYCLE";
    case DiagCode::E_DUP_ID: return "E_DUP_ID";
  }
  return "E_?";
}

Schema build(std::vector<Sphere> spheres, std::vector<Machine> machines,
             std::vector<Flow> flows, std::vector<Trigger> triggers) {
  return Schema{std::move(spheres), std::move(machines), std::move(flows), std::move(triggers)};
}

bool adjacency_allowed(StageKind from, StageKind to, bool same_machine) {
  using S = StageKind;
  if (!same_machine) return from == S::Transfer && to == S::Transfer;
  static constexpr std::array<std::pair<S, S>, 7> kRelation = {{
      {S::Transfer, S::Receive},
      {S::Receive, S::Process},
      {S::Receive, S::Release},
      {S::Process, S::Release},
      {S::Create, S::Process},
      {S::Create, S::Release},
      {S::Release, S::Transfer},
  }};
  return std::find(kRelation.begin(), kRelation.end(), std::pair{from, to}) != kRelation.end();
}

namespace {

std::string describe(const Endpoint& e) {
  return e.machine + "." + std::string(to_string(e.stage));
}

class Validator {
 public:
  explicit Validator(const Schema& schema) : schema_(schema) {}

  std::vector<Diagnostic> run() {
    check_ids();
    check_spheres();
    check_machines();
    for (const auto& f : schema_.flows) check_flow(f);
    for (const auto& t : schema_.triggers) check_trigger(t);

    std::sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
      if (a.code != b.code) return a.code < b.code;
      if (a.location != b.location) return id_less(a.location, b.location);
      return a.message < b.message;
    });
    out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
    return std::move(out_);
  }

 private:
  void report(DiagCode code, std::string location, std::string message) {
    out_.push_back(Diagnostic{code, std::move(location), std::move(message)});
  }

  void check_ids() {
    std::unordered_map<std::string, int> seen;
    auto note = [&](const std::string& id) {
      if (!is_identifier(id)) report(DiagCode::E_REF, id, "malformed identifier '" + id + "'");
      ++seen[id];
    };
    for (const auto& s : schema_.spheres) note(s.id);
    for (const auto& m : schema_.machines) note(m.id);
    for (const auto& f : schema_.flows) note(f.id);
    for (const auto& t : schema_.triggers) note(t.id);
    for (const auto& [id, n] : seen) {
      if (n > 1) report(DiagCode::E_DUP_ID, id, "id '" + id + "' declared " + std::to_string(n) + " times");
    }
  }

  void check_spheres() {
    for (const auto& s : schema_.spheres) {
      if (s.parent && schema_.find_sphere(*s.parent) == nullptr) {
        report(DiagCode::E_REF, s.id, "sphere '" + s.id + "' has unknown parent '" + *s.parent + "'");
      }
    }
    // A sphere is on a cycle iff following parents from it returns to it.
    for (const auto& s : schema_.spheres) {
      std::unordered_set<std::string> walked;
      const Sphere* cur = &s;
      while (cur->parent) {
        if (!walked.insert(cur->id).second) break;
        const Sphere* next = schema_.find_sphere(*cur->parent);
        if (next == nullptr) break;
        if (next->id == s.id) {
          report(DiagCode::E_SPHERE_CYCLE, s.id, "sphere '" + s.id + "' contains itself");
          break;
        }
        cur = next;
      }
    }
  }

  void check_machines() {
    for (const auto& m : schema_.machines) {
      if (schema_.find_sphere(m.sphere) == nullptr) {
        report(DiagCode::E_REF, m.id, "machine '" + m.id + "' in unknown sphere '" + m.sphere + "'");
      }
      if (m.stages.empty()) report(DiagCode::E_REF, m.id, "machine '" + m.id + "' has no stages");
    }
  }

  bool check_endpoint(const std::string& owner, const Endpoint& e) {
    const Machine* m = schema_.find_machine(e.machine);
    if (m == nullptr) {
      report(DiagCode::E_REF, owner, "'" + owner + "' references unknown machine '" + e.machine + "'");
      return false;
    }
    if (!m->stages.contains(e.stage)) {
      report(DiagCode::E_REF, owner, "'" + owner + "' references absent stage " + describe(e));
      return false;
    }
    return true;
  }

  void check_flow(const Flow& f) {
    const bool ok_from = check_endpoint(f.id, f.from);
    const bool ok_to = check_endpoint(f.id, f.to);
    if (!ok_from || !ok_to) return;
    const bool same = f.from.machine == f.to.machine;
    if (adjacency_allowed(f.from.stage, f.to.stage, same)) return;
    if (same) {
      report(DiagCode::E_ADJ, f.id,
             "flow " + describe(f.from) + " -> " + describe(f.to) + " is not a legal stage order");
    } else {
      report(DiagCode::E_XFER, f.id,
             "flow " + describe(f.from) + " -> " + describe(f.to) + " crosses machines outside Transfer");
    }
  }

  void check_trigger(const Trigger& t) {
    const bool ok_from = check_endpoint(t.id, t.from);
    const bool ok_to = check_endpoint(t.id, t.to);
    if (ok_from && ok_to && t.from == t.to) {
      report(DiagCode::E_ADJ, t.id, "trigger " + describe(t.from) + " targets itself");
    }
  }

  const Schema& schema_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const Schema& schema) { return Validator(schema).run(); }

Schema canonicalize(const Schema& schema) {
  if (auto diags = validate(schema); !diags.empty()) {
    throw Error(ErrorCode::kInvalid, std::string(to_string(diags.front().code)) + " at '" +
                                         diags.front().location + "': " + diags.front().message);
  }

  Schema out;
  std::vector<std::string> roots;
  for (const auto& s : schema.spheres) {
    if (!s.parent) roots.push_back(s.id);
  }
  std::sort(roots.begin(), roots.end(), id_less);

  // Iterative pre-order so deep nesting cannot exhaust the stack.
  std::vector<std::string> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    std::string id = std::move(stack.back());
    stack.pop_back();
    out.spheres.push_back(*schema.find_sphere(id));
    for (const auto& mid : schema.machines_in(id)) out.machines.push_back(*schema.find_machine(mid));
    auto kids = schema.children_of(id);
    stack.insert(stack.end(), kids.rbegin(), kids.rend());
  }

  out.flows = schema.flows;
  std::sort(out.flows.begin(), out.flows.end(),
            [](const Flow& a, const Flow& b) { return id_less(a.id, b.id); });
  out.triggers = schema.triggers;
  std::sort(out.triggers.begin(), out.triggers.end(),
            [](const Trigger& a, const Trigger& b) { return id_less(a.id, b.id); });
  return out;
}

}  // namespace fm
