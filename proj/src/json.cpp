#include "json.hpp"

#include "fm/dsl.hpp"

namespace fm {

namespace {

using nlohmann::json;

json endpoint_json(const Endpoint& e) {
  return json{{"machine", e.machine}, {"stage", std::string(to_string(e.stage))}};
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kJson, what); }

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(where + ": missing '" + key + "'");
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) bad(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

StageKind stage_from(const json& v, const std::string& where) {
  if (!v.is_string()) bad(where + ": stage must be a string");
  auto s = parse_stage(v.get<std::string>());
  if (!s) bad(where + ": unknown stage '" + v.get<std::string>() + "'");
  return *s;
}

Endpoint endpoint_from(const json& v, const std::string& where) {
  if (!v.is_object()) bad(where + ": endpoint must be an object");
  return Endpoint{string_field(v, "machine", where), stage_from(field(v, "stage", where), where)};
}

const json& array_field(const json& obj, const char* key) {
  const json& v = field(obj, key, "document");
  if (!v.is_array()) bad(std::string("'") + key + "' must be an array");
  return v;
}

template <typename Link>
std::vector<Link> links_from(const json& arr, const char* kind) {
  std::vector<Link> out;
  for (const auto& item : arr) {
    if (!item.is_object()) bad(std::string(kind) + " entries must be objects");
    Link l;
    l.id = string_field(item, "id", kind);
    l.from = endpoint_from(field(item, "from", kind), std::string(kind) + " '" + l.id + "'");
    l.to = endpoint_from(field(item, "to", kind), std::string(kind) + " '" + l.id + "'");
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace

std::string to_json(const Schema& schema) {
  const Schema s = canonicalize(schema);
  json doc = json::object();
  doc["schema_version"] = "1";
  doc["spheres"] = json::array();
  for (const auto& sp : s.spheres) {
    doc["spheres"].push_back(json{{"id", sp.id},
                                  {"label", sp.label},
                                  {"parent", sp.parent ? json(*sp.parent) : json(nullptr)}});
  }
  doc["machines"] = json::array();
  for (const auto& m : s.machines) {
    json stages = json::array();
    for (auto st : m.stages.members()) stages.push_back(std::string(to_string(st)));
    doc["machines"].push_back(
        json{{"id", m.id}, {"thing", m.thing}, {"sphere", m.sphere}, {"stages", stages}});
  }
  doc["flows"] = json::array();
  for (const auto& f : s.flows) {
    doc["flows"].push_back(json{{"id", f.id}, {"from", endpoint_json(f.from)}, {"to", endpoint_json(f.to)}});
  }
  doc["triggers"] = json::array();
  for (const auto& t : s.triggers) {
    doc["triggers"].push_back(
        json{{"id", t.id}, {"from", endpoint_json(t.from)}, {"to", endpoint_json(t.to)}});
  }
  return doc.dump();
}

Schema from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(e.what());
  }
  if (!doc.is_object()) bad("document must be an object");
  const json& version = field(doc, "schema_version", "document");
  if (!version.is_string()) bad("'schema_version' must be a string");
  if (version.get<std::string>() != "1") {
    throw Error(ErrorCode::kVersion, "unsupported schema_version '" + version.get<std::string>() + "'");
  }

  Schema s;
  for (const auto& item : array_field(doc, "spheres")) {
    if (!item.is_object()) bad("sphere entries must be objects");
    Sphere sp;
    sp.id = string_field(item, "id", "sphere");
    sp.label = string_field(item, "label", "sphere '" + sp.id + "'");
    if (auto it = item.find("parent"); it != item.end() && !it->is_null()) {
      if (!it->is_string()) bad("sphere '" + sp.id + "': 'parent' must be a string or null");
      sp.parent = it->get<std::string>();
    }
    s.spheres.push_back(std::move(sp));
  }
  for (const auto& item : array_field(doc, "machines")) {
    if (!item.is_object()) bad("machine entries must be objects");
    Machine m;
    m.id = string_field(item, "id", "machine");
    const std::string where = "machine '" + m.id + "'";
    m.thing = string_field(item, "thing", where);
    m.sphere = string_field(item, "sphere", where);
    const json& stages = field(item, "stages", where);
    if (!stages.is_array()) bad(where + ": 'stages' must be an array");
    for (const auto& st : stages) m.stages.insert(stage_from(st, where));
    s.machines.push_back(std::move(m));
  }
  s.flows = links_from<Flow>(array_field(doc, "flows"), "flow");
  s.triggers = links_from<Trigger>(array_field(doc, "triggers"), "trigger");
  return s;
}

}  // namespace fm
