#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fm/error.hpp"

namespace fm {

// Declaration order is the fixed stage order used for sorting and walking:
// Create < Receive < Process < Release < Transfer.
enum class StageKind : std::uint8_t { Create, Receive, Process, Release, Transfer };

inline constexpr std::array<StageKind, 5> kAllStages = {
    StageKind::Create, StageKind::Receive, StageKind::Process, StageKind::Release,
    StageKind::Transfer};

std::string_view to_string(StageKind stage);
std::optional<StageKind> parse_stage(std::string_view name);

// Subset of the five stage kinds.
class StageSet {
 public:
  constexpr StageSet() = default;
  constexpr StageSet(std::initializer_list<StageKind> stages) {
    for (auto s : stages) insert(s);
  }

  constexpr void insert(StageKind s) { bits_ |= bit(s); }
  constexpr void erase(StageKind s) { bits_ &= static_cast<std::uint8_t>(~bit(s)); }
  constexpr bool contains(StageKind s) const { return (bits_ & bit(s)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool is_subset_of(StageSet other) const { return (bits_ & ~other.bits_) == 0; }
  int size() const;

  // Members in fixed stage order.
  std::vector<StageKind> members() const;

  friend constexpr bool operator==(StageSet, StageSet) = default;

 private:
  static constexpr std::uint8_t bit(StageKind s) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s));
  }
  std::uint8_t bits_ = 0;
};

// Identifier ordering used everywhere ids are sorted: digit runs compare
// numerically ("e2" < "e10"), everything else bytewise; ties fall back to
// plain string comparison so the order is total.
bool id_less(std::string_view a, std::string_view b);

// [A-Za-z_][A-Za-z0-9_]*
bool is_identifier(std::string_view text);

struct Sphere {
  std::string id;
  std::string label;
  std::optional<std::string> parent;

  friend bool operator==(const Sphere&, const Sphere&) = default;
};

struct Machine {
  std::string id;
  std::string thing;
  std::string sphere;
  StageSet stages;

  friend bool operator==(const Machine&, const Machine&) = default;
};

struct Endpoint {
  std::string machine;
  StageKind stage = StageKind::Create;

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

// Orders by (machine id, stage order).
bool endpoint_less(const Endpoint& a, const Endpoint& b);

struct Flow {
  std::string id;
  Endpoint from;
  Endpoint to;

  friend bool operator==(const Flow&, const Flow&) = default;
};

struct Trigger {
  std::string id;
  Endpoint from;
  Endpoint to;

  friend bool operator==(const Trigger&, const Trigger&) = default;
};

struct Schema {
  std::vector<Sphere> spheres;
  std::vector<Machine> machines;
  std::vector<Flow> flows;
  std::vector<Trigger> triggers;

  const Sphere* find_sphere(std::string_view id) const;
  const Machine* find_machine(std::string_view id) const;
  const Flow* find_flow(std::string_view id) const;

  // Derived containment views; both are in canonical id order.
  std::vector<std::string> children_of(std::string_view sphere_id) const;
  std::vector<std::string> machines_in(std::string_view sphere_id) const;

  bool has_stage(const Endpoint& e) const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

enum class DiagCode { E_ADJ, E_XFER, E_REF, E_SPHERE_CYCLE, E_DUP_ID };

std::string_view to_string(DiagCode code);

struct Diagnostic {
  DiagCode code;
  std::string location;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

Schema build(std::vector<Sphere> spheres, std::vector<Machine> machines,
             std::vector<Flow> flows, std::vector<Trigger> triggers);

// Sorted by (code, location); empty iff the schema is well formed.
std::vector<Diagnostic> validate(const Schema& schema);

// Intra-machine pairs are checked against the stage adjacency relation;
// inter-machine pairs must be Transfer -> Transfer.
bool adjacency_allowed(StageKind from, StageKind to, bool same_machine);

// Canonical element order: spheres in pre-order of the containment forest
// with siblings by id, machines grouped by that sphere order then by id,
// flows and triggers by id. This is exactly the order print() emits, so
// parse(print(s)) reproduces it. Throws Error{kInvalid} on a bad schema.
Schema canonicalize(const Schema& schema);

}  // namespace fm
