//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_PATTERN_HPP
#define MECHKIT_PATTERN_HPP

#include <optional>
#include <string>
#include <vector>

#include "mechkit/molecule.hpp"

namespace mechkit {

// One atom environment of a template's left-hand side. `slot` is the label
// edits refer to. An empty element set means "any element".
struct PatternAtom {
  int slot = 0;
  std::vector<std::string> element_set;
  std::optional<int> charge;
  std::optional<int> min_h;
  std::optional<bool> aromatic;
  std::optional<bool> in_ring;
  std::optional<int> max_degree;
  int component = 0;

  friend bool operator==(const PatternAtom&, const PatternAtom&) = default;
};

struct PatternBond {
  int slot_a = 0;
  int slot_b = 0;
  std::optional<BondOrder> order; // nullopt = any ('~')

  friend bool operator==(const PatternBond&, const PatternBond&) = default;
};

struct PatternGraph {
  std::vector<PatternAtom> atoms;
  std::vector<PatternBond> bonds;
  int n_components = 0;

  friend bool operator==(const PatternGraph&, const PatternGraph&) = default;

  const PatternAtom* find_slot(int slot) const {
    for (const PatternAtom& a : atoms)
      if (a.slot == slot) return &a;
    return nullptr;
  }
};

struct EditOp {
  enum class Kind { MakeBond, BreakBond, SetOrder, DeltaH, DeltaCharge, SetAromatic };
  Kind kind = Kind::MakeBond;
  int slot_a = 0;
  int slot_b = 0;          // bond edits only
  BondOrder order = BondOrder::Single;
  int amount = 0;          // delta_h / delta_charge
  bool flag = false;       // set_aromatic

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

// A rewrite rule for one elementary step. Edits never create or delete heavy
// atoms; proton-implicit steps shift total charge and hydrogen count by +-1
// together without an explicit acid/base partner.
struct ElementaryTemplate {
  std::string id; // "class/condition/step_index"
  std::string class_name;
  std::string condition_name;
  std::string step_name;
  int step_index = 0;
  PatternGraph pattern;
  std::vector<EditOp> edits;
  std::vector<PatternGraph> required_agents;
  int proton_implicit = 0; // -1, 0, +1
  bool is_termination = false;
  bool distinct_molecules = false;

  friend bool operator==(const ElementaryTemplate&, const ElementaryTemplate&) = default;
};

struct ConditionDef {
  std::string condition_name;
  std::vector<PatternGraph> required_agents;
  bool distinct_molecules = false;
  std::vector<ElementaryTemplate> steps;

  friend bool operator==(const ConditionDef&, const ConditionDef&) = default;
};

struct ReactionClassDef {
  std::string class_name;
  std::vector<ConditionDef> conditions;

  friend bool operator==(const ReactionClassDef&, const ReactionClassDef&) = default;
};

inline const std::string& termination_template_id() {
  static const std::string kId = "termination";
  return kId;
}

// The appended no-change step marking mechanism completion. Auto-generated,
// never authored in a pack.
inline ElementaryTemplate make_termination_template() {
  ElementaryTemplate t;
  t.id = termination_template_id();
  t.class_name = "";
  t.condition_name = "";
  t.step_name = "termination";
  t.step_index = 0;
  t.is_termination = true;
  return t;
}

} // namespace mechkit

#endif // MECHKIT_PATTERN_HPP
