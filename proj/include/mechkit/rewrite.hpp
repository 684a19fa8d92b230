//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_REWRITE_HPP
#define MECHKIT_REWRITE_HPP

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mechkit/match.hpp"
#include "mechkit/pattern.hpp"
#include "mechkit/state.hpp"

namespace mechkit {

// Raised when an edit cannot be carried out on the matched atoms; this
// signals a buggy template, not bad input.
class EditFault : public std::runtime_error {
public:
  explicit EditFault(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool check_required_agents(const ElementaryTemplate& t, const StateBag& s) {
  for (const PatternGraph& agent : t.required_agents) {
    if (find_matches(agent, s).empty()) return false;
  }
  return true;
}

inline bool agents_satisfied(const std::vector<PatternGraph>& agents, const StateBag& s) {
  for (const PatternGraph& agent : agents)
    if (find_matches(agent, s).empty()) return false;
  return true;
}

// Applies the template's edits through the embedding. Touched molecules are
// merged into one workspace, edited in authored order, then re-partitioned
// into connected components; untouched molecules pass through unchanged.
inline StateBag apply(const ElementaryTemplate& t, const StateBag& s, const Embedding& e) {
  if (t.is_termination) return s;

  std::vector<int> touched;
  for (const auto& [slot, loc] : e.assignment) touched.push_back(loc.first);
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  Molecule work;
  std::map<int, int> offset; // molecule index -> atom offset in workspace
  for (int mi : touched) {
    offset[mi] = static_cast<int>(work.atoms.size());
    const Molecule& m = s.molecules[mi];
    work.atoms.insert(work.atoms.end(), m.atoms.begin(), m.atoms.end());
    for (const Bond& b : m.bonds)
      work.bonds.push_back({b.a + offset[mi], b.b + offset[mi], b.order});
  }

  auto atom_of = [&](int slot) {
    auto it = e.assignment.find(slot);
    if (it == e.assignment.end())
      throw EditFault("edit references slot " + std::to_string(slot) +
                      " missing from embedding");
    return offset.at(it->second.first) + it->second.second;
  };

  for (const EditOp& op : t.edits) {
    switch (op.kind) {
    case EditOp::Kind::MakeBond: {
      int a = atom_of(op.slot_a), b = atom_of(op.slot_b);
      if (work.find_bond(a, b))
        throw EditFault("make_bond on already-bonded atoms in template " + t.id);
      work.bonds.push_back({a, b, op.order});
      break;
    }
    case EditOp::Kind::BreakBond: {
      int a = atom_of(op.slot_a), b = atom_of(op.slot_b);
      auto it = std::find_if(work.bonds.begin(), work.bonds.end(), [&](const Bond& bd) {
        return (bd.a == a && bd.b == b) || (bd.a == b && bd.b == a);
      });
      if (it == work.bonds.end())
        throw EditFault("break_bond on nonexistent bond in template " + t.id);
      work.bonds.erase(it);
      break;
    }
    case EditOp::Kind::SetOrder: {
      int a = atom_of(op.slot_a), b = atom_of(op.slot_b);
      auto it = std::find_if(work.bonds.begin(), work.bonds.end(), [&](const Bond& bd) {
        return (bd.a == a && bd.b == b) || (bd.a == b && bd.b == a);
      });
      if (it == work.bonds.end())
        throw EditFault("set_order on nonexistent bond in template " + t.id);
      it->order = op.order;
      break;
    }
    case EditOp::Kind::DeltaH: {
      Atom& a = work.atoms[atom_of(op.slot_a)];
      if (a.implicit_h + op.amount < 0)
        throw EditFault("delta_h drives implicit_h below 0 in template " + t.id);
      a.implicit_h += op.amount;
      break;
    }
    case EditOp::Kind::DeltaCharge: {
      Atom& a = work.atoms[atom_of(op.slot_a)];
      a.formal_charge += op.amount;
      if (a.formal_charge > 4 || a.formal_charge < -4)
        throw EditFault("formal charge out of range in template " + t.id);
      break;
    }
    case EditOp::Kind::SetAromatic: {
      work.atoms[atom_of(op.slot_a)].aromatic = op.flag;
      break;
    }
    }
  }

  std::vector<Molecule> result;
  for (int mi = 0; mi < static_cast<int>(s.molecules.size()); ++mi) {
    if (!std::binary_search(touched.begin(), touched.end(), mi))
      result.push_back(s.molecules[mi]);
  }
  for (Molecule& frag : split_components(work)) result.push_back(std::move(frag));
  return make_state(std::move(result));
}

struct Application {
  Embedding embedding;
  StateBag successor;
};

// All distinct successor states reachable by one application of the template.
// Successors that are state_key-identical are collapsed (automorphic matches
// are real but redundant downstream); output sorted by successor key.
// Embeddings whose edits turn out infeasible (an EditFault) are skipped: a
// loose pattern may legitimately match states its edits cannot rewrite.
inline std::vector<Application> enumerate_applications(const ElementaryTemplate& t,
                                                       const StateBag& s,
                                                       bool gate_on_agents = true) {
  std::vector<Application> out;
  if (gate_on_agents && !check_required_agents(t, s)) return out;
  if (t.is_termination) {
    out.push_back({Embedding{}, s});
    return out;
  }
  MatchOptions opts;
  opts.distinct_molecules = t.distinct_molecules;
  std::map<std::string, Application> by_key;
  for (Embedding& e : find_matches(t.pattern, s, opts)) {
    StateBag next;
    try {
      next = apply(t, s, e);
    } catch (const EditFault&) {
      continue;
    }
    std::string key = next.key;
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      by_key.emplace(std::move(key), Application{std::move(e), std::move(next)});
    }
  }
  out.reserve(by_key.size());
  for (auto& [key, app] : by_key) out.push_back(std::move(app));
  return out;
}

} // namespace mechkit

#endif // MECHKIT_REWRITE_HPP
