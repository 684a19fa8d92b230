//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_MATCH_HPP
#define MECHKIT_MATCH_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "mechkit/pattern.hpp"
#include "mechkit/state.hpp"

namespace mechkit {

// One way of laying a pattern onto a StateBag: slot -> (molecule, atom).
struct Embedding {
  std::map<int, std::pair<int, int>> assignment;

  std::string signature() const {
    std::string out;
    for (const auto& [slot, loc] : assignment) {
      if (!out.empty()) out += ";";
      out += std::to_string(slot) + "=" + std::to_string(loc.first) + "." +
             std::to_string(loc.second);
    }
    return out;
  }
};

struct MatchOptions {
  bool distinct_molecules = false;
};

namespace match_detail {

struct StateView {
  const StateBag* bag;
  std::vector<std::vector<bool>> in_ring;     // per molecule
  std::vector<std::vector<int>> degree;       // per molecule

  explicit StateView(const StateBag& s) : bag(&s) {
    in_ring.reserve(s.molecules.size());
    degree.reserve(s.molecules.size());
    for (const Molecule& m : s.molecules) {
      in_ring.push_back(ring_atoms(m));
      std::vector<int> deg(m.atoms.size());
      for (size_t i = 0; i < m.atoms.size(); ++i) deg[i] = m.degree(static_cast<int>(i));
      degree.push_back(std::move(deg));
    }
  }

  bool atom_ok(const PatternAtom& p, int mi, int ai) const {
    const Atom& a = bag->molecules[mi].atoms[ai];
    if (!p.element_set.empty() &&
        std::find(p.element_set.begin(), p.element_set.end(), a.element) ==
            p.element_set.end())
      return false;
    if (p.charge && *p.charge != a.formal_charge) return false;
    if (p.min_h && a.implicit_h < *p.min_h) return false;
    if (p.aromatic && *p.aromatic != a.aromatic) return false;
    if (p.in_ring && *p.in_ring != in_ring[mi][ai]) return false;
    if (p.max_degree && degree[mi][ai] > *p.max_degree) return false;
    return true;
  }

  bool bond_ok(const PatternBond& pb, int mi, int a1, int a2) const {
    const Bond* b = bag->molecules[mi].find_bond(a1, a2);
    if (!b) return false;
    return !pb.order || *pb.order == b->order;
  }
};

struct Matcher {
  const PatternGraph* pattern;
  const StateView* view;
  MatchOptions options;

  std::vector<int> slot_order;            // indexes into pattern->atoms
  std::vector<std::vector<std::pair<int, std::optional<BondOrder>>>> back_edges;
  std::vector<Embedding> results;

  // Slots are matched component by component; within a component each slot
  // after the first is adjacent to an already-placed slot so candidates come
  // from neighborhoods instead of the whole state.
  void plan() {
    const auto& atoms = pattern->atoms;
    const int n = static_cast<int>(atoms.size());
    std::vector<bool> placed(n, false);
    std::vector<int> slot_to_index;
    int max_slot = 0;
    for (const auto& a : atoms) max_slot = std::max(max_slot, a.slot);
    slot_to_index.assign(max_slot + 1, -1);
    for (int i = 0; i < n; ++i) slot_to_index[atoms[i].slot] = i;

    auto adjacent_placed = [&](int idx) {
      for (const PatternBond& b : pattern->bonds) {
        int other = -1;
        if (b.slot_a == atoms[idx].slot) other = slot_to_index[b.slot_b];
        else if (b.slot_b == atoms[idx].slot) other = slot_to_index[b.slot_a];
        if (other >= 0 && placed[other]) return true;
      }
      return false;
    };

    for (int step = 0; step < n; ++step) {
      int pick = -1;
      for (int i = 0; i < n; ++i) {
        if (placed[i]) continue;
        bool anchored = adjacent_placed(i);
        // prefer anchored slots, then more-constrained ones
        if (pick < 0) {
          pick = i;
          continue;
        }
        bool pick_anchored = adjacent_placed(pick);
        if (anchored != pick_anchored) {
          if (anchored) pick = i;
          continue;
        }
        auto constraint_count = [&](int idx) {
          const PatternAtom& a = atoms[idx];
          int c = 0;
          if (!a.element_set.empty()) ++c;
          if (a.charge) ++c;
          if (a.min_h) ++c;
          if (a.aromatic) ++c;
          if (a.in_ring) ++c;
          if (a.max_degree) ++c;
          return c;
        };
        if (constraint_count(i) > constraint_count(pick)) pick = i;
      }
      placed[pick] = true;
      slot_order.push_back(pick);
    }

    back_edges.assign(n, {});
    std::vector<int> position(n, 0);
    for (int i = 0; i < n; ++i) position[slot_order[i]] = i;
    for (const PatternBond& b : pattern->bonds) {
      int ia = slot_to_index[b.slot_a];
      int ib = slot_to_index[b.slot_b];
      int later = position[ia] > position[ib] ? ia : ib;
      int earlier = later == ia ? ib : ia;
      back_edges[later].emplace_back(earlier, b.order);
    }
  }

  void search(size_t depth, std::map<int, std::pair<int, int>>& assign,
              std::vector<std::vector<bool>>& used,
              std::vector<int>& component_mol) {
    if (depth == slot_order.size()) {
      Embedding e;
      e.assignment = assign;
      results.push_back(std::move(e));
      return;
    }
    const int idx = slot_order[depth];
    const PatternAtom& patom = pattern->atoms[idx];
    const StateBag& bag = *view->bag;

    auto try_atom = [&](int mi, int ai) {
      if (used[mi][ai]) return;
      if (!view->atom_ok(patom, mi, ai)) return;
      if (component_mol[patom.component] >= 0 && component_mol[patom.component] != mi) return;
      if (component_mol[patom.component] < 0) {
        if (options.distinct_molecules) {
          for (int c = 0; c < static_cast<int>(component_mol.size()); ++c)
            if (c != patom.component && component_mol[c] == mi) return;
        }
      }
      for (auto& [other_idx, order] : back_edges[idx]) {
        auto it = assign.find(pattern->atoms[other_idx].slot);
        if (it == assign.end()) continue;
        if (it->second.first != mi) return;
        PatternBond pb{pattern->atoms[other_idx].slot, patom.slot, order};
        if (!view->bond_ok(pb, mi, it->second.second, ai)) return;
      }
      int prev_mol = component_mol[patom.component];
      component_mol[patom.component] = mi;
      used[mi][ai] = true;
      assign[patom.slot] = {mi, ai};
      search(depth + 1, assign, used, component_mol);
      assign.erase(patom.slot);
      used[mi][ai] = false;
      component_mol[patom.component] = prev_mol;
    };

    if (component_mol[patom.component] >= 0) {
      int mi = component_mol[patom.component];
      for (int ai = 0; ai < static_cast<int>(bag.molecules[mi].atoms.size()); ++ai)
        try_atom(mi, ai);
    } else {
      for (int mi = 0; mi < static_cast<int>(bag.molecules.size()); ++mi)
        for (int ai = 0; ai < static_cast<int>(bag.molecules[mi].atoms.size()); ++ai)
          try_atom(mi, ai);
    }
  }
};

} // namespace match_detail

// All embeddings of the pattern in the state, deduplicated by signature and
// sorted by signature for deterministic output.
inline std::vector<Embedding> find_matches(const PatternGraph& pattern, const StateBag& s,
                                           const MatchOptions& options = {}) {
  if (pattern.atoms.empty()) return {};
  match_detail::StateView view(s);
  match_detail::Matcher m{&pattern, &view, options, {}, {}, {}};
  m.plan();
  std::map<int, std::pair<int, int>> assign;
  std::vector<std::vector<bool>> used;
  for (const Molecule& mol : s.molecules) used.emplace_back(mol.atoms.size(), false);
  std::vector<int> component_mol(pattern.n_components, -1);
  m.search(0, assign, used, component_mol);

  std::sort(m.results.begin(), m.results.end(), [](const Embedding& a, const Embedding& b) {
    return a.signature() < b.signature();
  });
  m.results.erase(std::unique(m.results.begin(), m.results.end(),
                              [](const Embedding& a, const Embedding& b) {
                                return a.assignment == b.assignment;
                              }),
                  m.results.end());
  return m.results;
}

} // namespace mechkit

#endif // MECHKIT_MATCH_HPP
