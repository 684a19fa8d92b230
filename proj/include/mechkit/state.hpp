//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_STATE_HPP
#define MECHKIT_STATE_HPP

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "mechkit/canonical.hpp"
#include "mechkit/molecule.hpp"
#include "mechkit/smiles.hpp"

namespace mechkit {

// Multiset of molecules; one node of a mechanism network. Molecules are kept
// sorted by canonical form so the representation is order-independent.
struct StateBag {
  std::vector<Molecule> molecules;
  std::vector<std::string> canonical; // aligned with molecules
  std::string key;

  bool empty() const { return molecules.empty(); }
  size_t size() const { return molecules.size(); }
};

inline StateBag make_state(std::vector<Molecule> mols) {
  StateBag s;
  std::vector<std::pair<std::string, size_t>> order;
  order.reserve(mols.size());
  for (size_t i = 0; i < mols.size(); ++i) order.emplace_back(canonical_form(mols[i]), i);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  s.molecules.reserve(mols.size());
  s.canonical.reserve(mols.size());
  for (auto& [canon, idx] : order) {
    s.molecules.push_back(std::move(mols[idx]));
    s.canonical.push_back(canon);
  }
  for (size_t i = 0; i < s.canonical.size(); ++i) {
    if (i) s.key += ".";
    s.key += s.canonical[i];
  }
  return s;
}

inline StateBag state_from_smiles(const std::vector<std::string>& smiles) {
  std::vector<Molecule> mols;
  for (const auto& text : smiles) {
    for (Molecule& frag : parse_components(text)) mols.push_back(std::move(frag));
  }
  return make_state(std::move(mols));
}

// Sorted multiset of canonical forms joined with "."; equal keys iff the
// StateBags are multiset-equal up to isomorphism.
inline const std::string& state_key(const StateBag& s) { return s.key; }

inline std::map<std::string, int> heavy_atom_census(const StateBag& s) {
  std::map<std::string, int> census;
  for (const Molecule& m : s.molecules)
    for (const Atom& a : m.atoms) ++census[a.element];
  return census;
}

inline int total_charge(const StateBag& s) {
  int q = 0;
  for (const Molecule& m : s.molecules)
    for (const Atom& a : m.atoms) q += a.formal_charge;
  return q;
}

inline int total_implicit_h(const StateBag& s) {
  int h = 0;
  for (const Molecule& m : s.molecules)
    for (const Atom& a : m.atoms) h += a.implicit_h;
  return h;
}

// True when every entry of `wanted` (a multiset of canonical forms) occurs in
// the bag with at least the wanted multiplicity.
inline bool contains_all(const StateBag& s, const std::vector<std::string>& wanted_canonical) {
  std::map<std::string, int> have;
  for (const auto& c : s.canonical) ++have[c];
  std::map<std::string, int> want;
  for (const auto& c : wanted_canonical) ++want[c];
  for (auto& [c, n] : want) {
    auto it = have.find(c);
    if (it == have.end() || it->second < n) return false;
  }
  return true;
}

} // namespace mechkit

#endif // MECHKIT_STATE_HPP
