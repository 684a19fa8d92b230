//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_MOLECULE_HPP
#define MECHKIT_MOLECULE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mechkit/elements.hpp"

namespace mechkit {

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

inline int order_weight(BondOrder o) {
  switch (o) {
  case BondOrder::Single: return 1;
  case BondOrder::Double: return 2;
  case BondOrder::Triple: return 3;
  case BondOrder::Aromatic: return 1; // aromatic atoms add one extra unit themselves
  }
  return 1;
}

inline char order_symbol(BondOrder o) {
  switch (o) {
  case BondOrder::Single: return '-';
  case BondOrder::Double: return '=';
  case BondOrder::Triple: return '#';
  case BondOrder::Aromatic: return ':';
  }
  return '-';
}

// Heavy atom; hydrogens are implicit counts, never graph nodes.
struct Atom {
  std::string element;
  int formal_charge = 0;
  int implicit_h = 0;
  bool aromatic = false;
  int map_id = 0;          // 0 = unset
  int isotope = 0;         // 0 = unset
  std::string chirality;   // opaque annotation ("@", "@@"); excluded from identity

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.element == b.element && a.formal_charge == b.formal_charge &&
           a.implicit_h == b.implicit_h && a.aromatic == b.aromatic &&
           a.map_id == b.map_id && a.isotope == b.isotope;
  }
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
};

// Attributed undirected graph of heavy atoms.
struct Molecule {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  int degree(int atom) const {
    int d = 0;
    for (const Bond& b : bonds)
      if (b.a == atom || b.b == atom) ++d;
    return d;
  }

  const Bond* find_bond(int a, int b) const {
    for (const Bond& bd : bonds)
      if ((bd.a == a && bd.b == b) || (bd.a == b && bd.b == a)) return &bd;
    return nullptr;
  }

  std::vector<std::vector<std::pair<int, BondOrder>>> adjacency() const {
    std::vector<std::vector<std::pair<int, BondOrder>>> adj(atoms.size());
    for (const Bond& b : bonds) {
      adj[b.a].emplace_back(b.b, b.order);
      adj[b.b].emplace_back(b.a, b.order);
    }
    return adj;
  }

  // Sum of bond-order weights plus the implicit count; an aromatic atom
  // contributes one extra unit for its pi system.
  int bonding_load(int atom) const {
    int load = atoms[atom].aromatic ? 1 : 0;
    for (const Bond& b : bonds)
      if (b.a == atom || b.b == atom) load += order_weight(b.order);
    return load;
  }
};

// Ring membership: an atom lies on a cycle iff it has an incident non-bridge
// edge. Bridges found with one DFS (Tarjan low-link).
inline std::vector<bool> ring_atoms(const Molecule& m) {
  const int n = static_cast<int>(m.atoms.size());
  std::vector<bool> in_ring(n, false);
  if (n == 0) return in_ring;

  std::vector<std::vector<std::pair<int, int>>> adj(n); // (neighbor, edge id)
  for (int e = 0; e < static_cast<int>(m.bonds.size()); ++e) {
    adj[m.bonds[e].a].emplace_back(m.bonds[e].b, e);
    adj[m.bonds[e].b].emplace_back(m.bonds[e].a, e);
  }

  std::vector<int> tin(n, -1), low(n, 0);
  std::vector<bool> edge_is_bridge(m.bonds.size(), false);
  int timer = 0;

  struct Frame {
    int v;
    int parent_edge;
    size_t next = 0;
  };
  for (int start = 0; start < n; ++start) {
    if (tin[start] >= 0) continue;
    std::vector<Frame> stack;
    stack.push_back({start, -1});
    tin[start] = low[start] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < adj[f.v].size()) {
        auto [to, eid] = adj[f.v][f.next++];
        if (eid == f.parent_edge) continue;
        if (tin[to] >= 0) {
          low[f.v] = std::min(low[f.v], tin[to]);
        } else {
          tin[to] = low[to] = timer++;
          stack.push_back({to, eid});
        }
      } else {
        int v = f.v;
        int pe = f.parent_edge;
        stack.pop_back();
        if (pe >= 0) {
          int parent = stack.back().v;
          low[parent] = std::min(low[parent], low[v]);
          if (low[v] > tin[parent]) edge_is_bridge[pe] = true;
        }
      }
    }
  }
  for (int e = 0; e < static_cast<int>(m.bonds.size()); ++e) {
    if (!edge_is_bridge[e]) {
      in_ring[m.bonds[e].a] = true;
      in_ring[m.bonds[e].b] = true;
    }
  }
  return in_ring;
}

// Splits a molecule into its connected components, preserving atom order
// within each component. Component order follows the smallest atom index.
inline std::vector<Molecule> split_components(const Molecule& m) {
  const int n = static_cast<int>(m.atoms.size());
  std::vector<int> comp(n, -1);
  auto adj = m.adjacency();
  int ncomp = 0;
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<int> stack{i};
    comp[i] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [to, ord] : adj[v]) {
        (void)ord;
        if (comp[to] < 0) {
          comp[to] = ncomp;
          stack.push_back(to);
        }
      }
    }
    ++ncomp;
  }
  std::vector<Molecule> out(ncomp);
  std::vector<int> remap(n, -1);
  std::vector<int> counter(ncomp, 0);
  for (int i = 0; i < n; ++i) {
    remap[i] = counter[comp[i]]++;
    out[comp[i]].atoms.push_back(m.atoms[i]);
  }
  for (const Bond& b : m.bonds) {
    Bond nb = b;
    nb.a = remap[b.a];
    nb.b = remap[b.b];
    out[comp[b.a]].bonds.push_back(nb);
  }
  return out;
}

// Advisory valence check. Returns a human-readable note per suspicious atom;
// never rejects, since template intermediates may be hypervalent or charged.
inline std::vector<std::string> valence_notes(const Molecule& m, int slack = 0) {
  std::vector<std::string> notes;
  for (int i = 0; i < static_cast<int>(m.atoms.size()); ++i) {
    const Atom& a = m.atoms[i];
    const auto& vals = default_valences(a.element);
    if (vals.empty()) continue;
    int load = m.bonding_load(i) + a.implicit_h;
    int allowed = vals.back() + std::abs(a.formal_charge) + slack;
    if (load > allowed) {
      notes.push_back("atom " + std::to_string(i) + " (" + a.element +
                      ") load " + std::to_string(load) + " exceeds " +
                      std::to_string(allowed));
    }
  }
  return notes;
}

} // namespace mechkit

#endif // MECHKIT_MOLECULE_HPP
