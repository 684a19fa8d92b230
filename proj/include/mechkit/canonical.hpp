//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_CANONICAL_HPP
#define MECHKIT_CANONICAL_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "mechkit/molecule.hpp"
#include "mechkit/smiles.hpp"

namespace mechkit {

namespace canon_detail {

// Iterative invariant refinement seeded by (element, charge, implicit_h,
// aromatic, isotope, degree). Returns a partition as dense ranks; equal rank
// means "not yet distinguished".
inline std::vector<int> refine(const Molecule& m, std::vector<int> ranks) {
  const int n = static_cast<int>(m.atoms.size());
  auto adj = m.adjacency();
  int classes = 0;
  {
    std::vector<int> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    classes = static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  }
  while (true) {
    std::vector<std::pair<std::vector<int>, int>> keys(n);
    for (int v = 0; v < n; ++v) {
      std::vector<int> key;
      key.push_back(ranks[v]);
      std::vector<std::pair<int, int>> nbr;
      nbr.reserve(adj[v].size());
      for (auto [to, order] : adj[v]) nbr.emplace_back(static_cast<int>(order), ranks[to]);
      std::sort(nbr.begin(), nbr.end());
      for (auto [o, r] : nbr) {
        key.push_back(o);
        key.push_back(r);
      }
      keys[v] = {std::move(key), v};
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return keys[a].first < keys[b].first; });
    std::vector<int> next(n, 0);
    int rank = 0;
    for (int i = 0; i < n; ++i) {
      if (i > 0 && keys[order[i]].first != keys[order[i - 1]].first) ++rank;
      next[order[i]] = rank;
    }
    int new_classes = rank + (n > 0 ? 1 : 0);
    if (new_classes == classes) return next;
    classes = new_classes;
    ranks = std::move(next);
  }
}

inline std::vector<int> initial_ranks(const Molecule& m) {
  const int n = static_cast<int>(m.atoms.size());
  std::vector<std::tuple<std::string, int, int, int, int, int>> inv(n);
  for (int v = 0; v < n; ++v) {
    const Atom& a = m.atoms[v];
    inv[v] = {a.element, a.formal_charge, a.implicit_h, a.aromatic ? 1 : 0,
              a.isotope, m.degree(v)};
  }
  auto sorted = inv;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> ranks(n);
  for (int v = 0; v < n; ++v)
    ranks[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), inv[v]) -
                                sorted.begin());
  return ranks;
}

struct WriterOptions {
  bool maps = false;
  bool stereo = false;
};

// Implicit-H value the parser would infer for this atom in an unbracketed
// position; must mirror smiles_detail::Parser::fill_implicit_h.
inline int inferred_h(const Molecule& m, int v) {
  int load = m.bonding_load(v);
  for (int val : default_valences(m.atoms[v].element))
    if (val >= load) return val - load;
  return 0;
}

inline std::string atom_token(const Molecule& m, int v, const WriterOptions& opt) {
  const Atom& a = m.atoms[v];
  std::string sym = a.element;
  if (a.aromatic)
    for (auto& c : sym) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  bool bracket = a.formal_charge != 0 || a.isotope != 0 ||
                 (opt.maps && a.map_id != 0) ||
                 (opt.stereo && !a.chirality.empty()) ||
                 !in_organic_subset(a.element) ||
                 a.implicit_h != inferred_h(m, v);
  if (!bracket) return sym;

  std::string out = "[";
  if (a.isotope != 0) out += std::to_string(a.isotope);
  out += sym;
  if (opt.stereo) out += a.chirality;
  if (a.implicit_h == 1) out += "H";
  else if (a.implicit_h > 1) out += "H" + std::to_string(a.implicit_h);
  if (a.formal_charge != 0) {
    out += a.formal_charge > 0 ? '+' : '-';
    int mag = std::abs(a.formal_charge);
    if (mag > 1) out += std::to_string(mag);
  }
  if (opt.maps && a.map_id != 0) out += ":" + std::to_string(a.map_id);
  out += "]";
  return out;
}

inline std::string bond_token(const Molecule& m, int a, int b, BondOrder order) {
  switch (order) {
  case BondOrder::Single:
    return (m.atoms[a].aromatic && m.atoms[b].aromatic) ? "-" : "";
  case BondOrder::Double: return "=";
  case BondOrder::Triple: return "#";
  case BondOrder::Aromatic:
    return (m.atoms[a].aromatic && m.atoms[b].aromatic) ? "" : ":";
  }
  return "";
}

// Emits one connected component as SMILES following ascending rank order.
inline std::string write_component(const Molecule& m, const std::vector<int>& ranks,
                                   const std::vector<int>& atoms,
                                   const WriterOptions& opt) {
  const int n = static_cast<int>(m.atoms.size());
  auto adj = m.adjacency();
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end(),
              [&](const auto& x, const auto& y) { return ranks[x.first] < ranks[y.first]; });
  }

  int root = atoms.front();
  for (int a : atoms)
    if (ranks[a] < ranks[root]) root = a;

  // Pass 1: DFS preorder, tree children, and ring-closure (back) edges.
  std::vector<int> preorder(n, -1);
  std::vector<std::vector<int>> children(n);
  std::vector<std::vector<int>> closures(n); // partner atoms per atom
  std::vector<std::pair<int, int>> closure_edges;
  {
    std::vector<int> parent(n, -1);
    struct Frame { int v; size_t next = 0; };
    std::vector<Frame> stack;
    int counter = 0;
    preorder[root] = counter++;
    stack.push_back({root});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next >= adj[f.v].size()) {
        stack.pop_back();
        continue;
      }
      auto [to, order] = adj[f.v][f.next++];
      (void)order;
      if (to == parent[f.v] && preorder[to] >= 0) continue;
      if (preorder[to] >= 0) {
        // back edge; record once (when seen from the later atom)
        if (preorder[f.v] > preorder[to]) {
          closure_edges.emplace_back(to, f.v);
        }
        continue;
      }
      parent[to] = f.v;
      preorder[to] = counter++;
      children[f.v].push_back(to);
      stack.push_back({to});
    }
    // children were pushed in rank order already (adj sorted)
    std::sort(closure_edges.begin(), closure_edges.end(),
              [&](const auto& x, const auto& y) {
                return std::pair(preorder[x.first], preorder[x.second]) <
                       std::pair(preorder[y.first], preorder[y.second]);
              });
    for (auto& [open_atom, close_atom] : closure_edges) {
      closures[open_atom].push_back(close_atom);
      closures[close_atom].push_back(open_atom);
    }
    for (int v = 0; v < n; ++v) {
      std::sort(closures[v].begin(), closures[v].end(),
                [&](int a, int b) { return preorder[a] < preorder[b]; });
    }
  }

  // Assign closure digits in preorder; digits are reused after closing.
  std::map<std::pair<int, int>, int> digit_of; // (open, close) -> digit
  {
    std::vector<bool> used(100, false);
    std::vector<std::pair<int, int>> events; // ordered by open preorder
    for (auto& e : closure_edges) events.push_back(e);
    // Allocate in order of opening; free when the closing atom is passed.
    // Simple two-pointer sweep over preorder positions.
    std::vector<std::vector<std::pair<int, int>>> opens_at(n), closes_at(n);
    for (auto& e : events) {
      opens_at[e.first].push_back(e);
      closes_at[e.second].push_back(e);
    }
    std::vector<int> by_pre(n, -1);
    for (int v = 0; v < n; ++v)
      if (preorder[v] >= 0) by_pre[preorder[v]] = v;
    for (int p = 0; p < n; ++p) {
      int v = by_pre[p];
      if (v < 0) continue;
      for (auto& e : closes_at[v]) {
        used[digit_of[e]] = false;
      }
      for (auto& e : opens_at[v]) {
        int d = 1;
        while (d < 100 && used[d]) ++d;
        used[d] = true;
        digit_of[e] = d;
      }
    }
  }

  std::string out;
  auto emit_atom = [&](int v) {
    out += atom_token(m, v, opt);
    for (int partner : closures[v]) {
      std::pair<int, int> e = preorder[v] < preorder[partner]
                                  ? std::pair(v, partner)
                                  : std::pair(partner, v);
      int d = digit_of[e];
      if (preorder[v] < preorder[partner]) {
        const Bond* b = m.find_bond(v, partner);
        out += bond_token(m, v, partner, b->order);
      }
      if (d >= 10) out += "%";
      out += std::to_string(d);
    }
  };

  std::function<void(int)> rec = [&](int v) {
    emit_atom(v);
    const auto& kids = children[v];
    for (size_t i = 0; i < kids.size(); ++i) {
      int c = kids[i];
      const Bond* b = m.find_bond(v, c);
      std::string bt = bond_token(m, v, c, b->order);
      if (i + 1 < kids.size()) {
        out += "(";
        out += bt;
        rec(c);
        out += ")";
      } else {
        out += bt;
        rec(c);
      }
    }
  };
  out.clear();
  rec(root);
  return out;
}

// Completes a refined partition into discrete ranks; ties are broken by
// individualizing each candidate in the first tied cell and keeping the
// lexicographically smallest resulting string.
inline std::string canonical_component(const Molecule& m, std::vector<int> ranks,
                                       const WriterOptions& opt) {
  const int n = static_cast<int>(m.atoms.size());
  // find first tied cell
  int tied_rank = -1;
  std::vector<int> cell;
  for (int r = 0; r < n && tied_rank < 0; ++r) {
    cell.clear();
    for (int v = 0; v < n; ++v)
      if (ranks[v] == r) cell.push_back(v);
    if (cell.size() > 1) tied_rank = r;
  }
  if (tied_rank < 0) {
    std::vector<int> atoms(n);
    std::iota(atoms.begin(), atoms.end(), 0);
    return write_component(m, ranks, atoms, opt);
  }
  std::string best;
  bool have = false;
  for (int a : cell) {
    std::vector<int> promoted(n);
    for (int v = 0; v < n; ++v) {
      promoted[v] = ranks[v] * 2 + ((ranks[v] == tied_rank && v != a) ? 1 : 0);
    }
    std::string s = canonical_component(m, refine(m, promoted), opt);
    if (!have || s < best) {
      best = std::move(s);
      have = true;
    }
  }
  return best;
}

inline std::string write_molecule(const Molecule& m, const WriterOptions& opt) {
  if (m.atoms.empty()) return "";
  std::vector<Molecule> comps = split_components(m);
  std::vector<std::string> parts;
  parts.reserve(comps.size());
  for (const Molecule& c : comps) {
    parts.push_back(canonical_component(c, refine(c, initial_ranks(c)), opt));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ".";
    out += parts[i];
  }
  return out;
}

} // namespace canon_detail

// Canonical identity string: equal iff the molecules are attribute-preserving
// graph-isomorphic. Atom maps and stereo annotations are excluded.
inline std::string canonical_form(const Molecule& m) {
  return canon_detail::write_molecule(m, {/*maps=*/false, /*stereo=*/false});
}

// Round-trippable SMILES in canonical atom order; keeps atom maps and
// chirality annotations.
inline std::string write_smiles(const Molecule& m) {
  return canon_detail::write_molecule(m, {/*maps=*/true, /*stereo=*/true});
}

} // namespace mechkit

#endif // MECHKIT_CANONICAL_HPP
