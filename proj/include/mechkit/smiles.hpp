//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_SMILES_HPP
#define MECHKIT_SMILES_HPP

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mechkit/molecule.hpp"

namespace mechkit {

class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, size_t offset)
      : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  size_t offset() const { return offset_; }

private:
  size_t offset_;
};

namespace smiles_detail {

struct Parser {
  std::string_view text;
  size_t pos = 0;
  Molecule mol;

  struct PendingRing {
    int atom;
    bool has_order;
    BondOrder order;
    size_t offset;
  };
  std::map<int, PendingRing> open_rings;
  // per-atom explicit H spec from brackets (-1 = compute from valence)
  std::vector<int> bracket_h;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos); }

  bool done() const { return pos >= text.size(); }
  char peek() const { return done() ? '\0' : text[pos]; }
  char take() { return text[pos++]; }

  int read_int() {
    size_t start = pos;
    long v = 0;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (take() - '0');
      if (v > 100000) fail("numeric literal too large");
    }
    if (pos == start) fail("expected digits");
    return static_cast<int>(v);
  }

  int add_atom(Atom a, int hspec) {
    mol.atoms.push_back(std::move(a));
    bracket_h.push_back(hspec);
    return static_cast<int>(mol.atoms.size()) - 1;
  }

  void add_bond(int a, int b, BondOrder order, size_t at) {
    if (a == b) throw ParseError("bond endpoints must differ", at);
    if (mol.find_bond(a, b)) throw ParseError("duplicate bond between atoms", at);
    mol.bonds.push_back({a, b, order});
  }

  // Parses an element symbol at the cursor. Outside brackets only the organic
  // subset is allowed and lowercase marks aromatic atoms.
  bool read_organic_atom(Atom& out) {
    char c = peek();
    // two-letter first
    if (c == 'C' && pos + 1 < text.size() && text[pos + 1] == 'l') {
      pos += 2;
      out.element = "Cl";
      return true;
    }
    if (c == 'B' && pos + 1 < text.size() && text[pos + 1] == 'r') {
      pos += 2;
      out.element = "Br";
      return true;
    }
    switch (c) {
    case 'B': case 'C': case 'N': case 'O': case 'P': case 'S': case 'F': case 'I':
      out.element = std::string(1, take());
      return true;
    case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
      out.element = std::string(1, static_cast<char>(std::toupper(take())));
      out.aromatic = true;
      return true;
    default:
      return false;
    }
  }

  int read_bracket_atom() {
    size_t open_at = pos;
    take(); // '['
    Atom a;
    int hspec = 0; // brackets default to zero implicit hydrogens
    if (!done() && std::isdigit(static_cast<unsigned char>(peek()))) a.isotope = read_int();
    if (done()) throw ParseError("unterminated bracket atom", open_at);

    char c = peek();
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::string sym(1, take());
      if (!done() && std::islower(static_cast<unsigned char>(peek()))) {
        std::string two = sym + peek();
        if (is_valid_element(two)) {
          sym = two;
          take();
        }
      }
      if (!is_valid_element(sym)) fail("unknown element '" + sym + "'");
      a.element = sym;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      std::string sym(1, static_cast<char>(std::toupper(take())));
      if (!is_valid_element(sym) || !aromatic_capable(sym))
        fail("unknown aromatic element '" + std::string(1, c) + "'");
      a.element = sym;
      a.aromatic = true;
    } else {
      fail("expected element symbol in bracket");
    }
    if (a.element == "H") throw ParseError("explicit hydrogen atoms are not supported", open_at);

    while (!done() && peek() == '@') {
      a.chirality += take();
    }
    if (!done() && peek() == 'H') {
      take();
      hspec = 1;
      if (!done() && std::isdigit(static_cast<unsigned char>(peek()))) hspec = read_int();
    }
    if (!done() && (peek() == '+' || peek() == '-')) {
      char sign = take();
      int mag = 1;
      if (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
        mag = read_int();
      } else {
        while (!done() && peek() == sign) {
          take();
          ++mag;
        }
      }
      a.formal_charge = sign == '+' ? mag : -mag;
      if (a.formal_charge > 4 || a.formal_charge < -4) fail("formal charge out of range");
    }
    if (!done() && peek() == ':') {
      take();
      a.map_id = read_int();
      if (a.map_id <= 0) fail("atom map must be positive");
    }
    if (done() || peek() != ']') throw ParseError("unterminated bracket atom", open_at);
    take();
    a.implicit_h = hspec;
    return add_atom(std::move(a), hspec);
  }

  void ring_closure(int digit, int from, bool has_order, BondOrder order, size_t at) {
    auto it = open_rings.find(digit);
    if (it == open_rings.end()) {
      open_rings[digit] = {from, has_order, order, at};
      return;
    }
    PendingRing pending = it->second;
    open_rings.erase(it);
    BondOrder final_order;
    bool resolved = false;
    if (pending.has_order && has_order) {
      if (pending.order != order) fail("ring-closure bond order mismatch");
      final_order = order;
      resolved = true;
    } else if (pending.has_order) {
      final_order = pending.order;
      resolved = true;
    } else if (has_order) {
      final_order = order;
      resolved = true;
    }
    if (!resolved) {
      final_order = (mol.atoms[pending.atom].aromatic && mol.atoms[from].aromatic)
                        ? BondOrder::Aromatic
                        : BondOrder::Single;
    }
    add_bond(pending.atom, from, final_order, at);
  }

  void run() {
    std::vector<std::pair<int, size_t>> branch_stack; // (atom, '(' offset)
    int prev = -1;
    bool pending_bond = false;
    BondOrder pending_order = BondOrder::Single;
    bool after_dot = false;

    while (!done()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        fail("unexpected whitespace in SMILES");
      }
      if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
        if (pending_bond) fail("two consecutive bond symbols");
        if (prev < 0) fail("bond symbol with no preceding atom");
        pending_bond = true;
        switch (c) {
        case '=': pending_order = BondOrder::Double; break;
        case '#': pending_order = BondOrder::Triple; break;
        case ':': pending_order = BondOrder::Aromatic; break;
        default: pending_order = BondOrder::Single; break; // '-', '/', '\'
        }
        take();
        continue;
      }
      if (c == '(') {
        if (prev < 0) fail("branch with no preceding atom");
        if (pending_bond) fail("bond symbol before '('");
        branch_stack.emplace_back(prev, pos);
        take();
        continue;
      }
      if (c == ')') {
        if (branch_stack.empty()) fail("unbalanced ')'");
        if (pending_bond) fail("dangling bond before ')'");
        prev = branch_stack.back().first;
        branch_stack.pop_back();
        take();
        continue;
      }
      if (c == '.') {
        if (pending_bond) fail("bond symbol before '.'");
        if (!branch_stack.empty()) fail("'.' inside branch");
        prev = -1;
        after_dot = true;
        take();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) fail("ring closure with no preceding atom");
        size_t at = pos;
        int digit;
        if (c == '%') {
          take();
          if (done() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected digits after '%'");
          int d1 = take() - '0';
          if (done() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("'%' ring closure needs two digits");
          digit = d1 * 10 + (take() - '0');
        } else {
          digit = take() - '0';
        }
        ring_closure(digit, prev, pending_bond, pending_order, at);
        pending_bond = false;
        continue;
      }
      if (c == '[') {
        int idx = read_bracket_atom();
        connect(prev, idx, pending_bond, pending_order);
        pending_bond = false;
        prev = idx;
        after_dot = false;
        continue;
      }
      if (c == '+' || c == '-') {
        fail("charge syntax outside brackets");
      }
      if (c == 'H' || c == 'h') {
        fail("hydrogen-count syntax outside brackets");
      }
      if (c == '*') {
        fail("wildcard atoms are not allowed in molecule SMILES");
      }
      Atom a;
      if (read_organic_atom(a)) {
        int idx = add_atom(std::move(a), -1);
        connect(prev, idx, pending_bond, pending_order);
        pending_bond = false;
        prev = idx;
        after_dot = false;
        continue;
      }
      fail(std::string("unexpected character '") + c + "'");
    }
    (void)after_dot;
    if (pending_bond) fail("dangling bond at end of input");
    if (!branch_stack.empty())
      throw ParseError("unbalanced '('", branch_stack.back().second);
    if (!open_rings.empty()) {
      throw ParseError("unbalanced ring closure " + std::to_string(open_rings.begin()->first),
                       open_rings.begin()->second.offset);
    }
    fill_implicit_h();
  }

  void connect(int prev, int idx, bool has_bond, BondOrder order) {
    if (prev < 0) {
      if (has_bond) fail("bond symbol with no preceding atom");
      return;
    }
    BondOrder o = order;
    if (!has_bond) {
      o = (mol.atoms[prev].aromatic && mol.atoms[idx].aromatic) ? BondOrder::Aromatic
                                                                : BondOrder::Single;
    }
    add_bond(prev, idx, o, pos);
  }

  // Implicit hydrogens for organic-subset atoms: the smallest default valence
  // that accommodates the bonding load; bracket atoms keep their explicit spec.
  void fill_implicit_h() {
    for (int i = 0; i < static_cast<int>(mol.atoms.size()); ++i) {
      if (bracket_h[i] >= 0) continue;
      Atom& a = mol.atoms[i];
      int load = mol.bonding_load(i);
      a.implicit_h = 0;
      for (int v : default_valences(a.element)) {
        if (v >= load) {
          a.implicit_h = v - load;
          break;
        }
      }
    }
  }
};

} // namespace smiles_detail

// Parses one SMILES string into a molecule. Dots are accepted and produce a
// multi-fragment molecule; use parse_components when fragments should become
// separate molecules.
inline Molecule parse_smiles(std::string_view text) {
  if (text.empty()) throw ParseError("empty SMILES", 0);
  smiles_detail::Parser p;
  p.text = text;
  p.run();
  return std::move(p.mol);
}

inline std::vector<Molecule> parse_components(std::string_view text) {
  return split_components(parse_smiles(text));
}

} // namespace mechkit

#endif // MECHKIT_SMILES_HPP
