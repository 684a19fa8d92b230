//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_PACK_HPP
#define MECHKIT_PACK_HPP

#include <cctype>
#include <cstdlib>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mechkit/elements.hpp"
#include "mechkit/pattern.hpp"

namespace mechkit {

class PackError : public std::runtime_error {
public:
  PackError(const std::string& message, int line, int col)
      : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(col) +
                           ": " + message),
        line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_, col_;
};

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Error;
  std::string template_id;
  std::string message;
};

namespace pack_detail {

struct Cursor {
  std::string_view text;
  size_t pos = 0;

  void line_col(int& line, int& col) const {
    line = 1;
    col = 1;
    for (size_t i = 0; i < pos && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    int line, col;
    line_col(line, col);
    throw PackError(msg, line, col);
  }

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  // whitespace only; leaves '#' alone (it is the triple bond inside patterns)
  void skip_spaces() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool done() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  char raw_peek() const { return pos < text.size() ? text[pos] : '\0'; }

  bool try_consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "'");
  }

  // Word = [A-Za-z_][A-Za-z0-9_]* at the cursor (after whitespace).
  std::string peek_word() {
    skip_ws();
    size_t p = pos;
    std::string w;
    while (p < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
      w += text[p++];
    return w;
  }

  bool try_keyword(std::string_view kw) {
    skip_ws();
    if (peek_word() == kw) {
      pos += kw.size();
      return true;
    }
    return false;
  }

  void expect_keyword(std::string_view kw) {
    if (!try_keyword(kw)) fail("expected '" + std::string(kw) + "'");
  }

  std::string parse_string() {
    skip_ws();
    if (raw_peek() != '"') fail("expected string literal");
    ++pos;
    std::string out;
    while (pos < text.size() && text[pos] != '"') out += text[pos++];
    if (pos >= text.size()) fail("unterminated string literal");
    ++pos;
    return out;
  }

  int parse_int() {
    skip_ws();
    bool neg = false;
    if (raw_peek() == '+' || raw_peek() == '-') {
      neg = text[pos] == '-';
      ++pos;
    }
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      fail("expected integer");
    long v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + (text[pos++] - '0');
      if (v > 1000000) fail("integer too large");
    }
    return static_cast<int>(neg ? -v : v);
  }
};

inline bool is_bond_char(char c) {
  return c == '-' || c == '=' || c == '#' || c == ':' || c == '~';
}

inline std::optional<BondOrder> bond_from_char(char c) {
  switch (c) {
  case '-': return BondOrder::Single;
  case '=': return BondOrder::Double;
  case '#': return BondOrder::Triple;
  case ':': return BondOrder::Aromatic;
  case '~': return std::nullopt;
  }
  return BondOrder::Single;
}

struct PatternParser {
  Cursor& cur;
  PatternGraph graph;
  int component = 0;

  PatternAtom parse_atomexpr() {
    cur.skip_ws();
    if (cur.raw_peek() != '[') cur.fail("expected '[' starting a pattern atom");
    ++cur.pos;
    PatternAtom a;
    a.component = component;
    // element set
    if (cur.raw_peek() == '*') {
      ++cur.pos;
    } else {
      while (true) {
        std::string sym;
        while (cur.pos < cur.text.size() &&
               std::isalpha(static_cast<unsigned char>(cur.text[cur.pos])) &&
               !(sym.size() >= 1 && std::isupper(static_cast<unsigned char>(cur.text[cur.pos]))))
          sym += cur.text[cur.pos++];
        if (sym.empty()) cur.fail("expected element symbol or '*'");
        if (!is_valid_element(sym)) cur.fail("unknown element symbol '" + sym + "'");
        a.element_set.push_back(sym);
        if (cur.raw_peek() == ',') {
          ++cur.pos;
          continue;
        }
        break;
      }
    }
    // constraints
    while (cur.raw_peek() == ';') {
      ++cur.pos;
      char c = cur.raw_peek();
      if (c == '+' || c == '-') {
        ++cur.pos;
        int mag = 0;
        if (!std::isdigit(static_cast<unsigned char>(cur.raw_peek())))
          cur.fail("expected digits after charge sign");
        while (std::isdigit(static_cast<unsigned char>(cur.raw_peek())))
          mag = mag * 10 + (cur.text[cur.pos++] - '0');
        a.charge = c == '+' ? mag : -mag;
      } else if (c == 'H' || c == 'h') {
        ++cur.pos;
        if (!std::isdigit(static_cast<unsigned char>(cur.raw_peek())))
          cur.fail("expected digits after 'h'");
        int n = 0;
        while (std::isdigit(static_cast<unsigned char>(cur.raw_peek())))
          n = n * 10 + (cur.text[cur.pos++] - '0');
        if (cur.raw_peek() == '+') ++cur.pos;
        a.min_h = n;
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        std::string word;
        while (std::isalpha(static_cast<unsigned char>(cur.raw_peek())))
          word += cur.text[cur.pos++];
        if (word == "ar") {
          a.aromatic = true;
        } else if (word == "al") {
          a.aromatic = false;
        } else if (word == "ring") {
          a.in_ring = true;
        } else if (word == "deg") {
          if (cur.raw_peek() != '<') cur.fail("expected '<=' after 'deg'");
          ++cur.pos;
          if (cur.raw_peek() != '=') cur.fail("expected '<=' after 'deg'");
          ++cur.pos;
          if (!std::isdigit(static_cast<unsigned char>(cur.raw_peek())))
            cur.fail("expected digits after 'deg<='");
          int n = 0;
          while (std::isdigit(static_cast<unsigned char>(cur.raw_peek())))
            n = n * 10 + (cur.text[cur.pos++] - '0');
          a.max_degree = n;
        } else {
          cur.fail("unknown pattern constraint '" + word + "'");
        }
      } else {
        cur.fail("malformed pattern constraint");
      }
    }
    if (cur.raw_peek() != ':') cur.fail("expected ':' before slot label");
    ++cur.pos;
    if (!std::isdigit(static_cast<unsigned char>(cur.raw_peek())))
      cur.fail("expected slot number");
    int slot = 0;
    while (std::isdigit(static_cast<unsigned char>(cur.raw_peek())))
      slot = slot * 10 + (cur.text[cur.pos++] - '0');
    if (slot <= 0) cur.fail("slot labels must be positive");
    a.slot = slot;
    if (cur.raw_peek() != ']') cur.fail("expected ']' closing pattern atom");
    ++cur.pos;
    for (const PatternAtom& prev : graph.atoms)
      if (prev.slot == slot) cur.fail("duplicate slot label " + std::to_string(slot));
    graph.atoms.push_back(a);
    return a;
  }

  // '#' doubles as the comment lead and the triple bond; inside a chain it is
  // a bond only when an atom expression follows immediately.
  bool at_triple_bond() const {
    return cur.raw_peek() == '#' && cur.pos + 1 < cur.text.size() &&
           cur.text[cur.pos + 1] == '[';
  }

  void parse_chain(int prev_slot) {
    while (true) {
      cur.skip_spaces();
      char c = cur.raw_peek();
      if (c == '#' && !at_triple_bond()) return;
      if (c == '(') {
        ++cur.pos;
        cur.skip_ws();
        char bc = cur.raw_peek();
        if (!is_bond_char(bc)) cur.fail("expected bond symbol after '('");
        ++cur.pos;
        PatternAtom a = parse_atomexpr();
        graph.bonds.push_back({prev_slot, a.slot, bond_from_char(bc)});
        parse_chain(a.slot);
        cur.skip_ws();
        if (cur.raw_peek() != ')') cur.fail("expected ')' closing pattern branch");
        ++cur.pos;
      } else if (is_bond_char(c)) {
        ++cur.pos;
        PatternAtom a = parse_atomexpr();
        graph.bonds.push_back({prev_slot, a.slot, bond_from_char(c)});
        prev_slot = a.slot;
      } else {
        return;
      }
    }
  }

  PatternGraph parse_pattern() {
    while (true) {
      PatternAtom first = parse_atomexpr();
      parse_chain(first.slot);
      ++component;
      cur.skip_ws();
      if (cur.raw_peek() == '.') {
        ++cur.pos;
        continue;
      }
      break;
    }
    graph.n_components = component;
    return graph;
  }
};

inline PatternGraph parse_pattern(Cursor& cur) {
  PatternParser p{cur, {}, 0};
  return p.parse_pattern();
}

inline EditOp parse_edit(Cursor& cur, const PatternGraph& pattern) {
  std::string name = cur.peek_word();
  if (name.empty()) cur.fail("expected edit name");
  cur.pos += name.size();
  cur.expect('(');
  auto slot_arg = [&]() {
    cur.skip_ws();
    if (cur.raw_peek() != ':') cur.fail("expected ':' before slot reference");
    ++cur.pos;
    int slot = cur.parse_int();
    if (!pattern.find_slot(slot))
      cur.fail("edit references undeclared slot " + std::to_string(slot));
    return slot;
  };
  auto order_arg = [&]() {
    std::string w = cur.peek_word();
    cur.pos += w.size();
    if (w == "single") return BondOrder::Single;
    if (w == "double") return BondOrder::Double;
    if (w == "triple") return BondOrder::Triple;
    if (w == "aromatic") return BondOrder::Aromatic;
    cur.fail("expected bond order (single|double|triple|aromatic)");
  };
  EditOp op;
  if (name == "make_bond") {
    op.kind = EditOp::Kind::MakeBond;
    op.slot_a = slot_arg();
    cur.expect(',');
    op.slot_b = slot_arg();
    cur.expect(',');
    op.order = order_arg();
  } else if (name == "break_bond") {
    op.kind = EditOp::Kind::BreakBond;
    op.slot_a = slot_arg();
    cur.expect(',');
    op.slot_b = slot_arg();
  } else if (name == "set_order") {
    op.kind = EditOp::Kind::SetOrder;
    op.slot_a = slot_arg();
    cur.expect(',');
    op.slot_b = slot_arg();
    cur.expect(',');
    op.order = order_arg();
  } else if (name == "delta_h") {
    op.kind = EditOp::Kind::DeltaH;
    op.slot_a = slot_arg();
    cur.expect(',');
    op.amount = cur.parse_int();
    if (op.amount == 0) cur.fail("delta_h amount must be nonzero");
  } else if (name == "delta_charge") {
    op.kind = EditOp::Kind::DeltaCharge;
    op.slot_a = slot_arg();
    cur.expect(',');
    op.amount = cur.parse_int();
    if (op.amount == 0) cur.fail("delta_charge amount must be nonzero");
  } else if (name == "set_aromatic") {
    op.kind = EditOp::Kind::SetAromatic;
    op.slot_a = slot_arg();
    cur.expect(',');
    std::string w = cur.peek_word();
    cur.pos += w.size();
    if (w == "true") op.flag = true;
    else if (w == "false") op.flag = false;
    else cur.fail("expected true|false");
  } else {
    cur.fail("unknown edit '" + name + "'");
  }
  cur.expect(')');
  return op;
}

} // namespace pack_detail

// Parses the template DSL. Throws PackError with line/column on syntax
// errors, duplicate template ids, dangling slot references, unknown elements,
// or non-consecutive step indices.
inline std::vector<ReactionClassDef> parse_pack(std::string_view text) {
  using pack_detail::Cursor;
  Cursor cur{text};
  std::vector<ReactionClassDef> classes;
  std::set<std::string> seen_ids;

  while (!cur.done()) {
    cur.expect_keyword("class");
    ReactionClassDef cls;
    cls.class_name = cur.parse_string();
    cur.expect('{');
    while (cur.peek() != '}') {
      cur.expect_keyword("condition");
      ConditionDef cond;
      cond.condition_name = cur.parse_string();
      cur.expect('{');
      if (cur.try_keyword("agents")) {
        cur.expect(':');
        if (!cur.try_keyword("none")) {
          while (true) {
            cond.required_agents.push_back(pack_detail::parse_pattern(cur));
            if (!cur.try_consume(',')) break;
          }
        }
      }
      while (cur.try_keyword("distinct_molecules")) cond.distinct_molecules = true;
      while (cur.peek() != '}') {
        cur.expect_keyword("step");
        ElementaryTemplate t;
        t.class_name = cls.class_name;
        t.condition_name = cond.condition_name;
        t.step_index = cur.parse_int();
        t.step_name = cur.parse_string();
        if (cur.try_keyword("proton_implicit")) {
          cur.expect('(');
          int v = cur.parse_int();
          if (v != 1 && v != -1) cur.fail("proton_implicit must be +1 or -1");
          t.proton_implicit = v;
          cur.expect(')');
        }
        cur.expect('{');
        cur.expect_keyword("pattern");
        cur.expect(':');
        t.pattern = pack_detail::parse_pattern(cur);
        cur.expect_keyword("edits");
        cur.expect(':');
        while (true) {
          t.edits.push_back(pack_detail::parse_edit(cur, t.pattern));
          if (!cur.try_consume(',')) break;
        }
        cur.expect('}');
        t.id = cls.class_name + "/" + cond.condition_name + "/" + std::to_string(t.step_index);
        t.required_agents = cond.required_agents;
        t.distinct_molecules = cond.distinct_molecules;
        if (!seen_ids.insert(t.id).second) cur.fail("duplicate template id '" + t.id + "'");
        int expected = static_cast<int>(cond.steps.size()) + 1;
        if (t.step_index != expected)
          cur.fail("step indices must be consecutive from 1 (got " +
                   std::to_string(t.step_index) + ", expected " + std::to_string(expected) + ")");
        cond.steps.push_back(std::move(t));
      }
      if (cond.steps.empty()) cur.fail("condition requires at least one step");
      cur.expect('}');
      cls.conditions.push_back(std::move(cond));
    }
    cur.expect('}');
    classes.push_back(std::move(cls));
  }
  return classes;
}

// Diagnostics, not exceptions: authoring errors that make a template violate
// the engine's charge/hydrogen ledger, plus lossy-edit warnings.
inline std::vector<Diagnostic> validate_template(const ElementaryTemplate& t) {
  std::vector<Diagnostic> out;
  if (t.is_termination) return out;

  int net_charge = 0;
  int net_h = 0;
  for (const EditOp& e : t.edits) {
    if (e.kind == EditOp::Kind::DeltaCharge) net_charge += e.amount;
    if (e.kind == EditOp::Kind::DeltaH) {
      net_h += e.amount;
      if (e.amount < 0) {
        const PatternAtom* a = t.pattern.find_slot(e.slot_a);
        if (a && (!a->min_h || *a->min_h < -e.amount)) {
          out.push_back({Diagnostic::Severity::Warning, t.id,
                         "delta_h(:" + std::to_string(e.slot_a) + "," +
                             std::to_string(e.amount) +
                             ") may drive implicit_h below 0; add a min-h constraint"});
        }
      }
    }
  }
  if (net_charge > 1 || net_charge < -1) {
    out.push_back({Diagnostic::Severity::Error, t.id,
                   "|net charge| > 1 (net " + std::to_string(net_charge) + ")"});
  }
  if (t.proton_implicit == 0 && net_charge != 0) {
    out.push_back({Diagnostic::Severity::Error, t.id,
                   "uncompensated net charge " + std::to_string(net_charge) +
                       " on a template with proton_implicit == 0"});
  }
  if (t.proton_implicit != 0) {
    if (net_charge != t.proton_implicit)
      out.push_back({Diagnostic::Severity::Error, t.id,
                     "net charge change must equal proton_implicit"});
    if (net_h != t.proton_implicit)
      out.push_back({Diagnostic::Severity::Error, t.id,
                     "net implicit-h change must equal proton_implicit"});
  }
  return out;
}

inline std::vector<Diagnostic> validate_pack(const std::vector<ReactionClassDef>& pack) {
  std::vector<Diagnostic> out;
  for (const auto& cls : pack)
    for (const auto& cond : cls.conditions)
      for (const auto& t : cond.steps) {
        auto d = validate_template(t);
        out.insert(out.end(), d.begin(), d.end());
      }
  return out;
}

namespace pack_detail {

inline std::string print_atom(const PatternAtom& a) {
  std::string out = "[";
  if (a.element_set.empty()) {
    out += "*";
  } else {
    for (size_t i = 0; i < a.element_set.size(); ++i) {
      if (i) out += ",";
      out += a.element_set[i];
    }
  }
  if (a.charge) out += ";" + std::string(*a.charge >= 0 ? "+" : "-") + std::to_string(std::abs(*a.charge));
  if (a.min_h) out += ";h" + std::to_string(*a.min_h);
  if (a.aromatic) out += *a.aromatic ? ";ar" : ";al";
  if (a.in_ring && *a.in_ring) out += ";ring";
  if (a.max_degree) out += ";deg<=" + std::to_string(*a.max_degree);
  out += ":" + std::to_string(a.slot) + "]";
  return out;
}

inline char bond_char(std::optional<BondOrder> o) {
  if (!o) return '~';
  switch (*o) {
  case BondOrder::Single: return '-';
  case BondOrder::Double: return '=';
  case BondOrder::Triple: return '#';
  case BondOrder::Aromatic: return ':';
  }
  return '-';
}

// Re-linearizes a pattern graph component as chain+branches rooted at its
// first declared atom.
inline std::string print_pattern(const PatternGraph& g) {
  std::string out;
  std::set<int> emitted;
  auto neighbors = [&](int slot) {
    std::vector<std::pair<int, std::optional<BondOrder>>> nbr;
    for (const PatternBond& b : g.bonds) {
      if (b.slot_a == slot) nbr.emplace_back(b.slot_b, b.order);
      else if (b.slot_b == slot) nbr.emplace_back(b.slot_a, b.order);
    }
    return nbr;
  };
  std::function<void(int)> emit = [&](int slot) {
    emitted.insert(slot);
    out += print_atom(*g.find_slot(slot));
    std::vector<std::pair<int, std::optional<BondOrder>>> todo;
    for (auto& [to, order] : neighbors(slot))
      if (!emitted.count(to)) todo.emplace_back(to, order);
    for (size_t i = 0; i < todo.size(); ++i) {
      if (emitted.count(todo[i].first)) continue;
      bool last = true;
      for (size_t j = i + 1; j < todo.size(); ++j)
        if (!emitted.count(todo[j].first)) last = false;
      if (!last) {
        out += "(";
        out += bond_char(todo[i].second);
        emit(todo[i].first);
        out += ")";
      } else {
        out += bond_char(todo[i].second);
        emit(todo[i].first);
      }
    }
  };
  bool first_component = true;
  for (const PatternAtom& a : g.atoms) {
    if (emitted.count(a.slot)) continue;
    if (!first_component) out += ".";
    first_component = false;
    emit(a.slot);
  }
  return out;
}

inline std::string print_edit(const EditOp& e) {
  auto slot = [](int s) { return ":" + std::to_string(s); };
  auto order = [](BondOrder o) -> std::string {
    switch (o) {
    case BondOrder::Single: return "single";
    case BondOrder::Double: return "double";
    case BondOrder::Triple: return "triple";
    case BondOrder::Aromatic: return "aromatic";
    }
    return "single";
  };
  switch (e.kind) {
  case EditOp::Kind::MakeBond:
    return "make_bond(" + slot(e.slot_a) + "," + slot(e.slot_b) + "," + order(e.order) + ")";
  case EditOp::Kind::BreakBond:
    return "break_bond(" + slot(e.slot_a) + "," + slot(e.slot_b) + ")";
  case EditOp::Kind::SetOrder:
    return "set_order(" + slot(e.slot_a) + "," + slot(e.slot_b) + "," + order(e.order) + ")";
  case EditOp::Kind::DeltaH:
    return "delta_h(" + slot(e.slot_a) + "," + (e.amount > 0 ? "+" : "") +
           std::to_string(e.amount) + ")";
  case EditOp::Kind::DeltaCharge:
    return "delta_charge(" + slot(e.slot_a) + "," + (e.amount > 0 ? "+" : "") +
           std::to_string(e.amount) + ")";
  case EditOp::Kind::SetAromatic:
    return "set_aromatic(" + slot(e.slot_a) + "," + (e.flag ? "true" : "false") + ")";
  }
  return "";
}

} // namespace pack_detail

// Inverse serializer; parse_pack(print_pack(defs)) == defs.
inline std::string print_pack(const std::vector<ReactionClassDef>& pack) {
  std::string out;
  for (const auto& cls : pack) {
    out += "class \"" + cls.class_name + "\" {\n";
    for (const auto& cond : cls.conditions) {
      out += "  condition \"" + cond.condition_name + "\" {\n";
      out += "    agents:";
      if (cond.required_agents.empty()) {
        out += " none\n";
      } else {
        for (size_t i = 0; i < cond.required_agents.size(); ++i) {
          out += i ? ", " : " ";
          out += pack_detail::print_pattern(cond.required_agents[i]);
        }
        out += "\n";
      }
      if (cond.distinct_molecules) out += "    distinct_molecules\n";
      for (const auto& t : cond.steps) {
        out += "    step " + std::to_string(t.step_index) + " \"" + t.step_name + "\"";
        if (t.proton_implicit != 0)
          out += std::string(" proton_implicit(") + (t.proton_implicit > 0 ? "+1" : "-1") + ")";
        out += " {\n";
        out += "      pattern: " + pack_detail::print_pattern(t.pattern) + "\n";
        out += "      edits: ";
        for (size_t i = 0; i < t.edits.size(); ++i) {
          if (i) out += ", ";
          out += pack_detail::print_edit(t.edits[i]);
        }
        out += "\n    }\n";
      }
      out += "  }\n";
    }
    out += "}\n";
  }
  return out;
}

inline const ReactionClassDef* find_class(const std::vector<ReactionClassDef>& pack,
                                          std::string_view name) {
  for (const auto& cls : pack)
    if (cls.class_name == name) return &cls;
  return nullptr;
}

} // namespace mechkit

#endif // MECHKIT_PACK_HPP
