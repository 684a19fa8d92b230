//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_ELEMENTS_HPP
#define MECHKIT_ELEMENTS_HPP

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mechkit {

namespace detail {

inline const std::vector<std::string>& element_symbols() {
  static const std::vector<std::string> kSymbols = {
      "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
      "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
      "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
      "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
      "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
      "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
      "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
      "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu"};
  return kSymbols;
}

} // namespace detail

inline bool is_valid_element(std::string_view symbol) {
  static const std::unordered_map<std::string, bool> kTable = [] {
    std::unordered_map<std::string, bool> t;
    for (const auto& s : detail::element_symbols()) t.emplace(s, true);
    return t;
  }();
  return kTable.count(std::string(symbol)) != 0;
}

// Organic-subset elements may appear outside brackets in SMILES.
inline bool in_organic_subset(std::string_view symbol) {
  return symbol == "B" || symbol == "C" || symbol == "N" || symbol == "O" ||
         symbol == "P" || symbol == "S" || symbol == "F" || symbol == "Cl" ||
         symbol == "Br" || symbol == "I";
}

// Elements that may carry the aromatic (lowercase) flag in this subset.
inline bool aromatic_capable(std::string_view symbol) {
  return symbol == "B" || symbol == "C" || symbol == "N" || symbol == "O" ||
         symbol == "P" || symbol == "S";
}

// Standard SMILES default valence lists used for implicit-hydrogen filling.
// Empty list means no implicit hydrogens are ever assigned (metals etc.).
inline const std::vector<int>& default_valences(std::string_view symbol) {
  static const std::unordered_map<std::string, std::vector<int>> kValence = {
      {"B", {3}},        {"C", {4}}, {"N", {3, 5}}, {"O", {2}},
      {"P", {3, 5}},     {"S", {2, 4, 6}},          {"F", {1}},
      {"Cl", {1}},       {"Br", {1}},               {"I", {1}}};
  static const std::vector<int> kNone;
  auto it = kValence.find(std::string(symbol));
  return it == kValence.end() ? kNone : it->second;
}

} // namespace mechkit

#endif // MECHKIT_ELEMENTS_HPP
