//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mechkit/state.hpp"
#include "test_util.hpp"

using namespace mechkit;

TEST_CASE("state_key ignores molecule order") {
  StateBag a = state_from_smiles({"CCO", "[Na+].[Br-]"});
  StateBag b = state_from_smiles({"[Br-]", "[Na+]", "OCC"});
  CHECK(state_key(a) == state_key(b));
}

TEST_CASE("state_key respects multiplicity") {
  StateBag one = state_from_smiles({"CCO"});
  StateBag two = state_from_smiles({"CCO", "CCO"});
  CHECK(state_key(one) != state_key(two));
}

TEST_CASE("state_key is stable across 100 shuffles of molecules and atoms") {
  std::vector<std::string> mols = {"CCO", "CN", "c1ccccc1Br", "[OH-]", "CC(=O)OC"};
  std::string expected = state_key(state_from_smiles(mols));
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> shuffled = mols;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    // shuffle atom order too, by round-tripping through a permuted write
    std::vector<Molecule> parsed;
    for (const auto& s : shuffled) {
      Molecule m = parse_smiles(s);
      std::vector<int> perm(m.atoms.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Molecule p;
      p.atoms.resize(m.atoms.size());
      for (size_t i = 0; i < m.atoms.size(); ++i) p.atoms[perm[i]] = m.atoms[i];
      for (const Bond& b : m.bonds) p.bonds.push_back({perm[b.a], perm[b.b], b.order});
      parsed.push_back(std::move(p));
    }
    CHECK(state_key(make_state(std::move(parsed))) == expected);
  }
}

TEST_CASE("heavy_atom_census sums per element") {
  auto census = heavy_atom_census(state_from_smiles({"CCO"}));
  CHECK(census == std::map<std::string, int>{{"C", 2}, {"O", 1}});

  auto empty = heavy_atom_census(StateBag{});
  CHECK(empty.empty());

  auto multi = heavy_atom_census(state_from_smiles({"CN", "CCBr"}));
  CHECK(multi == std::map<std::string, int>{{"Br", 1}, {"C", 3}, {"N", 1}});
}

TEST_CASE("heavy_atom_census is additive over multiset union") {
  std::vector<std::string> left = {"CCO", "c1ccccc1"};
  std::vector<std::string> right = {"CN", "[OH-]", "CC(=O)Cl"};
  auto a = heavy_atom_census(state_from_smiles(left));
  auto b = heavy_atom_census(state_from_smiles(right));
  std::vector<std::string> both = left;
  both.insert(both.end(), right.begin(), right.end());
  auto sum = heavy_atom_census(state_from_smiles(both));
  for (auto& [elem, count] : b) a[elem] += count;
  CHECK(a == sum);
}

TEST_CASE("contains_all respects multiplicity and allows extras") {
  StateBag bag = state_from_smiles({"CCO", "CCO", "[Cl-]"});
  std::string ethanol = testutil::canon("CCO");
  CHECK(contains_all(bag, {ethanol}));
  CHECK(contains_all(bag, {ethanol, ethanol}));
  CHECK_FALSE(contains_all(bag, {ethanol, ethanol, ethanol}));
  CHECK(contains_all(bag, {}));
}
