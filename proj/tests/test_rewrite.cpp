//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>

#include "mechkit/rewrite.hpp"
#include "test_util.hpp"

using namespace mechkit;

namespace {

const ElementaryTemplate& nalk_step(int i) {
  return testutil::find_template("Bromo N-alkylation/Reaction/" + std::to_string(i));
}

StateBag apply_unique(const ElementaryTemplate& t, const StateBag& s) {
  auto apps = enumerate_applications(t, s);
  REQUIRE(apps.size() == 1);
  return apps[0].successor;
}

} // namespace

TEST_CASE("N-alkylation step 1 produces the ammonium/bromide pair") {
  StateBag root = state_from_smiles({"CN", "CCBr"});
  StateBag next = apply_unique(nalk_step(1), root);
  CHECK(state_key(next) == state_key(state_from_smiles({"C[NH2+]CC", "[Br-]"})));
  CHECK(heavy_atom_census(next) == heavy_atom_census(root));
  CHECK(total_charge(next) == total_charge(root));
}

TEST_CASE("N-alkylation step 2 deprotonates to the amine product") {
  StateBag mid = state_from_smiles({"C[NH2+]CC", "[Br-]"});
  StateBag next = apply_unique(nalk_step(2), mid);
  CHECK(state_key(next) == state_key(state_from_smiles({"CNCC", "[Br-]"})));
  // proton-implicit bookkeeping: one H and one positive charge leave together
  CHECK(total_charge(next) == total_charge(mid) - 1);
  CHECK(total_implicit_h(next) == total_implicit_h(mid) - 1);
}

TEST_CASE("termination template returns the identical state") {
  auto stop = make_termination_template();
  StateBag s = state_from_smiles({"CCO", "[Br-]"});
  auto apps = enumerate_applications(stop, s);
  REQUIRE(apps.size() == 1);
  CHECK(state_key(apps[0].successor) == state_key(s));
}

TEST_CASE("apply splits and merges molecules through bond edits") {
  // intramolecular N-alkylation closes a ring
  StateBag s = state_from_smiles({"NCCCCBr"});
  StateBag next = apply_unique(nalk_step(1), s);
  REQUIRE(next.size() == 2); // pyrrolidinium + bromide
  CHECK(state_key(next) == state_key(state_from_smiles({"[NH2+]1CCCC1", "[Br-]"})));
}

TEST_CASE("EditFault on a template that breaks a nonexistent bond") {
  ElementaryTemplate bad;
  bad.id = "bad/x/1";
  bad.pattern.atoms.push_back({1, {"C"}, {}, {}, {}, {}, {}, 0});
  bad.pattern.atoms.push_back({2, {"C"}, {}, {}, {}, {}, {}, 0});
  bad.pattern.n_components = 1; // two atoms, no pattern bond: any C pair
  bad.edits.push_back({EditOp::Kind::BreakBond, 1, 2, BondOrder::Single, 0, false});
  StateBag s = state_from_smiles({"CC(C)C"});
  auto matches = find_matches(bad.pattern, s);
  REQUIRE(!matches.empty());
  bool faulted = false;
  for (const Embedding& e : matches) {
    try {
      apply(bad, s, e);
    } catch (const EditFault&) {
      faulted = true;
    }
  }
  CHECK(faulted);
}

TEST_CASE("EditFault when delta_h would drive implicit_h negative") {
  ElementaryTemplate bad;
  bad.id = "bad/h/1";
  bad.pattern.atoms.push_back({1, {"O"}, {}, {}, {}, {}, {}, 0});
  bad.pattern.n_components = 1;
  bad.edits.push_back({EditOp::Kind::DeltaH, 1, 0, BondOrder::Single, -1, false});
  StateBag s = state_from_smiles({"COC"}); // ether oxygen has no H
  auto matches = find_matches(bad.pattern, s);
  REQUIRE(matches.size() == 1);
  CHECK_THROWS_AS(apply(bad, s, matches[0]), EditFault);
}

TEST_CASE("EditFault when make_bond hits an existing bond") {
  ElementaryTemplate bad;
  bad.id = "bad/mb/1";
  bad.pattern.atoms.push_back({1, {"C"}, {}, {}, {}, {}, {}, 0});
  bad.pattern.atoms.push_back({2, {"O"}, {}, {}, {}, {}, {}, 0});
  bad.pattern.bonds.push_back({1, 2, BondOrder::Single});
  bad.pattern.n_components = 1;
  bad.edits.push_back({EditOp::Kind::MakeBond, 1, 2, BondOrder::Single, 0, false});
  StateBag s = state_from_smiles({"CO"});
  auto matches = find_matches(bad.pattern, s);
  REQUIRE(matches.size() == 1);
  CHECK_THROWS_AS(apply(bad, s, matches[0]), EditFault);
}

TEST_CASE("required agents gate application") {
  const auto& hydrox = testutil::find_template("Ester hydrolysis/Deprotection with OH-/1");
  StateBag with = state_from_smiles({"CC(=O)OC", "[OH-]"});
  StateBag without = state_from_smiles({"CC(=O)OC"});
  CHECK(check_required_agents(hydrox, with));
  CHECK_FALSE(check_required_agents(hydrox, without));
  CHECK(enumerate_applications(hydrox, with).size() == 1);
  CHECK(enumerate_applications(hydrox, without).empty());

  const auto& no_agents = nalk_step(1);
  CHECK(check_required_agents(no_agents, without)); // agents: none is always satisfied
}

TEST_CASE("two distinguishable aromatic addition sites give two successors") {
  const auto& addition = testutil::find_template(
      "SNAr ether synthesis/reaction with alcohol group/2");
  StateBag s = state_from_smiles({"CC[O-]", "Fc1ccc(F)cc1"});
  auto apps = enumerate_applications(addition, s);
  // six embeddings collapse onto the two symmetry-distinct ring positions
  CHECK(find_matches(addition.pattern, s).size() == 6);
  CHECK(apps.size() == 2);
  for (size_t i = 1; i < apps.size(); ++i)
    CHECK(apps[i - 1].successor.key < apps[i].successor.key);
}

TEST_CASE("conservation ledger holds for every pack template on desk states") {
  std::vector<StateBag> states = {
      state_from_smiles({"CO", "N#Cc1ccccc1Cl"}),
      state_from_smiles({"CC[O-]", "Fc1ccc(F)cc1"}),
      state_from_smiles({"CN", "CCBr"}),
      state_from_smiles({"C[NH2+]CC", "[Br-]"}),
      state_from_smiles({"CC(=O)OC", "[OH-]"}),
      state_from_smiles({"CC(O)([O-])OC"}),
      state_from_smiles({"CN", "CC(=O)Cl"}),
      state_from_smiles({"CC(Cl)([O-])[NH2+]C"}),
      state_from_smiles({"C=P(c1ccccc1)(c1ccccc1)c1ccccc1", "CC(C)=O"}),
      state_from_smiles({"CN", "COS(C)(=O)=O"}),
      state_from_smiles({"CC[O-]", "CBr"}),
  };
  long applications = 0;
  for (const auto& cls : testutil::starter_pack()) {
    for (const auto& cond : cls.conditions) {
      for (const auto& t : cond.steps) {
        for (const auto& s : states) {
          for (const auto& app : enumerate_applications(t, s, /*gate_on_agents=*/false)) {
            ++applications;
            CHECK(heavy_atom_census(app.successor) == heavy_atom_census(s));
            int dq = total_charge(app.successor) - total_charge(s);
            int dh = total_implicit_h(app.successor) - total_implicit_h(s);
            CHECK(dq == t.proton_implicit);
            CHECK(dh == t.proton_implicit);
          }
        }
      }
    }
  }
  CHECK(applications >= 25);
}

TEST_CASE("enumeration output is identical across repeated calls") {
  const auto& addition = testutil::find_template(
      "SNAr ether synthesis/reaction with alcohol group/2");
  StateBag s = state_from_smiles({"C[O-]", "N#Cc1ccccc1Cl"});
  auto a = enumerate_applications(addition, s);
  auto b = enumerate_applications(addition, s);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].successor.key == b[i].successor.key);
    CHECK(a[i].embedding.signature() == b[i].embedding.signature());
  }
}
