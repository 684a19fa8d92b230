//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <random>

#include "mechkit/beam.hpp"
#include "mechkit/dataset.hpp"
#include "test_util.hpp"

using namespace mechkit;

namespace {

// Synthetic ranker over an explicit graph of small molecules; candidate order
// is the authored rank order, stop closes the list unless marked terminal.
class GraphRanker : public StepRanker {
public:
  struct Entry {
    std::vector<std::string> next; // SMILES in rank order
    bool terminal = false;         // stop is rank 1 here
  };

  std::map<std::string, Entry> graph; // key: state key
  mutable std::map<std::string, int> calls;

  static StateBag node(const std::string& smi) { return state_from_smiles({smi}); }

  void add(const std::string& state, std::vector<std::string> next, bool terminal = false) {
    graph[node(state).key] = {std::move(next), terminal};
  }

  std::vector<RankedCandidate> rank(const StateBag& state) override {
    ++calls[state.key];
    std::vector<RankedCandidate> out;
    auto it = graph.find(state.key);
    RankedCandidate stop;
    stop.state = state;
    stop.is_stop = true;
    if (it == graph.end() || it->second.terminal) {
      out.push_back(stop);
      if (it != graph.end())
        for (const auto& smi : it->second.next) {
          RankedCandidate c;
          c.state = node(smi);
          out.push_back(std::move(c));
        }
    } else {
      for (const auto& smi : it->second.next) {
        RankedCandidate c;
        c.state = node(smi);
        out.push_back(std::move(c));
      }
      out.push_back(stop);
    }
    double score = 0.5;
    for (auto& c : out) {
      c.score = score;
      score /= 2;
    }
    for (size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
    return out;
  }

  std::string name() const override { return "graph"; }
};

// Exhaustive simple-path enumeration: every root->stop prediction sequence,
// scored with the same discounted-rank objective the beam uses.
struct Exhaustive {
  GraphRanker& ranker;
  double gamma;
  int max_depth;

  struct Result {
    std::string final_key;
    std::vector<int> ranks;
    double objective;
  };
  std::vector<Result> results;

  void run(const StateBag& root) {
    std::set<std::string> on_path{root.key};
    std::vector<int> ranks;
    walk(root, 0, on_path, ranks);
    std::sort(results.begin(), results.end(), [](const Result& a, const Result& b) {
      if (a.objective != b.objective) return a.objective < b.objective;
      return a.final_key < b.final_key;
    });
  }

  void walk(const StateBag& state, int depth, std::set<std::string>& on_path,
            std::vector<int>& ranks) {
    if (depth > max_depth) return;
    auto cands = ranker.rank(state);
    for (const auto& c : cands) {
      if (c.is_stop) {
        ranks.push_back(c.rank);
        results.push_back({state.key, ranks, discounted_rank(ranks, gamma)});
        ranks.pop_back();
        continue;
      }
      if (on_path.count(c.state.key)) continue;
      on_path.insert(c.state.key);
      ranks.push_back(c.rank);
      walk(c.state, depth + 1, on_path, ranks);
      ranks.pop_back();
      on_path.erase(c.state.key);
    }
  }
};

} // namespace

TEST_CASE("discounted rank matches the closed-form checks") {
  CHECK(discounted_rank({1, 2}, 0.5) == Catch::Approx(2.0).margin(1e-12));
  CHECK(discounted_rank({1, 1, 1}, 0.5) == Catch::Approx(1.75).margin(1e-12));
  CHECK(discounted_rank({}, 0.5) == 0.0);
  CHECK(discounted_rank({3}, 0.25) == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("appending a step strictly increases the accumulated rank") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    int len = 1 + static_cast<int>(rng() % 6);
    std::vector<int> ranks;
    for (int i = 0; i < len; ++i) ranks.push_back(1 + static_cast<int>(rng() % 9));
    double gamma = 0.1 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    std::vector<int> extended = ranks;
    extended.push_back(1 + static_cast<int>(rng() % 9));
    CHECK(discounted_rank(extended, gamma) > discounted_rank(ranks, gamma));
  }
}

TEST_CASE("reverse-step pruning: A<->B with product C") {
  GraphRanker ranker;
  ranker.add("C", {"N"});            // A: rank-1 candidate is B
  ranker.add("N", {"C", "O"});       // B: rank 1 back to A, rank 2 to C
  ranker.add("O", {}, true);         // C: terminal
  StateBag root = GraphRanker::node("C");

  BeamConfig cfg;
  cfg.beam_width = 2;
  cfg.mode = BeamMode::Rank;
  auto finals = beam_search(root, ranker, cfg);
  REQUIRE(!finals.empty());
  bool found_c = false;
  for (const auto& f : finals) found_c = found_c || f.state.key == GraphRanker::node("O").key;
  CHECK(found_c);
  // A was ranked once at the root and never re-expanded from B
  CHECK(ranker.calls[GraphRanker::node("C").key] == 1);
}

TEST_CASE("stop semantics: the final step re-selects the current state") {
  GraphRanker ranker;
  ranker.add("C", {"N"});
  ranker.add("N", {}, true);
  auto finals = beam_search(GraphRanker::node("C"), ranker, {});
  REQUIRE(!finals.empty());
  const BeamFinal& best = finals.front();
  CHECK(best.state.key == GraphRanker::node("N").key);
  REQUIRE(!best.steps.empty());
  CHECK(best.steps.back().via == "stop");
  CHECK(best.steps.back().state_key == best.state.key);
  CHECK(best.objective ==
        Catch::Approx(discounted_rank(best.ranks, 0.5)).margin(1e-12));
}

TEST_CASE("beam equals exhaustive enumeration on a 30-node synthetic network") {
  // layered graph: 30 states, 3 candidate edges per node, varying ranks
  GraphRanker ranker;
  std::vector<std::string> names; // linear alkanes: 30 distinct states
  for (int i = 1; i <= 30; ++i) names.push_back(std::string(i, 'C'));
  std::mt19937 rng(1234);
  for (int i = 0; i < 30; ++i) {
    std::vector<std::string> next;
    for (int k = 1; k <= 3; ++k) {
      int j = i + 2 * k + static_cast<int>(rng() % 4);
      if (j < 30 && j > i) next.push_back(names[j]);
    }
    bool terminal = next.empty() || (i > 0 && i % 4 == 0);
    ranker.add(names[i], next, terminal);
  }

  BeamConfig cfg;
  cfg.beam_width = 1000000; // effectively infinite
  cfg.gamma = 0.5;
  cfg.max_depth = 10;
  cfg.mode = BeamMode::Rank;
  auto finals = beam_search(GraphRanker::node(names[0]), ranker, cfg);

  Exhaustive ex{ranker, cfg.gamma, cfg.max_depth};
  ex.run(GraphRanker::node(names[0]));

  REQUIRE(!finals.empty());
  REQUIRE(!ex.results.empty());
  CHECK(finals.front().objective == Catch::Approx(ex.results.front().objective).margin(1e-12));
  CHECK(finals.front().state.key == ex.results.front().final_key);
  // the full beam agrees with the exhaustive ordering
  REQUIRE(finals.size() <= ex.results.size());
  for (size_t i = 0; i < finals.size(); ++i)
    CHECK(finals[i].objective == Catch::Approx(ex.results[i].objective).margin(1e-12));
}

TEST_CASE("prob mode orders by accumulated log score") {
  GraphRanker ranker;
  ranker.add("C", {"N", "O"});
  ranker.add("N", {}, true);
  ranker.add("O", {}, true);
  BeamConfig cfg;
  cfg.mode = BeamMode::Prob;
  auto finals = beam_search(GraphRanker::node("C"), ranker, cfg);
  REQUIRE(finals.size() >= 2);
  // higher accumulated probability first
  CHECK(finals.front().objective >= finals.back().objective);
  CHECK(finals.front().state.key == GraphRanker::node("N").key);
}

TEST_CASE("beam output is deterministic") {
  GraphRanker ranker;
  ranker.add("C", {"N", "O", "CC"});
  ranker.add("N", {"CC"});
  ranker.add("O", {"CC"});
  ranker.add("CC", {}, true);
  auto a = beam_search(GraphRanker::node("C"), ranker, {});
  auto b = beam_search(GraphRanker::node("C"), ranker, {});
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].state.key == b[i].state.key);
    CHECK(a[i].objective == b[i].objective);
    CHECK(a[i].ranks == b[i].ranks);
  }
}

TEST_CASE("unfinished nodes at max_depth are failures, not results") {
  GraphRanker ranker;
  // infinite corridor with no terminal state and stop always last
  ranker.add("C", {"N"});
  ranker.add("N", {"O"});
  ranker.add("O", {"CC"});
  ranker.add("CC", {"CN"});
  ranker.add("CN", {"CO"});
  ranker.add("CO", {"CCC"});
  BeamConfig cfg;
  cfg.max_depth = 3;
  cfg.beam_width = 1;
  auto finals = beam_search(GraphRanker::node("C"), ranker, cfg);
  // every state still offers a stop candidate, so finals exist, but none
  // deeper than max_depth+1 steps
  for (const auto& f : finals) CHECK(f.steps.size() <= 4);
}

TEST_CASE("oracle ranker: truth first, stop at products, stop-only off-network") {
  const auto& pack = testutil::starter_pack();
  ReactionRecord snar;
  for (const auto& r : testutil::desk_corpus())
    if (r.id == "rxn-001") snar = r;
  StateBag root = root_state(snar);
  auto products = canonical_products(snar);
  MechNetwork net = expand_network(snar, pack, {});
  auto keys = find_product_nodes(net, products);
  MechNetwork pruned = prune_to_product(net, keys, 12);
  auto templates = select_templates(pack, snar.class_name, root, false);
  OracleRanker oracle(pruned, keys, templates);

  // second pathway state: deprotonated alcohol + aryl halide
  StateBag second = state_from_smiles({"C[O-]", "N#Cc1ccccc1Cl"});
  auto cands = oracle.rank(second);
  REQUIRE(!cands.empty());
  // rank 1 is the ring-addition complex on the productive pathway, i.e. the
  // pruned network's successor of this state
  std::string true_next;
  for (const auto& e : pruned.edges)
    if (e.from == second.key) true_next = e.to;
  REQUIRE(!true_next.empty());
  CHECK(cands[0].state.key == true_next);
  CHECK(cands[0].rank == 1);
  CHECK_FALSE(cands[0].is_stop);
  // contract: dense ranks, dedup by key, stop present
  std::set<std::string> seen;
  bool has_stop = false;
  for (size_t i = 0; i < cands.size(); ++i) {
    CHECK(cands[i].rank == static_cast<int>(i) + 1);
    CHECK(seen.insert(cands[i].state.key).second);
    has_stop = has_stop || cands[i].is_stop;
  }
  CHECK(has_stop);

  // at the product node, rank 1 is the stop sign
  const StateBag& product_state = net.nodes.at(*keys.begin());
  auto at_product = oracle.rank(product_state);
  REQUIRE(!at_product.empty());
  CHECK(at_product[0].is_stop);

  // an off-network state gets a stop-only ranking
  auto off = oracle.rank(state_from_smiles({"CCCCCCCC"}));
  REQUIRE(off.size() == 1);
  CHECK(off[0].is_stop);
}

TEST_CASE("frequency ranker orders by training count, uniform by key") {
  const auto& pack = testutil::starter_pack();
  // polluted alkylation state: amine + alkyl bromide carrying an aryl bromide
  StateBag state = state_from_smiles({"CCN", "BrCCc1ccc(Br)cc1"});
  std::string truth = state_from_smiles({"CC[NH2+]CCc1ccc(Br)cc1", "[Br-]"}).key;
  std::string decoy = state_from_smiles({"CCN", "BrCCc1cc[c+]cc1", "[Br-]"}).key;

  // trained counts favour the alkylation step over the ring ionization
  std::vector<ElementaryStepRecord> train;
  for (int i = 0; i < 10; ++i) {
    ElementaryStepRecord row;
    row.rxn_id = "t" + std::to_string(i);
    row.template_id = "Bromo N-alkylation/Reaction/1";
    train.push_back(row);
  }
  {
    ElementaryStepRecord row;
    row.rxn_id = "s";
    row.template_id = "SNAr ether synthesis/reaction with alcohol group/3";
    train.push_back(row);
  }
  auto freq = train_frequency_ranker(train, pack);
  auto cands = freq->rank(state);
  REQUIRE(cands.size() >= 3);
  CHECK(cands[0].state.key == truth);
  CHECK(cands[1].state.key == decoy);
  CHECK(cands.back().is_stop); // stop defaults last while alternatives exist

  // uniform: all counts tie, candidate state-key order decides
  auto uni = make_uniform_ranker(pack);
  auto ucands = uni->rank(state);
  REQUIRE(ucands.size() >= 3);
  CHECK(ucands[0].state.key == std::min(truth, decoy));
  CHECK(ucands.back().is_stop);

  // empty training stream degenerates to the uniform ordering
  auto empty = train_frequency_ranker({}, pack);
  auto ecands = empty->rank(state);
  REQUIRE(ecands.size() == ucands.size());
  for (size_t i = 0; i < ecands.size(); ++i)
    CHECK(ecands[i].state.key == ucands[i].state.key);

  // with no chemical candidates the stop sign ranks first
  auto inert = freq->rank(state_from_smiles({"CCCC"}));
  REQUIRE(inert.size() == 1);
  CHECK(inert[0].is_stop);
  CHECK(inert[0].rank == 1);
}

TEST_CASE("oracle beam self-consistency across the reproduced desk corpus") {
  const auto& pack = testutil::starter_pack();
  GenOptions gopt;
  int attempted = 0;
  for (const ReactionRecord& r : testutil::desk_corpus()) {
    StateBag root = root_state(r);
    auto products = canonical_products(r);
    MechNetwork net = expand_network(r, pack, gopt.limits);
    auto keys = find_product_nodes(net, products);
    if (keys.empty()) continue; // not reproduced; not part of this criterion
    ++attempted;
    MechNetwork pruned = prune_to_product(net, keys, gopt.limits.max_depth);
    auto templates = select_templates(pack, r.class_name, root, false);
    OracleRanker oracle(pruned, keys, templates);
    BeamConfig cfg;
    cfg.beam_width = 1;
    cfg.mode = BeamMode::Rank;
    auto finals = beam_search(root, oracle, cfg);
    REQUIRE(!finals.empty());
    const BeamFinal& best = finals.front();
    CHECK(contains_all(best.state, products));
    for (int rank : best.ranks) CHECK(rank == 1);
  }
  CHECK(attempted == 18);
}
