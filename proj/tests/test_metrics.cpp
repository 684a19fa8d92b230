//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mechkit/dataset.hpp"
#include "mechkit/metrics.hpp"
#include "test_util.hpp"

using namespace mechkit;

namespace {

StepPredictionLog make_log(const std::string& rxn, int step, int rank_of_truth,
                           int n_candidates) {
  StepPredictionLog log;
  log.rxn_id = rxn;
  log.step_index = step;
  log.truth = {"truth-" + rxn + "-" + std::to_string(step)};
  for (int i = 1; i <= n_candidates; ++i) {
    if (i == rank_of_truth) {
      log.candidates.push_back(log.truth);
    } else {
      log.candidates.push_back({"decoy-" + std::to_string(i) + "-" + rxn +
                                "-" + std::to_string(step)});
    }
  }
  return log;
}

} // namespace

TEST_CASE("state match is multiset equality") {
  CHECK(state_match({"CCO", "[Br-]"}, {"CCO", "[Br-]"}));
  CHECK(state_match({"CCO", "[Br-]"}, {"[Br-]", "CCO"}));
  CHECK_FALSE(state_match({"CCO"}, {"CCO", "[Na+]"}));
  CHECK_FALSE(state_match({"CCO", "CCO"}, {"CCO"}));
}

TEST_CASE("truth_rank dedups candidates by state key") {
  StepPredictionLog log;
  log.rxn_id = "r";
  log.truth = {"CCO"};
  log.candidates = {{"CN"}, {"CN"}, {"CCO"}};
  CHECK(truth_rank(log) == 2); // duplicate decoy collapses
}

TEST_CASE("topk_accuracy counts ranks and stays monotone") {
  std::vector<StepPredictionLog> logs;
  logs.push_back(make_log("a", 0, 1, 3));
  logs.push_back(make_log("a", 1, 2, 3));
  logs.push_back(make_log("b", 0, 1, 3));
  logs.push_back(make_log("b", 1, 0, 3)); // FAIL: truth absent
  auto acc = topk_accuracy(logs, {1, 2, 10});
  CHECK(acc[1] == Catch::Approx(0.50));
  CHECK(acc[2] == Catch::Approx(0.75));
  CHECK(acc[10] == Catch::Approx(0.75));

  std::vector<StepPredictionLog> all_first;
  for (int i = 0; i < 5; ++i) all_first.push_back(make_log("x", i, 1, 4));
  auto perfect = topk_accuracy(all_first, {1, 2, 3, 5, 10});
  for (auto& [k, v] : perfect) CHECK(v == 1.0);

  CHECK_THROWS_AS(topk_accuracy({}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(topk_accuracy(logs, {5, 1}), std::invalid_argument);
}

TEST_CASE("sequence_rank is the worst per-step rank, FAIL propagating") {
  CHECK(sequence_rank({1, 3, 1}) == 3);
  CHECK(sequence_rank({1, 1, 1}) == 1);
  CHECK(sequence_rank({1, kRankFail, 1}) == kRankFail);
  CHECK_THROWS_AS(sequence_rank({}), std::invalid_argument);
}

TEST_CASE("metric properties on 1000 random synthetic logs") {
  std::mt19937 rng(20260809);
  const int n_reactions = 250;
  const int steps_per_reaction = 4;
  std::vector<StepPredictionLog> logs;
  std::map<std::string, std::vector<int>> expected_ranks;
  for (int r = 0; r < n_reactions; ++r) {
    std::string id = "rxn" + std::to_string(r);
    for (int s = 0; s < steps_per_reaction; ++s) {
      // rank 1..8, with ~15% FAIL
      int rank = (rng() % 100 < 15) ? kRankFail : 1 + static_cast<int>(rng() % 8);
      logs.push_back(make_log(id, s, rank, 8));
      expected_ranks[id].push_back(rank);
    }
  }
  REQUIRE(logs.size() == 1000);

  std::vector<int> ks = {1, 2, 3, 5, 10};
  EvalReport report = evaluate(logs, ks);

  // top-k monotone nondecreasing over the Table-style column set
  double prev = 0;
  for (int k : ks) {
    CHECK(report.topk[k] >= prev);
    prev = report.topk[k];
  }

  // sequence_rank == max of per-step ranks (FAIL propagates)
  for (const SequenceResult& sr : report.sequences) {
    const auto& exp = expected_ranks.at(sr.rxn_id);
    REQUIRE(sr.per_step_ranks == exp);
    bool any_fail = false;
    int worst = 0;
    for (int r : exp) {
      any_fail = any_fail || r == kRankFail;
      worst = std::max(worst, r);
    }
    CHECK(sr.seq_rank == (any_fail ? kRankFail : worst));
  }

  // fraction with sequence_rank <= k never exceeds top-k step accuracy
  for (int k : ks) CHECK(report.seq_topk[k] <= report.topk[k] + 1e-12);

  // top-infinity equals the fraction of steps whose truth appears at all
  long present = 0;
  for (const auto& log : logs)
    if (truth_rank(log) != kRankFail) ++present;
  auto top_inf = topk_accuracy(logs, {1000000});
  CHECK(top_inf[1000000] ==
        Catch::Approx(static_cast<double>(present) / logs.size()));
}

TEST_CASE("multi-pathway reactions score by their best pathway") {
  std::vector<StepPredictionLog> logs;
  auto a0 = make_log("r1", 0, 1, 3);
  auto a1 = make_log("r1", 1, 3, 3);
  auto b0 = make_log("r1", 0, 1, 3);
  auto b1 = make_log("r1", 1, 1, 3);
  b0.path_id = 1;
  b1.path_id = 1;
  logs.insert(logs.end(), {a0, a1, b0, b1});
  EvalReport report = evaluate(logs, {1, 3});
  CHECK(report.n_sequences == 1);
  CHECK(report.seq_topk[1] == Catch::Approx(1.0)); // pathway 1 is all rank-1
  CHECK(report.seq_topk[3] == Catch::Approx(1.0));
}

TEST_CASE("coverage comes from the manifest and errors on zero records") {
  nlohmann::json manifest = {{"total", 20}, {"reproduced", 18}};
  CHECK(coverage_from_manifest(manifest) == Catch::Approx(0.9));
  nlohmann::json empty = {{"total", 0}, {"reproduced", 0}};
  CHECK_THROWS_AS(coverage_from_manifest(empty), std::invalid_argument);
}

TEST_CASE("desk coverage: generated manifest matches an independent count") {
  GenOptions opt;
  GenResult result = run_gen(testutil::desk_corpus(), testutil::starter_pack(), opt);
  long reproduced = 0;
  for (const auto& o : result.outcomes)
    if (o.reproduced) ++reproduced;
  CHECK(coverage_from_manifest(result.manifest) ==
        Catch::Approx(static_cast<double>(reproduced) / testutil::desk_corpus().size()));
  CHECK(coverage_from_manifest(result.manifest) == Catch::Approx(0.9));
}

TEST_CASE("stripping required agents drives coverage of those classes to zero") {
  std::vector<ReactionRecord> stripped;
  for (ReactionRecord r : testutil::desk_corpus()) {
    if (r.class_name != "Ester hydrolysis") continue;
    r.agents.clear();
    stripped.push_back(std::move(r));
  }
  REQUIRE(stripped.size() == 3);
  GenOptions opt;
  GenResult result = run_gen(stripped, testutil::starter_pack(), opt);
  CHECK(result.manifest["reproduced"] == 0);
  CHECK(coverage_from_manifest(result.manifest) == 0.0);
}

TEST_CASE("report serialization carries both metric families") {
  std::vector<StepPredictionLog> logs = {make_log("a", 0, 1, 2), make_log("a", 1, 2, 2)};
  EvalReport report = evaluate(logs, {1, 2});
  auto j = report_json(report);
  CHECK(j["elementary_topk"]["top-1"] == Catch::Approx(0.5));
  CHECK(j["sequence_rank_topk"]["top-2"] == Catch::Approx(1.0));
  std::string text = report_text(report);
  CHECK(text.find("elementary") != std::string::npos);
  CHECK(text.find("sequence rank") != std::string::npos);
}
