//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_METRICS_HPP
#define MECHKIT_METRICS_HPP

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mechkit {

// Rank value reserved for "truth absent from candidates". FAIL propagates:
// no imputed max-rank, since silently large ranks would inflate top-k.
constexpr int kRankFail = 0;

struct StepPredictionLog {
  std::string rxn_id;
  int path_id = 0;
  int step_index = 0;
  std::vector<std::string> truth;                  // canonical SMILES multiset
  std::vector<std::vector<std::string>> candidates; // rank order
};

// Multiset state identity over canonical forms.
inline std::string bag_key(std::vector<std::string> mols) {
  std::sort(mols.begin(), mols.end());
  std::string out;
  for (size_t i = 0; i < mols.size(); ++i) {
    if (i) out += ".";
    out += mols[i];
  }
  return out;
}

inline bool state_match(const std::vector<std::string>& truth,
                        const std::vector<std::string>& candidate) {
  return bag_key(truth) == bag_key(candidate);
}

// 1-based rank of the truth among candidates (deduped by key); kRankFail when
// absent.
inline int truth_rank(const StepPredictionLog& log) {
  std::string want = bag_key(log.truth);
  std::set<std::string> seen;
  int rank = 0;
  for (const auto& cand : log.candidates) {
    std::string key = bag_key(cand);
    if (!seen.insert(key).second) continue;
    ++rank;
    if (key == want) return rank;
  }
  return kRankFail;
}

inline std::map<int, double> topk_accuracy(const std::vector<StepPredictionLog>& logs,
                                           const std::vector<int>& ks) {
  if (logs.empty()) throw std::invalid_argument("topk_accuracy on empty logs is undefined");
  if (!std::is_sorted(ks.begin(), ks.end()))
    throw std::invalid_argument("ks must be sorted ascending");
  std::vector<int> ranks;
  ranks.reserve(logs.size());
  for (const auto& log : logs) ranks.push_back(truth_rank(log));
  std::map<int, double> out;
  for (int k : ks) {
    long hits = 0;
    for (int r : ranks)
      if (r != kRankFail && r <= k) ++hits;
    out[k] = static_cast<double>(hits) / static_cast<double>(ranks.size());
  }
  return out;
}

// The worst (highest) rank across a full sequence; FAIL anywhere makes the
// sequence FAIL.
inline int sequence_rank(const std::vector<int>& per_step_ranks) {
  if (per_step_ranks.empty())
    throw std::invalid_argument("sequence_rank of an empty sequence is undefined");
  int worst = 0;
  for (int r : per_step_ranks) {
    if (r == kRankFail) return kRankFail;
    worst = std::max(worst, r);
  }
  return worst;
}

struct SequenceResult {
  std::string rxn_id;
  int path_id = 0;
  std::vector<int> per_step_ranks;
  int seq_rank = kRankFail;
};

struct EvalReport {
  std::map<int, double> topk;      // per elementary step
  std::map<int, double> seq_topk;  // fraction of reactions with sequence rank <= k
  long n_steps = 0;
  long n_sequences = 0;  // distinct reactions
  std::vector<SequenceResult> sequences;
};

// Sequence scores are computed per pathway; a reaction's sequence rank is the
// best rank over its preserved pathways.
inline EvalReport evaluate(const std::vector<StepPredictionLog>& logs,
                           const std::vector<int>& ks) {
  EvalReport report;
  report.topk = topk_accuracy(logs, ks);
  report.n_steps = static_cast<long>(logs.size());

  std::map<std::pair<std::string, int>, std::vector<std::pair<int, int>>> grouped;
  for (const auto& log : logs)
    grouped[{log.rxn_id, log.path_id}].emplace_back(log.step_index, truth_rank(log));

  std::map<std::string, int> best_by_rxn; // kRankFail-aware min
  for (auto& [key, steps] : grouped) {
    std::sort(steps.begin(), steps.end());
    SequenceResult sr;
    sr.rxn_id = key.first;
    sr.path_id = key.second;
    for (auto& [idx, rank] : steps) sr.per_step_ranks.push_back(rank);
    sr.seq_rank = sequence_rank(sr.per_step_ranks);
    auto it = best_by_rxn.find(sr.rxn_id);
    if (it == best_by_rxn.end()) {
      best_by_rxn[sr.rxn_id] = sr.seq_rank;
    } else if (it->second == kRankFail ||
               (sr.seq_rank != kRankFail && sr.seq_rank < it->second)) {
      it->second = sr.seq_rank;
    }
    report.sequences.push_back(std::move(sr));
  }
  report.n_sequences = static_cast<long>(best_by_rxn.size());
  for (int k : ks) {
    long hits = 0;
    for (auto& [rxn, rank] : best_by_rxn)
      if (rank != kRankFail && rank <= k) ++hits;
    report.seq_topk[k] =
        best_by_rxn.empty() ? 0.0 : static_cast<double>(hits) / best_by_rxn.size();
  }
  return report;
}

inline nlohmann::ordered_json report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["n_steps"] = r.n_steps;
  j["n_sequences"] = r.n_sequences;
  nlohmann::ordered_json topk, seq;
  for (auto& [k, v] : r.topk) topk["top-" + std::to_string(k)] = v;
  for (auto& [k, v] : r.seq_topk) seq["top-" + std::to_string(k)] = v;
  j["elementary_topk"] = topk;
  j["sequence_rank_topk"] = seq;
  return j;
}

inline std::string report_text(const EvalReport& r) {
  auto fmt = [](double v) {
    char buf[16];
    snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };
  std::string out;
  out += "metric          ";
  for (auto& [k, v] : r.topk) out += "  top-" + std::to_string(k);
  out += "\n";
  out += "elementary      ";
  for (auto& [k, v] : r.topk) out += "  " + fmt(v);
  out += "  (n=" + std::to_string(r.n_steps) + ")\n";
  out += "sequence rank   ";
  for (auto& [k, v] : r.seq_topk) out += "  " + fmt(v);
  out += "  (n=" + std::to_string(r.n_sequences) + ")\n";
  return out;
}

// Coverage = reproduced / total, as reported by a generation manifest.
inline double coverage_from_manifest(const nlohmann::json& manifest) {
  long total = manifest.at("total").get<long>();
  if (total == 0) throw std::invalid_argument("coverage undefined for zero records");
  return manifest.at("reproduced").get<double>() / static_cast<double>(total);
}

} // namespace mechkit

#endif // MECHKIT_METRICS_HPP
