//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_BEAM_HPP
#define MECHKIT_BEAM_HPP

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "mechkit/ranker.hpp"
#include "mechkit/state.hpp"

namespace mechkit {

enum class BeamMode { Rank, Prob };

struct BeamConfig {
  int beam_width = 10;
  double gamma = 0.5;
  int max_depth = 12;
  BeamMode mode = BeamMode::Rank;
};

// Accumulated discounted rank R = sum_n gamma^n * r_n.
inline double discounted_rank(const std::vector<int>& ranks, double gamma) {
  double r = 0;
  double g = 1;
  for (int rank : ranks) {
    r += g * rank;
    g *= gamma;
  }
  return r;
}

struct BeamStep {
  std::string via;       // template id or predicted transition
  int rank = 0;
  std::string state_key; // state after this step
};

struct BeamFinal {
  StateBag state;
  std::vector<BeamStep> steps; // last step is the stop selection
  std::vector<int> ranks;
  double objective = 0;        // R (rank mode) or accumulated log score (prob)
};

// Depth-synchronous beam over consecutive step predictions. A stop candidate
// finalizes its path (the stop step's rank is part of the objective);
// children that revisit any state on their own path are pruned; nodes still
// unfinished at max_depth count as failures and are dropped.
inline std::vector<BeamFinal> beam_search(const StateBag& root, StepRanker& ranker,
                                          const BeamConfig& cfg) {
  struct Node {
    StateBag state;
    std::vector<BeamStep> steps;
    std::vector<int> ranks;
    double acc_rank = 0;
    double acc_logp = 0;
    std::set<std::string> ancestors;
  };

  auto objective_of = [&](double acc_rank, double acc_logp) {
    return cfg.mode == BeamMode::Rank ? acc_rank : -acc_logp;
  };
  auto node_less = [&](const Node& a, const Node& b) {
    double oa = objective_of(a.acc_rank, a.acc_logp);
    double ob = objective_of(b.acc_rank, b.acc_logp);
    if (oa != ob) return oa < ob;
    if (a.state.key != b.state.key) return a.state.key < b.state.key;
    return a.steps.size() < b.steps.size();
  };

  std::vector<Node> layer;
  {
    Node start;
    start.state = root;
    start.ancestors.insert(root.key);
    layer.push_back(std::move(start));
  }
  std::vector<BeamFinal> finals;

  for (int depth = 0; depth <= cfg.max_depth && !layer.empty(); ++depth) {
    std::sort(layer.begin(), layer.end(), node_less);
    if (static_cast<int>(layer.size()) > cfg.beam_width) layer.resize(cfg.beam_width);

    std::vector<Node> next;
    double discount = std::pow(cfg.gamma, depth);
    for (Node& node : layer) {
      std::vector<RankedCandidate> cands = ranker.rank(node.state);
      for (RankedCandidate& c : cands) {
        double step_logp = 0;
        if (cfg.mode == BeamMode::Prob) {
          if (!c.score || *c.score <= 0)
            throw std::invalid_argument("prob-mode beam requires positive candidate scores");
          step_logp = std::log(*c.score);
        }
        if (c.is_stop) {
          BeamFinal fin;
          fin.state = node.state;
          fin.steps = node.steps;
          fin.steps.push_back({"stop", c.rank, node.state.key});
          fin.ranks = node.ranks;
          fin.ranks.push_back(c.rank);
          fin.objective = cfg.mode == BeamMode::Rank
                              ? node.acc_rank + discount * c.rank
                              : node.acc_logp + step_logp;
          finals.push_back(std::move(fin));
          continue;
        }
        if (node.ancestors.count(c.state.key)) continue; // reverse/cycle rule
        Node child;
        child.state = std::move(c.state);
        child.steps = node.steps;
        child.steps.push_back({c.via.empty() ? child.state.key : c.via, c.rank, child.state.key});
        child.ranks = node.ranks;
        child.ranks.push_back(c.rank);
        child.acc_rank = node.acc_rank + discount * c.rank;
        child.acc_logp = node.acc_logp + step_logp;
        child.ancestors = node.ancestors;
        child.ancestors.insert(child.state.key);
        next.push_back(std::move(child));
      }
    }
    layer = std::move(next);
  }

  auto final_less = [&](const BeamFinal& a, const BeamFinal& b) {
    double oa = cfg.mode == BeamMode::Rank ? a.objective : -a.objective;
    double ob = cfg.mode == BeamMode::Rank ? b.objective : -b.objective;
    if (oa != ob) return oa < ob;
    if (a.state.key != b.state.key) return a.state.key < b.state.key;
    return a.steps.size() < b.steps.size();
  };
  std::sort(finals.begin(), finals.end(), final_less);
  if (static_cast<int>(finals.size()) > cfg.beam_width) finals.resize(cfg.beam_width);
  return finals;
}

} // namespace mechkit

#endif // MECHKIT_BEAM_HPP
