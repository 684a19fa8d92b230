//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_RANKER_HPP
#define MECHKIT_RANKER_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mechkit/dataset.hpp"
#include "mechkit/network.hpp"
#include "mechkit/rewrite.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <sys/wait.h>
#include <unistd.h>

namespace mechkit {

struct RankedCandidate {
  StateBag state;
  int rank = 0;                 // 1 = best
  std::optional<double> score;  // probability in (0,1] when available
  bool is_stop = false;
  std::string via;              // producing template id, when known
};

// Behavioral contract: deterministic for fixed inputs, candidates deduped by
// state key, and a stop candidate always present.
class StepRanker {
public:
  virtual ~StepRanker() = default;
  virtual std::vector<RankedCandidate> rank(const StateBag& state) = 0;
  virtual std::string name() const = 0;
};

namespace ranker_detail {

// Dedup by key, reassign dense ranks 1..m, guarantee a stop candidate.
inline std::vector<RankedCandidate> finalize(const StateBag& input,
                                             std::vector<RankedCandidate> cands) {
  std::vector<RankedCandidate> out;
  std::set<std::string> seen;
  bool has_stop = false;
  for (RankedCandidate& c : cands) {
    c.is_stop = c.state.key == input.key;
    if (!seen.insert(c.state.key).second) continue;
    has_stop = has_stop || c.is_stop;
    out.push_back(std::move(c));
  }
  if (!has_stop) {
    RankedCandidate stop;
    stop.state = input;
    stop.is_stop = true;
    double min_score = 2.0;
    bool all_scored = !out.empty();
    for (const RankedCandidate& c : out) {
      if (!c.score) all_scored = false;
      else min_score = std::min(min_score, *c.score);
    }
    if (all_scored) stop.score = min_score / 2;
    out.push_back(std::move(stop));
  }
  for (size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

struct RawCandidate {
  StateBag state;
  std::vector<std::string> template_ids;
};

// All distinct successor states over a template set, with every template id
// that produces each successor (identical outcomes are indistinguishable).
inline std::vector<RawCandidate>
enumerate_candidates(const std::vector<const ElementaryTemplate*>& templates,
                     const StateBag& state) {
  std::map<std::string, RawCandidate> by_key;
  for (const ElementaryTemplate* t : templates) {
    if (t->is_termination) continue;
    for (Application& app : enumerate_applications(*t, state, /*gate_on_agents=*/false)) {
      auto it = by_key.find(app.successor.key);
      if (it == by_key.end()) {
        RawCandidate rc;
        rc.state = std::move(app.successor);
        rc.template_ids.push_back(t->id);
        by_key.emplace(rc.state.key, std::move(rc));
      } else {
        it->second.template_ids.push_back(t->id);
      }
    }
  }
  std::vector<RawCandidate> out;
  out.reserve(by_key.size());
  for (auto& [key, rc] : by_key) out.push_back(std::move(rc));
  return out;
}

inline std::vector<const ElementaryTemplate*>
all_templates(const std::vector<ReactionClassDef>& pack) {
  std::vector<const ElementaryTemplate*> out;
  for (const auto& cls : pack)
    for (const auto& cond : cls.conditions)
      for (const auto& t : cond.steps) out.push_back(&t);
  return out;
}

} // namespace ranker_detail

// Ground-truth ranker over one reaction's pruned network: rank 1 is the true
// next state on a productive pathway (stop at a product node); remaining
// candidates follow in state-key order with stop last. Unknown states rank
// stop only.
class OracleRanker : public StepRanker {
public:
  OracleRanker(const MechNetwork& pruned, std::set<std::string> product_keys,
               std::vector<const ElementaryTemplate*> templates)
      : pruned_(pruned), product_keys_(std::move(product_keys)),
        templates_(std::move(templates)) {}

  std::string name() const override { return "oracle"; }

  std::vector<RankedCandidate> rank(const StateBag& state) override {
    std::vector<RankedCandidate> cands;
    auto node = pruned_.nodes.find(state.key);
    if (node == pruned_.nodes.end()) {
      return ranker_detail::finalize(state, assign_scores({}));
    }
    std::string true_next;
    bool stop_first = product_keys_.count(state.key) > 0;
    if (!stop_first) {
      for (const NetEdge& e : pruned_.edges) {
        if (e.from != state.key) continue;
        if (true_next.empty() || e.to < true_next) true_next = e.to;
      }
      if (true_next.empty()) stop_first = true; // dead end: only stopping remains
    }
    if (stop_first) {
      RankedCandidate stop;
      stop.state = state;
      stop.is_stop = true;
      cands.push_back(std::move(stop));
    } else {
      RankedCandidate best;
      best.state = pruned_.nodes.at(true_next);
      for (const NetEdge& e : pruned_.edges)
        if (e.from == state.key && e.to == true_next) {
          best.via = e.template_id;
          break;
        }
      cands.push_back(std::move(best));
    }
    for (ranker_detail::RawCandidate& rc :
         ranker_detail::enumerate_candidates(templates_, state)) {
      RankedCandidate c;
      c.state = std::move(rc.state);
      c.via = rc.template_ids.front();
      cands.push_back(std::move(c));
    }
    return ranker_detail::finalize(state, assign_scores(std::move(cands)));
  }

private:
  static std::vector<RankedCandidate> assign_scores(std::vector<RankedCandidate> cands) {
    double total = 0;
    double w = 1.0;
    for (size_t i = 0; i < cands.size() + 1; ++i) total += 1.0 / (1 << std::min<size_t>(i, 30));
    for (size_t i = 0; i < cands.size(); ++i) {
      cands[i].score = w / total;
      w /= 2;
    }
    return cands;
  }

  MechNetwork pruned_;
  std::set<std::string> product_keys_;
  std::vector<const ElementaryTemplate*> templates_;
};

// Non-neural reference ranker: orders candidates by descending training count
// of the producing template, ties by candidate state key; the stop candidate
// defaults to last while chemical candidates exist, first otherwise.
class FrequencyRanker : public StepRanker {
public:
  FrequencyRanker(std::map<std::string, long> counts,
                  std::vector<const ElementaryTemplate*> templates, std::string label)
      : counts_(std::move(counts)), templates_(std::move(templates)), label_(std::move(label)) {}

  std::string name() const override { return label_; }

  std::vector<RankedCandidate> rank(const StateBag& state) override {
    struct Scored {
      long count;
      RankedCandidate cand;
    };
    std::vector<Scored> scored;
    for (ranker_detail::RawCandidate& rc :
         ranker_detail::enumerate_candidates(templates_, state)) {
      long best = 0;
      std::string via = rc.template_ids.front();
      for (const std::string& tid : rc.template_ids) {
        long c = 0;
        auto it = counts_.find(tid);
        if (it != counts_.end()) c = it->second;
        if (c > best) {
          best = c;
          via = tid;
        }
      }
      Scored s{best, {}};
      s.cand.state = std::move(rc.state);
      s.cand.via = via;
      scored.push_back(std::move(s));
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.cand.state.key < b.cand.state.key;
    });
    std::vector<RankedCandidate> cands;
    double total = 0;
    for (const Scored& s : scored) total += static_cast<double>(s.count) + 1.0;
    total += 1.0; // stop weight
    for (Scored& s : scored) {
      s.cand.score = (static_cast<double>(s.count) + 1.0) / total;
      cands.push_back(std::move(s.cand));
    }
    RankedCandidate stop;
    stop.state = state;
    stop.is_stop = true;
    stop.score = 1.0 / total;
    cands.push_back(std::move(stop));
    return ranker_detail::finalize(state, std::move(cands));
  }

private:
  std::map<std::string, long> counts_;
  std::vector<const ElementaryTemplate*> templates_;
  std::string label_;
};

// Counts template occurrences over the training split only. An empty stream
// degenerates into the uniform ranker's ordering.
inline std::unique_ptr<FrequencyRanker>
train_frequency_ranker(const std::vector<ElementaryStepRecord>& train_rows,
                       const std::vector<ReactionClassDef>& pack) {
  std::map<std::string, long> counts;
  for (const ElementaryStepRecord& row : train_rows) {
    if (row.is_termination) continue;
    ++counts[row.template_id];
  }
  return std::make_unique<FrequencyRanker>(std::move(counts),
                                           ranker_detail::all_templates(pack), "frequency");
}

inline std::unique_ptr<FrequencyRanker>
make_uniform_ranker(const std::vector<ReactionClassDef>& pack) {
  return std::make_unique<FrequencyRanker>(std::map<std::string, long>{},
                                           ranker_detail::all_templates(pack), "uniform");
}

// Process-external ranker speaking line-delimited JSON over its standard
// streams: request {"state":[smiles...]}, response
// {"candidates":[{"state":[...],"rank":n,"score":s}]}.
class ExternRanker : public StepRanker {
public:
  explicit ExternRanker(const std::string& command) : command_(command) { spawn(); }

  ~ExternRanker() override {
    if (to_child_) fclose(to_child_);
    if (from_child_) fclose(from_child_);
    if (pid_ > 0) {
      int status = 0;
      waitpid(pid_, &status, 0);
    }
  }

  std::string name() const override { return "extern:" + command_; }

  std::vector<RankedCandidate> rank(const StateBag& state) override {
    nlohmann::json req;
    req["state"] = state.canonical;
    std::string line = req.dump();
    line += "\n";
    if (fwrite(line.data(), 1, line.size(), to_child_) != line.size() || fflush(to_child_) != 0)
      throw std::runtime_error("extern ranker: write failed");

    std::string resp;
    int c;
    while ((c = fgetc(from_child_)) != EOF && c != '\n') resp += static_cast<char>(c);
    if (resp.empty()) throw std::runtime_error("extern ranker: no response");
    nlohmann::json j = nlohmann::json::parse(resp);

    struct Item {
      int rank;
      RankedCandidate cand;
    };
    std::vector<Item> items;
    for (const auto& cj : j.at("candidates")) {
      Item it;
      it.rank = cj.value("rank", static_cast<int>(items.size()) + 1);
      it.cand.state = state_from_smiles(cj.at("state").get<std::vector<std::string>>());
      if (cj.contains("score")) it.cand.score = cj["score"].get<double>();
      items.push_back(std::move(it));
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const Item& a, const Item& b) { return a.rank < b.rank; });
    std::vector<RankedCandidate> cands;
    for (Item& it : items) cands.push_back(std::move(it.cand));
    return ranker_detail::finalize(state, std::move(cands));
  }

private:
  void spawn() {
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
      throw std::runtime_error("extern ranker: pipe failed");
    pid_ = fork();
    if (pid_ < 0) throw std::runtime_error("extern ranker: fork failed");
    if (pid_ == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child_ = fdopen(in_pipe[1], "w");
    from_child_ = fdopen(out_pipe[0], "r");
    if (!to_child_ || !from_child_) throw std::runtime_error("extern ranker: fdopen failed");
  }

  std::string command_;
  pid_t pid_ = -1;
  FILE* to_child_ = nullptr;
  FILE* from_child_ = nullptr;
};

} // namespace mechkit

#endif // MECHKIT_RANKER_HPP
