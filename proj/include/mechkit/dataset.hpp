//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_DATASET_HPP
#define MECHKIT_DATASET_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mechkit/network.hpp"
#include "mechkit/util.hpp"

namespace mechkit {

using ordered_json = nlohmann::ordered_json;

// One dataset row: a single elementary step of one pathway.
struct ElementaryStepRecord {
  std::string rxn_id;
  int path_id = 0;
  int step_index = 0;
  std::vector<std::string> before;
  std::vector<std::string> after;
  std::string template_id;
  bool is_termination = false;
};

inline ordered_json step_record_json(const ElementaryStepRecord& r) {
  ordered_json j;
  j["rxn_id"] = r.rxn_id;
  j["path_id"] = r.path_id;
  j["step_index"] = r.step_index;
  j["before"] = r.before;
  j["after"] = r.after;
  j["template_id"] = r.template_id;
  j["is_termination"] = r.is_termination;
  return j;
}

inline ElementaryStepRecord step_record_from_json(const nlohmann::json& j) {
  ElementaryStepRecord r;
  r.rxn_id = j.at("rxn_id").get<std::string>();
  r.path_id = j.at("path_id").get<int>();
  r.step_index = j.at("step_index").get<int>();
  r.before = j.at("before").get<std::vector<std::string>>();
  r.after = j.at("after").get<std::vector<std::string>>();
  r.template_id = j.at("template_id").get<std::string>();
  r.is_termination = j.at("is_termination").get<bool>();
  return r;
}

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Parses "8:1:1"-style ratio strings and normalizes to fractions.
inline SplitRatios parse_ratios(const std::string& text) {
  double parts[3] = {0, 0, 0};
  size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    size_t colon = text.find(':', pos);
    std::string piece =
        colon == std::string::npos ? text.substr(pos) : text.substr(pos, colon - pos);
    if (piece.empty()) throw std::invalid_argument("bad split ratio '" + text + "'");
    parts[i] = std::stod(piece);
    if (parts[i] < 0) throw std::invalid_argument("negative split ratio");
    if (colon == std::string::npos) {
      if (i != 2) throw std::invalid_argument("split ratio needs three fields");
      break;
    }
    pos = colon + 1;
  }
  double sum = parts[0] + parts[1] + parts[2];
  if (sum <= 0) throw std::invalid_argument("split ratios sum to zero");
  return {parts[0] / sum, parts[1] / sum, parts[2] / sum};
}

// Split assignment happens at the reaction level, never per step.
inline int split_of(const std::string& rxn_id, std::uint64_t seed, const SplitRatios& r) {
  double u = split_unit(rxn_id, seed);
  if (u < r.train) return 0;
  if (u < r.train + r.val) return 1;
  return 2;
}

struct GenOptions {
  ExpandLimits limits;
  SplitRatios ratios;
  std::uint64_t seed = 0;
  bool all_classes = false;
  int workers = 1;
};

struct RecordOutcome {
  std::string id;
  bool rejected = false;
  bool reproduced = false;
  std::string failure; // empty when reproduced
  int split = 0;
  std::vector<ElementaryStepRecord> rows;
  bool paths_truncated = false;
  bool network_truncated = false;
  int n_pathways = 0;
};

inline ReactionRecord reaction_from_json(const nlohmann::json& j) {
  ReactionRecord r;
  r.id = j.at("id").get<std::string>();
  r.class_name = j.at("class").get<std::string>();
  r.reactants = j.at("reactants").get<std::vector<std::string>>();
  if (j.contains("agents")) r.agents = j.at("agents").get<std::vector<std::string>>();
  r.products = j.at("products").get<std::vector<std::string>>();
  return r;
}

inline std::vector<std::string> canonical_products(const ReactionRecord& r) {
  std::vector<std::string> out;
  for (const auto& p : r.products)
    for (const Molecule& m : parse_components(p)) out.push_back(canonical_form(m));
  return out;
}

// Imputes the mechanism for one record: expand, locate products, prune,
// linearize, and append one termination row per pathway.
inline RecordOutcome process_record(const ReactionRecord& r,
                                    const std::vector<ReactionClassDef>& pack,
                                    const GenOptions& opt) {
  RecordOutcome out;
  out.id = r.id;
  out.split = split_of(r.id, opt.seed, opt.ratios);
  try {
    if (r.products.empty()) throw std::invalid_argument("record has no products");
    StateBag root = root_state(r);
    std::vector<std::string> products = canonical_products(r);

    auto templates = select_templates(pack, r.class_name, root, opt.all_classes);
    if (templates.empty()) {
      out.failure = "agents_unsatisfied";
      return out;
    }
    MechNetwork net = expand_network(r, pack, opt.limits, opt.all_classes);
    out.network_truncated = net.truncated();
    auto product_keys = find_product_nodes(net, products);
    if (product_keys.empty()) {
      out.failure = net.truncated() ? "product_not_reached_truncated" : "product_not_reached";
      return out;
    }
    out.reproduced = true;
    MechNetwork pruned = prune_to_product(net, product_keys, opt.limits.max_depth);
    LinearizeResult lin = linearize_pathways(pruned, product_keys, opt.limits.max_paths);
    out.paths_truncated = lin.truncated;
    out.n_pathways = static_cast<int>(lin.pathways.size());

    for (int p = 0; p < static_cast<int>(lin.pathways.size()); ++p) {
      const auto& path = lin.pathways[p];
      int idx = 0;
      for (const PathStep& step : path) {
        ElementaryStepRecord row;
        row.rxn_id = r.id;
        row.path_id = p;
        row.step_index = idx++;
        row.before = pruned.nodes.at(step.before).canonical;
        row.after = pruned.nodes.at(step.after).canonical;
        row.template_id = step.template_id;
        row.is_termination = false;
        out.rows.push_back(std::move(row));
      }
      const std::string& final_key = path.empty() ? pruned.root : path.back().after;
      ElementaryStepRecord stop;
      stop.rxn_id = r.id;
      stop.path_id = p;
      stop.step_index = idx;
      stop.before = pruned.nodes.at(final_key).canonical;
      stop.after = stop.before;
      stop.template_id = termination_template_id();
      stop.is_termination = true;
      out.rows.push_back(std::move(stop));
    }
  } catch (const UnknownClassError& e) {
    out.rejected = true;
    out.failure = std::string("unknown_class: ") + e.what();
  } catch (const std::exception& e) {
    out.rejected = true;
    out.failure = std::string("error: ") + e.what();
  }
  return out;
}

struct GenResult {
  std::array<std::string, 3> split_text; // train/val/test JSONL
  std::string rejects_text;
  ordered_json manifest;
  std::vector<RecordOutcome> outcomes;
};

// Batch generation: records are processed concurrently, but outputs are
// assembled in input order so results are byte-identical for any worker
// count.
inline GenResult run_gen(const std::vector<ReactionRecord>& records,
                         const std::vector<ReactionClassDef>& pack, const GenOptions& opt) {
  GenResult result;
  result.outcomes.resize(records.size());
  parallel_for(static_cast<int>(records.size()), opt.workers,
               [&](int i) { result.outcomes[i] = process_record(records[i], pack, opt); });

  int reproduced = 0, rejected = 0, agents_unsatisfied = 0, not_reached = 0,
      not_reached_truncated = 0, paths_truncated = 0, networks_truncated = 0;
  std::array<int, 3> rows_per_split{0, 0, 0};
  for (const RecordOutcome& o : result.outcomes) {
    if (o.rejected) {
      ++rejected;
      ordered_json j;
      j["id"] = o.id;
      j["error"] = o.failure;
      result.rejects_text += j.dump() + "\n";
      continue;
    }
    if (o.network_truncated) ++networks_truncated;
    if (!o.reproduced) {
      if (o.failure == "agents_unsatisfied") ++agents_unsatisfied;
      else if (o.failure == "product_not_reached_truncated") ++not_reached_truncated;
      else ++not_reached;
      continue;
    }
    ++reproduced;
    if (o.paths_truncated) ++paths_truncated;
    for (const ElementaryStepRecord& row : o.rows) {
      result.split_text[o.split] += step_record_json(row).dump() + "\n";
      ++rows_per_split[o.split];
    }
  }

  ordered_json m;
  m["total"] = records.size();
  m["reproduced"] = reproduced;
  if (!records.empty()) m["coverage"] = static_cast<double>(reproduced) / records.size();
  else m["coverage"] = nullptr;
  m["failures"] = {{"rejected", rejected},
                   {"agents_unsatisfied", agents_unsatisfied},
                   {"product_not_reached", not_reached},
                   {"product_not_reached_truncated", not_reached_truncated}};
  m["pathways_truncated"] = paths_truncated;
  m["networks_truncated"] = networks_truncated;
  m["rows"] = {{"train", rows_per_split[0]}, {"val", rows_per_split[1]}, {"test", rows_per_split[2]}};
  m["seed"] = opt.seed;
  m["ratios"] = {opt.ratios.train, opt.ratios.val, opt.ratios.test};
  m["limits"] = {{"max_depth", opt.limits.max_depth},
                 {"max_nodes", opt.limits.max_nodes},
                 {"max_paths", opt.limits.max_paths}};
  result.manifest = std::move(m);
  return result;
}

inline std::vector<ReactionRecord> load_reactions_jsonl(const std::string& text) {
  std::vector<ReactionRecord> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(reaction_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

inline std::vector<ElementaryStepRecord> load_steps_jsonl(const std::string& text) {
  std::vector<ElementaryStepRecord> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(step_record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

} // namespace mechkit

#endif // MECHKIT_DATASET_HPP
