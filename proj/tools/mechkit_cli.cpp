//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mechkit/beam.hpp"
#include "mechkit/dataset.hpp"
#include "mechkit/metrics.hpp"
#include "mechkit/network.hpp"
#include "mechkit/pack.hpp"
#include "mechkit/ranker.hpp"
#include "mechkit/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  std::string pack_path;
  std::string reactions_path;
  std::string out_path;
  int max_depth = 12;
  int max_nodes = 5000;
  int max_paths = 64;
  std::string split = "8:1:1";
  std::uint64_t seed = 0;
  int beam_width = 10;
  double gamma = 0.5;
  std::string mode = "rank";
  std::string ranker = "oracle";
  std::string topk = "1,2,3,5,10";
  int workers = 1;
  bool all_classes = false;
  int valence_slack = 0;
  std::string train_path;
  std::string truth_path;
};

std::vector<int> parse_topk(const std::string& s) {
  std::vector<int> ks;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    std::string piece = comma == std::string::npos ? s.substr(pos) : s.substr(pos, comma - pos);
    if (!piece.empty()) ks.push_back(std::stoi(piece));
    pos = comma == std::string::npos ? s.size() : comma + 1;
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

std::vector<mechkit::ReactionClassDef> load_pack_or_exit(const std::string& path) {
  std::string text;
  try {
    text = mechkit::slurp_file(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::exit(kExitUsage);
  }
  try {
    return mechkit::parse_pack(text);
  } catch (const mechkit::PackError& e) {
    std::cerr << path << ":" << e.what() << "\n";
    std::exit(kExitDomain);
  }
}

std::vector<mechkit::ReactionRecord> load_reactions_or_exit(const std::string& path) {
  try {
    return mechkit::load_reactions_jsonl(mechkit::slurp_file(path));
  } catch (const std::exception& e) {
    std::cerr << "error: cannot read reactions: " << e.what() << "\n";
    std::exit(kExitUsage);
  }
}

mechkit::GenOptions gen_options(const CommonOpts& o) {
  mechkit::GenOptions g;
  g.limits.max_depth = o.max_depth;
  g.limits.max_nodes = o.max_nodes;
  g.limits.max_paths = o.max_paths;
  g.ratios = mechkit::parse_ratios(o.split);
  g.seed = o.seed;
  g.all_classes = o.all_classes;
  g.workers = o.workers;
  return g;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_gen_flags = true) {
  cmd->add_option("--pack", o.pack_path, "template pack (.mrt)");
  cmd->add_option("--reactions", o.reactions_path, "reaction records (JSONL)");
  cmd->add_option("--out", o.out_path, "output path");
  cmd->add_option("--max-depth", o.max_depth, "BFS depth limit")->capture_default_str();
  cmd->add_option("--max-nodes", o.max_nodes, "network node limit")->capture_default_str();
  cmd->add_option("--max-paths", o.max_paths, "pathway cap per reaction")->capture_default_str();
  if (with_gen_flags) {
    cmd->add_option("--split", o.split, "train:val:test ratios")->capture_default_str();
    cmd->add_option("--seed", o.seed, "split seed")->capture_default_str();
  }
  cmd->add_option("--workers", o.workers, "worker threads")->capture_default_str();
  cmd->add_flag("--all-classes", o.all_classes, "expand with every class's templates");
  cmd->add_option("--valence-slack", o.valence_slack,
                  "extra valence units before advisory warnings")
      ->capture_default_str();
  cmd->set_config("--config", "", "key=value config file; command-line flags win");
}

void warn_valence(const mechkit::StateBag& bag, int slack, const std::string& context) {
  for (size_t i = 0; i < bag.molecules.size(); ++i) {
    for (const std::string& note : mechkit::valence_notes(bag.molecules[i], slack)) {
      std::cerr << "valence warning [" << context << "] " << bag.canonical[i] << ": " << note
                << "\n";
    }
  }
}

// ---- validate-pack ---------------------------------------------------------

int cmd_validate_pack(const std::string& path) {
  std::string text;
  try {
    text = mechkit::slurp_file(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::vector<mechkit::ReactionClassDef> pack;
  try {
    pack = mechkit::parse_pack(text);
  } catch (const mechkit::PackError& e) {
    std::cerr << path << ":" << e.what() << "\n";
    return kExitDomain;
  }
  auto diags = mechkit::validate_pack(pack);
  bool errors = false;
  for (const auto& d : diags) {
    bool err = d.severity == mechkit::Diagnostic::Severity::Error;
    errors = errors || err;
    std::cerr << (err ? "error" : "warning") << " [" << d.template_id << "] " << d.message
              << "\n";
  }
  int classes = static_cast<int>(pack.size());
  int templates = 0;
  for (const auto& c : pack)
    for (const auto& cond : c.conditions) templates += static_cast<int>(cond.steps.size());
  std::cout << "pack ok: " << classes << " classes, " << templates << " templates, "
            << diags.size() << " diagnostics\n";
  return errors ? kExitDomain : kExitOk;
}

// ---- canon -----------------------------------------------------------------

int cmd_canon(const std::vector<std::string>& inputs, int slack) {
  std::vector<std::string> lines = inputs;
  if (lines.empty()) {
    std::string line;
    while (std::getline(std::cin, line))
      if (!line.empty()) lines.push_back(line);
  }
  int failures = 0;
  for (const std::string& smi : lines) {
    try {
      mechkit::Molecule m = mechkit::parse_smiles(smi);
      for (const std::string& note : mechkit::valence_notes(m, slack))
        std::cerr << "valence warning [" << smi << "]: " << note << "\n";
      std::cout << mechkit::canonical_form(m) << "\n";
    } catch (const mechkit::ParseError& e) {
      std::cerr << "parse error [" << smi << "]: " << e.what() << "\n";
      ++failures;
    }
  }
  return failures ? kExitDomain : kExitOk;
}

// ---- gen -------------------------------------------------------------------

int cmd_gen(const CommonOpts& o) {
  auto pack = load_pack_or_exit(o.pack_path);
  auto records = load_reactions_or_exit(o.reactions_path);
  mechkit::GenOptions gopt = gen_options(o);
  mechkit::GenResult result = mechkit::run_gen(records, pack, gopt);

  if (o.valence_slack >= 0) {
    for (const auto& outc : result.outcomes) {
      for (const auto& row : outc.rows) {
        if (row.is_termination) continue;
        auto bag = mechkit::state_from_smiles(row.after);
        warn_valence(bag, o.valence_slack, row.rxn_id);
      }
    }
  }

  fs::path dir = o.out_path.empty() ? fs::path(".") : fs::path(o.out_path);
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto write = [&](const std::string& name, const std::string& data) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << (dir / name).string() << "\n";
      std::exit(kExitUsage);
    }
    out << data;
  };
  write("train.jsonl", result.split_text[0]);
  write("val.jsonl", result.split_text[1]);
  write("test.jsonl", result.split_text[2]);
  write("rejects.jsonl", result.rejects_text);
  write("manifest.json", result.manifest.dump(2) + "\n");

  std::cerr << "gen: " << result.manifest["reproduced"] << "/" << result.manifest["total"]
            << " reproduced\n";
  return kExitOk;
}

// ---- rankers ---------------------------------------------------------------

struct RankerContext {
  std::unique_ptr<mechkit::StepRanker> shared; // frequency/uniform/extern
  std::mutex extern_mutex;
  bool is_oracle = false;
  bool is_extern = false;
};

// Serializes access to the external process; other rankers are pure.
class LockedRanker : public mechkit::StepRanker {
public:
  LockedRanker(mechkit::StepRanker& inner, std::mutex& mu) : inner_(inner), mu_(mu) {}
  std::vector<mechkit::RankedCandidate> rank(const mechkit::StateBag& s) override {
    std::lock_guard<std::mutex> lock(mu_);
    return inner_.rank(s);
  }
  std::string name() const override { return inner_.name(); }

private:
  mechkit::StepRanker& inner_;
  std::mutex& mu_;
};

int make_ranker_context(const CommonOpts& o, const std::vector<mechkit::ReactionClassDef>& pack,
                        RankerContext& ctx) {
  if (o.ranker == "oracle") {
    ctx.is_oracle = true;
    return kExitOk;
  }
  if (o.ranker == "uniform") {
    ctx.shared = mechkit::make_uniform_ranker(pack);
    return kExitOk;
  }
  if (o.ranker == "frequency") {
    if (o.train_path.empty()) {
      std::cerr << "error: --ranker frequency requires --train <train.jsonl>\n";
      return kExitUsage;
    }
    std::vector<mechkit::ElementaryStepRecord> rows;
    try {
      rows = mechkit::load_steps_jsonl(mechkit::slurp_file(o.train_path));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
    ctx.shared = mechkit::train_frequency_ranker(rows, pack);
    return kExitOk;
  }
  if (o.ranker.rfind("extern:", 0) == 0) {
    ctx.shared = std::make_unique<mechkit::ExternRanker>(o.ranker.substr(7));
    ctx.is_extern = true;
    return kExitOk;
  }
  std::cerr << "error: unknown ranker '" << o.ranker << "'\n";
  return kExitUsage;
}

// ---- beam ------------------------------------------------------------------

int cmd_beam(const CommonOpts& o) {
  auto pack = load_pack_or_exit(o.pack_path);
  auto records = load_reactions_or_exit(o.reactions_path);
  if (o.mode != "rank" && o.mode != "prob") {
    std::cerr << "error: --mode must be rank or prob\n";
    return kExitUsage;
  }
  RankerContext ctx;
  int rc = make_ranker_context(o, pack, ctx);
  if (rc != kExitOk) return rc;

  mechkit::GenOptions gopt = gen_options(o);
  mechkit::BeamConfig bcfg;
  bcfg.beam_width = o.beam_width;
  bcfg.gamma = o.gamma;
  bcfg.max_depth = o.max_depth;
  bcfg.mode = o.mode == "prob" ? mechkit::BeamMode::Prob : mechkit::BeamMode::Rank;
  if (bcfg.beam_width < 1 || bcfg.gamma <= 0 || bcfg.gamma > 1) {
    std::cerr << "error: need beam >= 1 and gamma in (0,1]\n";
    return kExitUsage;
  }

  // Truth rows: taken from --truth when given, regenerated otherwise.
  std::map<std::string, std::vector<mechkit::ElementaryStepRecord>> truth_rows;
  if (!o.truth_path.empty()) {
    try {
      for (auto& row : mechkit::load_steps_jsonl(mechkit::slurp_file(o.truth_path)))
        truth_rows[row.rxn_id].push_back(std::move(row));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  std::vector<std::string> chunks(records.size());
  std::atomic<long> recovered{0}, attempted{0};

  auto work = [&](int i) {
    const mechkit::ReactionRecord& r = records[i];
    std::string out;
    mechkit::StateBag root;
    std::vector<std::string> products;
    try {
      root = mechkit::root_state(r);
      products = mechkit::canonical_products(r);
    } catch (const std::exception& e) {
      ordered_json j;
      j["type"] = "reject";
      j["rxn_id"] = r.id;
      j["error"] = e.what();
      chunks[i] = j.dump() + "\n";
      return;
    }

    std::unique_ptr<mechkit::StepRanker> oracle;
    std::unique_ptr<mechkit::StepRanker> locked;
    mechkit::StepRanker* ranker = nullptr;
    std::vector<mechkit::ElementaryStepRecord> regenerated;
    const std::vector<mechkit::ElementaryStepRecord>* rows = nullptr;

    if (ctx.is_oracle || o.truth_path.empty()) {
      mechkit::RecordOutcome outcome = mechkit::process_record(r, pack, gopt);
      regenerated = std::move(outcome.rows);
    }
    if (!o.truth_path.empty()) {
      auto it = truth_rows.find(r.id);
      rows = it == truth_rows.end() ? nullptr : &it->second;
    } else {
      rows = &regenerated;
    }
    if (ctx.is_oracle) {
      auto templates = [&]() {
        try {
          return mechkit::select_templates(pack, r.class_name, root, o.all_classes);
        } catch (const mechkit::UnknownClassError&) {
          return std::vector<const mechkit::ElementaryTemplate*>{};
        }
      }();
      mechkit::MechNetwork net;
      std::set<std::string> product_keys;
      try {
        net = mechkit::expand_network(r, pack, gopt.limits, o.all_classes);
        product_keys = mechkit::find_product_nodes(net, products);
      } catch (const mechkit::UnknownClassError&) {
        net.root = root.key;
        net.nodes.emplace(root.key, root);
        net.depth[root.key] = 0;
      }
      mechkit::MechNetwork pruned =
          mechkit::prune_to_product(net, product_keys, gopt.limits.max_depth);
      oracle = std::make_unique<mechkit::OracleRanker>(pruned, product_keys, templates);
      ranker = oracle.get();
    } else if (ctx.is_extern) {
      locked = std::make_unique<LockedRanker>(*ctx.shared, ctx.extern_mutex);
      ranker = locked.get();
    } else {
      ranker = ctx.shared.get();
    }

    // teacher-forced per-step prediction logs along the true pathway(s)
    if (rows) {
      for (const mechkit::ElementaryStepRecord& row : *rows) {
        mechkit::StateBag before = mechkit::state_from_smiles(row.before);
        auto cands = ranker->rank(before);
        ordered_json j;
        j["type"] = "step";
        j["rxn_id"] = row.rxn_id;
        j["path_id"] = row.path_id;
        j["step_index"] = row.step_index;
        j["truth"] = row.after;
        ordered_json cand_states = ordered_json::array();
        for (auto& c : cands) cand_states.push_back(c.state.canonical);
        j["candidates"] = cand_states;
        out += j.dump() + "\n";
      }
    }

    // consecutive prediction from the root
    auto finals = mechkit::beam_search(root, *ranker, bcfg);
    bool ok = false;
    ordered_json jfinals = ordered_json::array();
    for (auto& f : finals) {
      bool has = mechkit::contains_all(f.state, products);
      ok = ok || has;
      ordered_json jf;
      jf["state"] = f.state.canonical;
      jf["objective"] = f.objective;
      jf["ranks"] = f.ranks;
      ordered_json steps = ordered_json::array();
      for (auto& s : f.steps) {
        ordered_json js;
        js["via"] = s.via;
        js["rank"] = s.rank;
        steps.push_back(js);
      }
      jf["steps"] = steps;
      jf["contains_products"] = has;
      jfinals.push_back(jf);
    }
    ordered_json j;
    j["type"] = "beam";
    j["rxn_id"] = r.id;
    j["recovered"] = ok;
    j["finals"] = jfinals;
    out += j.dump() + "\n";
    ++attempted;
    if (ok) ++recovered;
    chunks[i] = std::move(out);
  };

  int workers = ctx.is_extern ? 1 : o.workers;
  mechkit::parallel_for(static_cast<int>(records.size()), workers, work);

  ordered_json header;
  header["type"] = "header";
  header["ranker"] = o.ranker;
  header["beam"] = o.beam_width;
  header["gamma"] = o.gamma;
  header["mode"] = o.mode;
  header["max_depth"] = o.max_depth;
  header["seed"] = o.seed;

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!o.out_path.empty()) {
    file.open(o.out_path, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot write " << o.out_path << "\n";
      return kExitUsage;
    }
    out = &file;
  }
  *out << header.dump() << "\n";
  for (const std::string& chunk : chunks) *out << chunk;
  std::cerr << "beam: " << recovered.load() << "/" << attempted.load()
            << " recovered the recorded products\n";
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

int cmd_eval(const CommonOpts& o, const std::string& pred_path) {
  std::string pred_text;
  try {
    pred_text = mechkit::slurp_file(pred_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::map<std::string, bool> truth_ids;
  std::map<std::tuple<std::string, int, int>, std::vector<std::string>> truth_after;
  bool have_truth = !o.truth_path.empty();
  if (have_truth) {
    try {
      for (auto& row : mechkit::load_steps_jsonl(mechkit::slurp_file(o.truth_path))) {
        truth_ids[row.rxn_id] = true;
        truth_after[{row.rxn_id, row.path_id, row.step_index}] = row.after;
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  std::vector<mechkit::StepPredictionLog> logs;
  std::vector<std::string> orphans;
  long beam_total = 0, beam_recovered = 0;
  size_t pos = 0;
  while (pos < pred_text.size()) {
    size_t nl = pred_text.find('\n', pos);
    std::string line =
        nl == std::string::npos ? pred_text.substr(pos) : pred_text.substr(pos, nl - pos);
    pos = nl == std::string::npos ? pred_text.size() : nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line);
    std::string type = j.value("type", "step");
    if (type == "header" || type == "reject") continue;
    if (type == "beam") {
      ++beam_total;
      if (j.value("recovered", false)) ++beam_recovered;
      continue;
    }
    mechkit::StepPredictionLog log;
    log.rxn_id = j.at("rxn_id").get<std::string>();
    log.path_id = j.value("path_id", 0);
    log.step_index = j.value("step_index", 0);
    if (have_truth && !truth_ids.count(log.rxn_id)) {
      orphans.push_back(log.rxn_id);
      continue;
    }
    if (j.contains("truth")) {
      log.truth = j["truth"].get<std::vector<std::string>>();
    } else if (have_truth) {
      auto it = truth_after.find({log.rxn_id, log.path_id, log.step_index});
      if (it == truth_after.end()) {
        orphans.push_back(log.rxn_id + "#" + std::to_string(log.step_index));
        continue;
      }
      log.truth = it->second;
    } else {
      std::cerr << "error: prediction log lacks truth and no --truth given\n";
      return kExitUsage;
    }
    log.candidates = j.at("candidates").get<std::vector<std::vector<std::string>>>();
    logs.push_back(std::move(log));
  }

  if (!orphans.empty()) {
    std::sort(orphans.begin(), orphans.end());
    orphans.erase(std::unique(orphans.begin(), orphans.end()), orphans.end());
    std::cerr << "error: prediction log entries without matching truth:\n";
    for (const auto& id : orphans) std::cerr << "  " << id << "\n";
    return kExitDomain;
  }
  if (logs.empty()) {
    std::cerr << "error: no step predictions to evaluate\n";
    return kExitDomain;
  }

  std::vector<int> ks = parse_topk(o.topk);
  mechkit::EvalReport report = mechkit::evaluate(logs, ks);
  std::cout << mechkit::report_text(report);
  if (beam_total > 0) {
    std::cout << "beam product recovery: " << beam_recovered << "/" << beam_total << "\n";
  }
  ordered_json j = mechkit::report_json(report);
  if (beam_total > 0) {
    j["beam_recovered"] = beam_recovered;
    j["beam_total"] = beam_total;
  }
  if (!o.out_path.empty()) {
    std::ofstream file(o.out_path, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot write " << o.out_path << "\n";
      return kExitUsage;
    }
    file << j.dump(2) << "\n";
  }
  return kExitOk;
}

// ---- impurities ------------------------------------------------------------

int cmd_impurities(const CommonOpts& o) {
  auto pack = load_pack_or_exit(o.pack_path);
  auto records = load_reactions_or_exit(o.reactions_path);
  mechkit::GenOptions gopt = gen_options(o);

  std::vector<std::string> chunks(records.size());
  mechkit::parallel_for(static_cast<int>(records.size()), o.workers, [&](int i) {
    const mechkit::ReactionRecord& r = records[i];
    std::string out;
    try {
      auto net = mechkit::expand_network(r, pack, gopt.limits, o.all_classes);
      auto products = mechkit::canonical_products(r);
      for (const mechkit::ImpurityEntry& imp : mechkit::enumerate_impurities(net, products)) {
        ordered_json j;
        j["rxn_id"] = r.id;
        j["species"] = imp.species;
        j["depth"] = imp.depth;
        ordered_json path = ordered_json::array();
        for (const mechkit::PathStep& s : imp.pathway) {
          ordered_json js;
          js["template_id"] = s.template_id;
          js["after"] = s.after;
          path.push_back(js);
        }
        j["pathway"] = path;
        out += j.dump() + "\n";
      }
    } catch (const std::exception& e) {
      ordered_json j;
      j["rxn_id"] = r.id;
      j["error"] = e.what();
      out += j.dump() + "\n";
    }
    chunks[i] = std::move(out);
  });

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!o.out_path.empty()) {
    file.open(o.out_path, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot write " << o.out_path << "\n";
      return kExitUsage;
    }
    out = &file;
  }
  for (const std::string& chunk : chunks) *out << chunk;
  return kExitOk;
}

// ---- dot -------------------------------------------------------------------

int cmd_dot(const CommonOpts& o, const std::string& rxn_id) {
  auto pack = load_pack_or_exit(o.pack_path);
  auto records = load_reactions_or_exit(o.reactions_path);
  const mechkit::ReactionRecord* rec = nullptr;
  if (rxn_id.empty()) {
    if (!records.empty()) rec = &records.front();
  } else {
    for (const auto& r : records)
      if (r.id == rxn_id) rec = &r;
  }
  if (!rec) {
    std::cerr << "error: reaction not found\n";
    return kExitUsage;
  }
  mechkit::GenOptions gopt = gen_options(o);
  try {
    auto net = mechkit::expand_network(*rec, pack, gopt.limits, o.all_classes);
    auto products = mechkit::canonical_products(*rec);
    auto product_keys = mechkit::find_product_nodes(net, products);
    auto pruned = mechkit::prune_to_product(net, product_keys, gopt.limits.max_depth);
    std::set<std::string> highlight;
    for (const auto& [key, bag] : pruned.nodes) highlight.insert(key);
    std::string dot = mechkit::export_dot(net, highlight);
    if (!o.out_path.empty()) {
      std::ofstream file(o.out_path, std::ios::binary);
      file << dot;
    } else {
      std::cout << dot;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"mechanistic reaction pathway engine"};
  app.require_subcommand(1);

  CommonOpts vopt;
  std::string vpath;
  CLI::App* validate = app.add_subcommand("validate-pack", "parse and check a template pack");
  validate->add_option("pack", vpath, "pack path")->required();

  std::vector<std::string> canon_inputs;
  CommonOpts copt;
  CLI::App* canon = app.add_subcommand("canon", "canonicalize SMILES (args or stdin)");
  canon->add_option("smiles", canon_inputs, "SMILES strings");
  canon->add_option("--valence-slack", copt.valence_slack, "extra valence units")
      ->capture_default_str();

  CommonOpts gopt;
  CLI::App* gen = app.add_subcommand("gen", "impute mechanisms and emit the dataset splits");
  add_common(gen, gopt);

  CommonOpts bopt;
  CLI::App* beam = app.add_subcommand("beam", "consecutive step prediction with beam search");
  add_common(beam, bopt);
  beam->add_option("--beam", bopt.beam_width, "beam width")->capture_default_str();
  beam->add_option("--gamma", bopt.gamma, "rank discount factor")->capture_default_str();
  beam->add_option("--mode", bopt.mode, "rank|prob")->capture_default_str();
  beam->add_option("--ranker", bopt.ranker, "oracle|frequency|uniform|extern:<cmd>")
      ->capture_default_str();
  beam->add_option("--train", bopt.train_path, "training rows for the frequency ranker");
  beam->add_option("--truth", bopt.truth_path, "dataset rows for teacher-forced step logs");

  CommonOpts eopt;
  std::string pred_path;
  CLI::App* eval = app.add_subcommand("eval", "score a prediction log");
  eval->add_option("--pred", pred_path, "prediction log (JSONL)")->required();
  eval->add_option("--truth", eopt.truth_path, "dataset rows (JSONL)");
  eval->add_option("--topk", eopt.topk, "comma-separated k values")->capture_default_str();
  eval->add_option("--out", eopt.out_path, "write JSON report here");

  CommonOpts iopt;
  CLI::App* imp = app.add_subcommand("impurities", "report side products with pathways");
  add_common(imp, iopt, false);

  CommonOpts dopt;
  std::string dot_rxn;
  CLI::App* dot = app.add_subcommand("dot", "render one reaction's network as DOT");
  add_common(dot, dopt, false);
  dot->add_option("--rxn", dot_rxn, "reaction id (default: first record)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate_pack(vpath);
    if (canon->parsed()) return cmd_canon(canon_inputs, copt.valence_slack);
    if (gen->parsed()) return cmd_gen(gopt);
    if (beam->parsed()) return cmd_beam(bopt);
    if (eval->parsed()) return cmd_eval(eopt, pred_path);
    if (imp->parsed()) return cmd_impurities(iopt);
    if (dot->parsed()) return cmd_dot(dopt, dot_rxn);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
