//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_NETWORK_HPP
#define MECHKIT_NETWORK_HPP

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mechkit/pack.hpp"
#include "mechkit/rewrite.hpp"
#include "mechkit/state.hpp"

namespace mechkit {

struct ReactionRecord {
  std::string id;
  std::string class_name;
  std::vector<std::string> reactants;
  std::vector<std::string> agents;
  std::vector<std::string> products;
};

struct ExpandLimits {
  int max_depth = 12;
  int max_nodes = 5000;
  int max_paths = 64;
};

struct NetEdge {
  std::string from;
  std::string template_id;
  std::string embed_sig;
  std::string to;
};

struct MechNetwork {
  std::map<std::string, StateBag> nodes;
  std::vector<NetEdge> edges;
  std::string root;
  std::map<std::string, int> depth;
  bool truncated_nodes = false;
  bool truncated_depth = false;

  bool truncated() const { return truncated_nodes || truncated_depth; }

  std::vector<const NetEdge*> out_edges(const std::string& key) const {
    std::vector<const NetEdge*> out;
    for (const NetEdge& e : edges)
      if (e.from == key) out.push_back(&e);
    return out;
  }
};

class UnknownClassError : public std::runtime_error {
public:
  explicit UnknownClassError(const std::string& name)
      : std::runtime_error("unknown reaction class '" + name + "'") {}
};

inline StateBag root_state(const ReactionRecord& r) {
  std::vector<std::string> all = r.reactants;
  all.insert(all.end(), r.agents.begin(), r.agents.end());
  return state_from_smiles(all);
}

// Step templates available to a record: every condition of the matching
// class(es) whose required agents are satisfied by the root state. Agent
// presence gates condition selection at the root, not per intermediate state,
// so catalytic species consumed mid-cycle do not stall their own mechanism.
inline std::vector<const ElementaryTemplate*>
select_templates(const std::vector<ReactionClassDef>& pack, const std::string& class_name,
                 const StateBag& root, bool all_classes) {
  std::vector<const ElementaryTemplate*> selected;
  bool class_found = false;
  for (const ReactionClassDef& cls : pack) {
    if (!all_classes && cls.class_name != class_name) continue;
    class_found = true;
    for (const ConditionDef& cond : cls.conditions) {
      if (!agents_satisfied(cond.required_agents, root)) continue;
      for (const ElementaryTemplate& t : cond.steps) selected.push_back(&t);
    }
  }
  if (!class_found && !all_classes) throw UnknownClassError(class_name);
  return selected;
}

// Breadth-first expansion under the record's class templates; revisited state
// keys are merged so the result is a network, not a tree. Hitting a limit is
// not an error: the partial network is returned with a truncation flag.
inline MechNetwork expand_network(const ReactionRecord& r,
                                  const std::vector<ReactionClassDef>& pack,
                                  const ExpandLimits& limits, bool all_classes = false) {
  MechNetwork net;
  StateBag root = root_state(r);
  auto templates = select_templates(pack, r.class_name, root, all_classes);

  net.root = root.key;
  net.depth[net.root] = 0;
  net.nodes.emplace(net.root, std::move(root));

  std::deque<std::string> queue{net.root};
  while (!queue.empty()) {
    std::string key = queue.front();
    queue.pop_front();
    int d = net.depth[key];
    if (d >= limits.max_depth) {
      net.truncated_depth = true;
      continue;
    }
    const StateBag& bag = net.nodes.at(key);
    for (const ElementaryTemplate* t : templates) {
      for (Application& app : enumerate_applications(*t, bag, /*gate_on_agents=*/false)) {
        std::string to = app.successor.key;
        auto it = net.nodes.find(to);
        if (it == net.nodes.end()) {
          if (static_cast<int>(net.nodes.size()) >= limits.max_nodes) {
            net.truncated_nodes = true;
            continue;
          }
          net.depth[to] = d + 1;
          net.nodes.emplace(to, std::move(app.successor));
          queue.push_back(to);
        }
        net.edges.push_back({key, t->id, app.embedding.signature(), to});
      }
    }
  }
  // dedup parallel edges that carry identical labels
  std::sort(net.edges.begin(), net.edges.end(), [](const NetEdge& a, const NetEdge& b) {
    return std::tie(a.from, a.template_id, a.to, a.embed_sig) <
           std::tie(b.from, b.template_id, b.to, b.embed_sig);
  });
  net.edges.erase(std::unique(net.edges.begin(), net.edges.end(),
                              [](const NetEdge& a, const NetEdge& b) {
                                return a.from == b.from && a.template_id == b.template_id &&
                                       a.to == b.to;
                              }),
                  net.edges.end());
  return net;
}

// Keys of nodes whose bag contains every recorded product, multiplicity
// respected; co-present byproducts are allowed and expected.
inline std::set<std::string> find_product_nodes(const MechNetwork& net,
                                                const std::vector<std::string>& product_canonical) {
  std::set<std::string> out;
  for (const auto& [key, bag] : net.nodes) {
    if (contains_all(bag, product_canonical)) out.insert(key);
  }
  return out;
}

namespace net_detail {

inline std::map<std::string, int> forward_dist(const MechNetwork& net) {
  std::map<std::string, int> dist;
  dist[net.root] = 0;
  std::deque<std::string> q{net.root};
  std::map<std::string, std::vector<const NetEdge*>> adj;
  for (const NetEdge& e : net.edges) adj[e.from].push_back(&e);
  while (!q.empty()) {
    std::string v = q.front();
    q.pop_front();
    for (const NetEdge* e : adj[v]) {
      if (!dist.count(e->to)) {
        dist[e->to] = dist[v] + 1;
        q.push_back(e->to);
      }
    }
  }
  return dist;
}

inline std::map<std::string, int> backward_dist(const MechNetwork& net,
                                                const std::set<std::string>& targets) {
  std::map<std::string, int> dist;
  std::deque<std::string> q;
  for (const auto& t : targets) {
    if (net.nodes.count(t)) {
      dist[t] = 0;
      q.push_back(t);
    }
  }
  std::map<std::string, std::vector<const NetEdge*>> radj;
  for (const NetEdge& e : net.edges) radj[e.to].push_back(&e);
  while (!q.empty()) {
    std::string v = q.front();
    q.pop_front();
    for (const NetEdge* e : radj[v]) {
      if (!dist.count(e->from)) {
        dist[e->from] = dist[v] + 1;
        q.push_back(e->from);
      }
    }
  }
  return dist;
}

} // namespace net_detail

// Subnetwork of nodes and edges lying on at least one root-to-product walk of
// length <= max_depth; all parallel productive pathways are kept. Idempotent.
inline MechNetwork prune_to_product(const MechNetwork& net,
                                    const std::set<std::string>& product_keys,
                                    int max_depth) {
  MechNetwork out;
  out.root = net.root;
  out.truncated_nodes = net.truncated_nodes;
  out.truncated_depth = net.truncated_depth;

  auto df = net_detail::forward_dist(net);
  auto db = net_detail::backward_dist(net, product_keys);

  auto keep_node = [&](const std::string& k) {
    if (k == net.root) return true;
    auto fi = df.find(k);
    auto bi = db.find(k);
    return fi != df.end() && bi != db.end() && fi->second + bi->second <= max_depth;
  };

  for (const auto& [key, bag] : net.nodes) {
    if (keep_node(key)) out.nodes.emplace(key, bag);
  }
  for (const NetEdge& e : net.edges) {
    if (!out.nodes.count(e.from) || !out.nodes.count(e.to)) continue;
    auto fi = df.find(e.from);
    auto bi = db.find(e.to);
    if (fi == df.end() || bi == db.end()) continue;
    if (fi->second + 1 + bi->second <= max_depth) out.edges.push_back(e);
  }
  auto ndist = net_detail::forward_dist(out);
  for (const auto& [key, bag] : out.nodes) {
    auto it = ndist.find(key);
    if (it != ndist.end()) out.depth[key] = it->second;
  }
  // nodes not forward-reachable after edge filtering cannot sit on a pathway
  for (auto it = out.nodes.begin(); it != out.nodes.end();) {
    if (!out.depth.count(it->first) && it->first != out.root) {
      it = out.nodes.erase(it);
    } else {
      ++it;
    }
  }
  out.edges.erase(std::remove_if(out.edges.begin(), out.edges.end(),
                                 [&](const NetEdge& e) {
                                   return !out.nodes.count(e.from) || !out.nodes.count(e.to);
                                 }),
                  out.edges.end());
  out.depth[out.root] = 0;
  return out;
}

struct PathStep {
  std::string before;
  std::string template_id;
  std::string embed_sig;
  std::string after;
};

struct LinearizeResult {
  std::vector<std::vector<PathStep>> pathways;
  bool truncated = false;
};

// Every simple root-to-product path in the pruned network, in lexicographic
// order of edge labels, capped at max_paths.
inline LinearizeResult linearize_pathways(const MechNetwork& pruned,
                                          const std::set<std::string>& product_keys,
                                          int max_paths) {
  LinearizeResult result;
  std::map<std::string, std::vector<const NetEdge*>> adj;
  for (const NetEdge& e : pruned.edges) adj[e.from].push_back(&e);
  for (auto& [key, edges] : adj) {
    std::sort(edges.begin(), edges.end(), [](const NetEdge* a, const NetEdge* b) {
      return std::tie(a->template_id, a->embed_sig, a->to) <
             std::tie(b->template_id, b->embed_sig, b->to);
    });
  }

  std::vector<PathStep> current;
  std::set<std::string> on_path;
  std::function<void(const std::string&)> dfs = [&](const std::string& key) {
    if (product_keys.count(key)) {
      if (static_cast<int>(result.pathways.size()) >= max_paths) {
        result.truncated = true;
        return;
      }
      result.pathways.push_back(current);
    }
    on_path.insert(key);
    auto it = adj.find(key);
    if (it != adj.end()) {
      for (const NetEdge* e : it->second) {
        if (result.truncated) break;
        if (on_path.count(e->to)) continue;
        current.push_back({e->from, e->template_id, e->embed_sig, e->to});
        dfs(e->to);
        current.pop_back();
      }
    }
    on_path.erase(key);
  };
  if (pruned.nodes.count(pruned.root)) dfs(pruned.root);
  return result;
}

struct ImpurityEntry {
  std::string species;  // canonical SMILES
  int depth = 0;
  std::vector<PathStep> pathway;
};

// Species reachable in terminal nodes of the unpruned network that are
// neither recorded products nor already present in the root state, each with
// one shortest supporting pathway.
inline std::vector<ImpurityEntry>
enumerate_impurities(const MechNetwork& net, const std::vector<std::string>& product_canonical) {
  std::set<std::string> products(product_canonical.begin(), product_canonical.end());
  std::set<std::string> root_species;
  {
    auto it = net.nodes.find(net.root);
    if (it != net.nodes.end())
      root_species.insert(it->second.canonical.begin(), it->second.canonical.end());
  }
  std::set<std::string> has_out;
  for (const NetEdge& e : net.edges) has_out.insert(e.from);

  // shortest-path parents via BFS over label-sorted adjacency
  std::map<std::string, std::vector<const NetEdge*>> adj;
  for (const NetEdge& e : net.edges) adj[e.from].push_back(&e);
  for (auto& [key, edges] : adj) {
    std::sort(edges.begin(), edges.end(), [](const NetEdge* a, const NetEdge* b) {
      return std::tie(a->template_id, a->embed_sig, a->to) <
             std::tie(b->template_id, b->embed_sig, b->to);
    });
  }
  std::map<std::string, const NetEdge*> parent;
  {
    std::deque<std::string> q{net.root};
    std::set<std::string> seen{net.root};
    while (!q.empty()) {
      std::string v = q.front();
      q.pop_front();
      auto it = adj.find(v);
      if (it == adj.end()) continue;
      for (const NetEdge* e : it->second) {
        if (seen.insert(e->to).second) {
          parent[e->to] = e;
          q.push_back(e->to);
        }
      }
    }
  }
  auto pathway_to = [&](const std::string& key) {
    std::vector<PathStep> path;
    std::string cur = key;
    while (cur != net.root) {
      auto it = parent.find(cur);
      if (it == parent.end()) break;
      path.push_back({it->second->from, it->second->template_id, it->second->embed_sig,
                      it->second->to});
      cur = it->second->from;
    }
    std::reverse(path.begin(), path.end());
    return path;
  };

  // terminal nodes in (depth, key) order so the first sighting of a species
  // is its shallowest one
  std::vector<std::pair<int, std::string>> terminals;
  for (const auto& [key, bag] : net.nodes) {
    if (has_out.count(key)) continue;
    auto d = net.depth.find(key);
    terminals.emplace_back(d == net.depth.end() ? 0 : d->second, key);
  }
  std::sort(terminals.begin(), terminals.end());

  std::map<std::string, ImpurityEntry> by_species;
  for (auto& [d, key] : terminals) {
    const StateBag& bag = net.nodes.at(key);
    for (const std::string& species : bag.canonical) {
      if (products.count(species) || root_species.count(species)) continue;
      if (by_species.count(species)) continue;
      ImpurityEntry entry;
      entry.species = species;
      entry.depth = d;
      entry.pathway = pathway_to(key);
      by_species.emplace(species, std::move(entry));
    }
  }
  std::vector<ImpurityEntry> out;
  for (auto& [species, entry] : by_species) out.push_back(std::move(entry));
  std::sort(out.begin(), out.end(), [](const ImpurityEntry& a, const ImpurityEntry& b) {
    return std::tie(a.depth, a.species) < std::tie(b.depth, b.species);
  });
  return out;
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

// Renders the network as a DOT digraph; nodes labeled by their state key,
// highlighted keys and the edges between them styled.
inline std::string export_dot(const MechNetwork& net, const std::set<std::string>& highlight) {
  std::vector<std::pair<int, std::string>> order;
  for (const auto& [key, bag] : net.nodes) {
    auto d = net.depth.find(key);
    order.emplace_back(d == net.depth.end() ? 0 : d->second, key);
  }
  std::sort(order.begin(), order.end());
  std::map<std::string, int> index;
  std::string out = "digraph mechnet {\n  rankdir=LR;\n  node [shape=box];\n";
  for (size_t i = 0; i < order.size(); ++i) {
    index[order[i].second] = static_cast<int>(i);
    out += "  n" + std::to_string(i) + " [label=\"" + dot_escape(order[i].second) + "\"";
    if (highlight.count(order[i].second)) out += ", color=red, penwidth=2";
    out += "];\n";
  }
  std::vector<const NetEdge*> edges;
  for (const NetEdge& e : net.edges) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [](const NetEdge* a, const NetEdge* b) {
    return std::tie(a->from, a->to, a->template_id) < std::tie(b->from, b->to, b->template_id);
  });
  for (const NetEdge* e : edges) {
    out += "  n" + std::to_string(index.at(e->from)) + " -> n" +
           std::to_string(index.at(e->to)) + " [label=\"" + dot_escape(e->template_id) + "\"";
    if (highlight.count(e->from) && highlight.count(e->to)) out += ", color=red, penwidth=2";
    out += "];\n";
  }
  out += "}\n";
  return out;
}

} // namespace mechkit

#endif // MECHKIT_NETWORK_HPP
