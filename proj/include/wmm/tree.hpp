/*
*   Copyright (c) 2026 wmm contributors
*
*   Licensed under the Apache License, Version 2.0 (the "License");
*   you may not use this file except in compliance with the License.
*   You may obtain a copy of the License at
*
*       http://www.apache.org/licenses/LICENSE-2.0
*
*   Unless required by applicable law or agreed to in writing, software
*   distributed under the License is distributed on an "AS IS" BASIS,
*   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
*   See the License for the specific language governing permissions and
*   limitations under the License.
*/
#ifndef WMM_TREE_HPP
#define WMM_TREE_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wmm/errors.hpp"

namespace wmm {

// A population category. observed_count is a marginal head count, present
// only for nodes whose size has actually been measured.
struct NodeSpec {
  std::string id;
  std::string label;
  std::optional<std::uint64_t> observed_count;
};

struct Edge {
  std::string parent;
  std::string child;
  auto operator<=>(const Edge&) const = default;
};

// One survey row for an edge: x of n sampled individuals at the parent fell
// into the child category. source_id groups rows drawn from the same survey
// (those must be sibling edges sharing the sample). alternative_id separates
// competing estimates for the same edge.
struct BranchEvidence {
  Edge edge;
  std::uint64_t x = 0;
  std::uint64_t n = 0;
  std::string source_id;
  std::string alternative_id;
};

// Rooted tree; estimation treats it as immutable after construction.
struct TreeSpec {
  std::string root;
  std::vector<NodeSpec> nodes;
  std::vector<Edge> edges;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

// A root-to-leaf path whose leaf count is observed; edges are listed in
// root-to-leaf order and every one of them carries evidence in the active
// combination.
struct InformativePath {
  std::string leaf;
  std::vector<Edge> edges;
  std::uint64_t leaf_count = 0;
};

// One choice of evidence alternative per evidenced edge.
using Combination = std::map<Edge, std::string>;

namespace detail {

// Index over a validated tree: parent lookup and sorted child lists.
struct TreeIndex {
  std::map<std::string, const NodeSpec*> node_by_id;
  std::map<std::string, std::string> parent_of;
  std::map<std::string, std::vector<std::string>> children_of;

  explicit TreeIndex(const TreeSpec& spec) {
    for (const auto& node : spec.nodes) {
      node_by_id.emplace(node.id, &node);
      children_of.emplace(node.id, std::vector<std::string>{});
    }
    for (const auto& edge : spec.edges) {
      parent_of.emplace(edge.child, edge.parent);
      children_of[edge.parent].push_back(edge.child);
    }
    for (auto& [id, kids] : children_of) {
      std::sort(kids.begin(), kids.end());
    }
  }

  bool is_leaf(const std::string& id) const {
    auto it = children_of.find(id);
    return it == children_of.end() || it->second.empty();
  }
};

}  // namespace detail

inline ValidationReport validate_tree(const TreeSpec& spec) {
  ValidationReport report;
  auto fail = [&report](std::string msg) {
    report.violations.push_back(std::move(msg));
  };

  std::set<std::string> ids;
  for (const auto& node : spec.nodes) {
    if (!ids.insert(node.id).second) {
      fail("duplicate node id '" + node.id + "'");
    }
  }
  if (!ids.count(spec.root)) {
    fail("root '" + spec.root + "' is not a declared node");
  }

  std::map<std::string, int> parent_count;
  std::set<Edge> seen_edges;
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& edge : spec.edges) {
    if (!ids.count(edge.parent)) {
      fail("edge parent '" + edge.parent + "' is not a declared node");
    }
    if (!ids.count(edge.child)) {
      fail("edge child '" + edge.child + "' is not a declared node");
    }
    if (edge.parent == edge.child) {
      fail("edge '" + edge.parent + "' -> '" + edge.child +
           "' is a self loop (acyclic)");
    }
    if (!seen_edges.insert(edge).second) {
      fail("duplicate edge '" + edge.parent + "' -> '" + edge.child + "'");
    }
    parent_count[edge.child] += 1;
    children[edge.parent].push_back(edge.child);
  }
  if (parent_count.count(spec.root)) {
    fail("root '" + spec.root + "' has a parent");
  }
  for (const auto& node : spec.nodes) {
    if (node.id == spec.root) continue;
    const auto it = parent_count.find(node.id);
    const int count = it == parent_count.end() ? 0 : it->second;
    if (count == 0) {
      fail("node '" + node.id +
           "' has no parent: multiple roots or detached component");
    } else if (count > 1) {
      fail("node '" + node.id + "' has multiple parents");
    }
  }

  // Walk from the root; with single parents established, an unreachable
  // node signals a cycle or a detached component.
  if (report.ok()) {
    std::set<std::string> visited{spec.root};
    std::vector<std::string> frontier{spec.root};
    while (!frontier.empty()) {
      const std::string id = frontier.back();
      frontier.pop_back();
      auto it = children.find(id);
      if (it == children.end()) continue;
      for (const auto& child : it->second) {
        if (visited.insert(child).second) frontier.push_back(child);
      }
    }
    for (const auto& node : spec.nodes) {
      if (!visited.count(node.id)) {
        fail("node '" + node.id + "' unreachable from root (acyclic)");
      }
    }
    for (const auto& node : spec.nodes) {
      if (node.observed_count && children.count(node.id) &&
          !children[node.id].empty()) {
        report.warnings.push_back(
            "node '" + node.id +
            "' has an observed count but is internal; counts contribute "
            "only at leaves, re-root or truncate to use it");
      }
    }
  }
  return report;
}

// Structure checks plus the evidence invariants.
inline ValidationReport validate_tree(
    const TreeSpec& spec, const std::vector<BranchEvidence>& evidence) {
  ValidationReport report = validate_tree(spec);
  auto fail = [&report](std::string msg) {
    report.violations.push_back(std::move(msg));
  };

  std::set<Edge> tree_edges(spec.edges.begin(), spec.edges.end());
  std::set<std::pair<Edge, std::string>> seen_rows;
  for (const auto& row : evidence) {
    const std::string where =
        "evidence for '" + row.edge.parent + "' -> '" + row.edge.child + "'";
    if (!tree_edges.count(row.edge)) {
      fail(where + ": edge not in tree");
    }
    if (row.n == 0) {
      fail(where + ": sample size must be positive");
    }
    if (row.x > row.n) {
      fail(where + ": successes exceed sample size");
    }
    if (!seen_rows.insert({row.edge, row.alternative_id}).second) {
      fail(where + ": duplicate row for alternative '" + row.alternative_id +
           "'");
    }
  }

  // Rows sharing a source describe one survey: sibling edges, one shared
  // sample size, and jointly at most n successes.
  std::map<std::string, std::vector<const BranchEvidence*>> by_source;
  for (const auto& row : evidence) {
    by_source[row.source_id].push_back(&row);
  }
  for (const auto& [source, rows] : by_source) {
    const std::string& parent0 = rows.front()->edge.parent;
    const std::uint64_t n0 = rows.front()->n;
    std::map<Edge, std::uint64_t> max_x_per_edge;
    for (const auto* row : rows) {
      if (row->edge.parent != parent0) {
        fail("source '" + source + "' spans non-sibling edges");
        break;
      }
      if (row->n != n0) {
        fail("source '" + source + "' has inconsistent sample sizes");
        break;
      }
      auto [it, fresh] = max_x_per_edge.emplace(row->edge, row->x);
      if (!fresh) it->second = std::max(it->second, row->x);
    }
    std::uint64_t total = 0;
    for (const auto& [edge, x] : max_x_per_edge) total += x;
    if (total > n0) {
      fail("source '" + source + "' successes sum past its sample size");
    }
  }
  return report;
}

// Cartesian product of per-edge alternatives, in lexicographic edge order.
inline std::vector<Combination> evidence_combinations(
    const std::vector<BranchEvidence>& evidence, std::size_t cap = 1024) {
  std::map<Edge, std::vector<std::string>> alts;
  for (const auto& row : evidence) {
    auto& list = alts[row.edge];
    if (std::find(list.begin(), list.end(), row.alternative_id) !=
        list.end()) {
      throw InvalidParameter("duplicate evidence row for edge '" +
                             row.edge.parent + "' -> '" + row.edge.child +
                             "' alternative '" + row.alternative_id + "'");
    }
    list.push_back(row.alternative_id);
  }
  std::size_t total = 1;
  for (auto& [edge, list] : alts) {
    std::sort(list.begin(), list.end());
    // total * list.size() > cap, tested without overflow.
    if (total > cap / list.size()) {
      throw CombinatorialLimit(
          "evidence combinations exceed the configured cap");
    }
    total *= list.size();
  }

  std::vector<Combination> out;
  out.reserve(total);
  Combination current;
  // Odometer enumeration over the sorted edge map.
  std::vector<std::size_t> digits(alts.size(), 0);
  for (;;) {
    current.clear();
    std::size_t slot = 0;
    for (const auto& [edge, list] : alts) {
      current.emplace(edge, list[digits[slot]]);
      ++slot;
    }
    out.push_back(current);
    std::size_t carry = alts.size();
    while (carry > 0) {
      auto it = alts.begin();
      std::advance(it, carry - 1);
      if (++digits[carry - 1] < it->second.size()) break;
      digits[carry - 1] = 0;
      --carry;
    }
    if (carry == 0) break;
  }
  return out;
}

// Leaves with observed counts whose whole root path is evidenced under the
// combination, ordered by leaf id.
inline std::vector<InformativePath> informative_paths(
    const TreeSpec& spec, const std::vector<BranchEvidence>& evidence,
    const Combination& combination) {
  (void)evidence;
  const detail::TreeIndex index(spec);

  std::vector<InformativePath> out;
  for (const auto& node : spec.nodes) {
    // A zero count cannot seed a back-calculation, so it does not qualify.
    if (!node.observed_count || *node.observed_count == 0 ||
        !index.is_leaf(node.id)) {
      continue;
    }

    InformativePath path;
    path.leaf = node.id;
    path.leaf_count = *node.observed_count;
    std::string cursor = node.id;
    bool informative = true;
    while (cursor != spec.root) {
      const auto parent_it = index.parent_of.find(cursor);
      if (parent_it == index.parent_of.end()) {
        informative = false;
        break;
      }
      const Edge edge{parent_it->second, cursor};
      if (!combination.count(edge)) {
        informative = false;
        break;
      }
      path.edges.push_back(edge);
      cursor = parent_it->second;
    }
    if (informative) {
      std::reverse(path.edges.begin(), path.edges.end());
      out.push_back(std::move(path));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const InformativePath& a, const InformativePath& b) {
              return a.leaf < b.leaf;
            });
  if (out.empty()) {
    throw EmptyPathSet(
        "no informative path: every usable leaf needs an observed count and "
        "evidence on each edge back to the root");
  }
  return out;
}

struct TruncatedTree {
  TreeSpec tree;
  std::vector<BranchEvidence> evidence;
};

// Makes counted internal nodes usable by cutting the tree below them: each
// non-root node with an observed count becomes a leaf and everything beneath
// it, edges and evidence rows alike, is dropped. Sibling groups are never
// split because a node's child edges are removed as a unit.
inline TruncatedTree truncate_at_observed(
    const TreeSpec& spec, const std::vector<BranchEvidence>& evidence) {
  const detail::TreeIndex index(spec);

  std::set<std::string> kept{spec.root};
  std::vector<std::string> frontier{spec.root};
  while (!frontier.empty()) {
    const std::string id = frontier.back();
    frontier.pop_back();
    if (id != spec.root) {
      const NodeSpec* node = index.node_by_id.count(id)
                                 ? index.node_by_id.at(id)
                                 : nullptr;
      if (node != nullptr && node->observed_count) continue;
    }
    const auto it = index.children_of.find(id);
    if (it == index.children_of.end()) continue;
    for (const auto& child : it->second) {
      if (kept.insert(child).second) frontier.push_back(child);
    }
  }

  TruncatedTree out;
  out.tree.root = spec.root;
  for (const auto& node : spec.nodes) {
    if (kept.count(node.id)) out.tree.nodes.push_back(node);
  }
  std::set<Edge> surviving;
  for (const auto& edge : spec.edges) {
    if (kept.count(edge.parent) && kept.count(edge.child)) {
      out.tree.edges.push_back(edge);
      surviving.insert(edge);
    }
  }
  for (const auto& row : evidence) {
    if (surviving.count(row.edge)) out.evidence.push_back(row);
  }
  return out;
}

}  // namespace wmm

#endif  // WMM_TREE_HPP
