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
#ifndef WMM_SAMPLING_HPP
#define WMM_SAMPLING_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wmm/errors.hpp"
#include "wmm/rng.hpp"
#include "wmm/tree.hpp"

namespace wmm {

// Ind: each branch an independent Beta draw, simplex constraint ignored.
// Dir: joint draws that keep every sibling group on the open simplex.
enum class Scheme { Ind, Dir };

inline const char* to_string(Scheme scheme) {
  return scheme == Scheme::Ind ? "ind" : "dir";
}

inline Scheme parse_scheme(const std::string& text) {
  if (text == "ind") return Scheme::Ind;
  if (text == "dir") return Scheme::Dir;
  throw InvalidParameter("unknown scheme '" + text + "' (want ind or dir)");
}

// One evidenced branch as selected by the active combination.
struct EvidencedBranch {
  Edge edge;
  std::uint64_t x = 0;
  std::uint64_t n = 0;
  std::string source_id;
};

// Evidenced branches under one parent. Branches from the same source share
// a survey sample; any unevidenced sibling mass is a latent remainder.
struct SiblingGroup {
  std::string parent;
  std::vector<EvidencedBranch> branches;
};

// Sampled probabilities for one group's evidenced branches; the latent
// remainder is never emitted.
struct BranchSample {
  std::map<Edge, double> probabilities;
  Scheme scheme = Scheme::Dir;
};

namespace detail {

// Keeps reciprocals finite downstream.
constexpr double kUnitEps = 1e-12;

inline double clamp_unit(double p) {
  if (p < kUnitEps) return kUnitEps;
  if (p > 1.0 - kUnitEps) return 1.0 - kUnitEps;
  return p;
}

// Marsaglia-Tsang squeeze; the alpha < 1 case boosts through alpha + 1.
inline double sample_gamma(Rng& rng, double alpha) {
  if (!(alpha > 0.0)) {
    throw InvalidParameter("gamma shape must be positive");
  }
  if (alpha < 1.0) {
    const double boosted = sample_gamma(rng, alpha + 1.0);
    return boosted * std::pow(rng.uniform(), 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace detail

inline double sample_beta(Rng& rng, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InvalidParameter("beta parameters must be positive");
  }
  const double ga = detail::sample_gamma(rng, alpha);
  const double gb = detail::sample_gamma(rng, beta);
  return detail::clamp_unit(ga / (ga + gb));
}

inline std::vector<double> sample_dirichlet(Rng& rng,
                                            const std::vector<double>& alphas) {
  if (alphas.size() < 2) {
    throw InvalidParameter("dirichlet needs at least two components");
  }
  std::vector<double> draws(alphas.size());
  double total = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) {
      throw InvalidParameter("dirichlet concentrations must be positive");
    }
    draws[i] = detail::sample_gamma(rng, alphas[i]);
    total += draws[i];
  }
  for (double& d : draws) d /= total;
  return draws;
}

// Evidenced sibling groups under the given combination, parents in id order
// and branches in edge order within each group.
inline std::vector<SiblingGroup> sibling_groups(
    const TreeSpec& spec, const std::vector<BranchEvidence>& evidence,
    const Combination& combination) {
  std::map<std::pair<Edge, std::string>, const BranchEvidence*> rows;
  for (const auto& row : evidence) {
    rows.emplace(std::make_pair(row.edge, row.alternative_id), &row);
  }
  std::map<std::string, SiblingGroup> by_parent;
  for (const auto& [edge, alternative] : combination) {
    const auto it = rows.find({edge, alternative});
    if (it == rows.end()) {
      throw InvalidParameter("combination selects unknown evidence for '" +
                             edge.parent + "' -> '" + edge.child + "'");
    }
    const BranchEvidence& row = *it->second;
    auto [group_it, fresh] =
        by_parent.try_emplace(edge.parent, SiblingGroup{edge.parent, {}});
    group_it->second.branches.push_back(
        EvidencedBranch{row.edge, row.x, row.n, row.source_id});
  }
  (void)spec;
  std::vector<SiblingGroup> out;
  out.reserve(by_parent.size());
  for (auto& [parent, group] : by_parent) {
    std::sort(group.branches.begin(), group.branches.end(),
              [](const EvidencedBranch& a, const EvidencedBranch& b) {
                return a.edge < b.edge;
              });
    out.push_back(std::move(group));
  }
  return out;
}

namespace detail {

// Branch indices partitioned by source, sources in first-branch order.
inline std::vector<std::vector<std::size_t>> source_blocks(
    const SiblingGroup& group) {
  std::vector<std::vector<std::size_t>> blocks;
  std::map<std::string, std::size_t> slot_of;
  for (std::size_t i = 0; i < group.branches.size(); ++i) {
    const auto& source = group.branches[i].source_id;
    auto it = slot_of.find(source);
    if (it == slot_of.end()) {
      slot_of.emplace(source, blocks.size());
      blocks.push_back({i});
    } else {
      blocks[it->second].push_back(i);
    }
  }
  return blocks;
}

// Joint posterior draw for one survey's branches. A survey that accounts
// for its whole sample (sum x = n) partitions the parent exactly, so no
// remainder coordinate is added; otherwise the remainder gets n - sum x + 1
// and is dropped after the draw.
inline std::vector<double> propose_block(Rng& rng, const SiblingGroup& group,
                                         const std::vector<std::size_t>& block) {
  std::uint64_t sum_x = 0;
  const std::uint64_t n = group.branches[block.front()].n;
  for (const std::size_t i : block) sum_x += group.branches[i].x;

  if (block.size() == 1 && sum_x < n) {
    const auto& b = group.branches[block.front()];
    return {sample_beta(rng, static_cast<double>(b.x) + 1.0,
                        static_cast<double>(b.n - b.x) + 1.0)};
  }
  std::vector<double> alphas;
  alphas.reserve(block.size() + 1);
  for (const std::size_t i : block) {
    alphas.push_back(static_cast<double>(group.branches[i].x) + 1.0);
  }
  const bool complete = sum_x == n;
  if (!complete) {
    alphas.push_back(static_cast<double>(n - sum_x) + 1.0);
  }
  if (alphas.size() == 1) {
    // Single branch covering the full sample: probability is exactly 1
    // up to the unit clamp.
    return {clamp_unit(1.0)};
  }
  std::vector<double> draw = sample_dirichlet(rng, alphas);
  draw.resize(block.size());
  for (double& p : draw) p = clamp_unit(p);
  return draw;
}

}  // namespace detail

// Draws branch probabilities for one sibling group.
//
// Under Dir the target is the flat-prior posterior on the open simplex:
// Dirichlet factors for shared-source blocks times independent binomial
// factors, restricted to a total below 1. Per-block proposals match the
// target density up to the simplex indicator, so acceptance on the sum
// constraint yields exact draws (importance weight identically 1).
inline BranchSample sample_sibling_group(const SiblingGroup& group,
                                         Scheme scheme, Rng& rng) {
  BranchSample sample;
  sample.scheme = scheme;
  if (group.branches.empty()) return sample;

  if (scheme == Scheme::Ind) {
    for (const auto& b : group.branches) {
      sample.probabilities[b.edge] =
          sample_beta(rng, static_cast<double>(b.x) + 1.0,
                      static_cast<double>(b.n - b.x) + 1.0);
    }
    return sample;
  }

  const auto blocks = detail::source_blocks(group);
  const bool needs_rejection = blocks.size() > 1;
  constexpr std::size_t kProposalWindow = 100000;

  std::vector<double> values(group.branches.size());
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt >= kProposalWindow) {
      throw RejectionStall("sibling group under '" + group.parent +
                           "' rejected " + std::to_string(kProposalWindow) +
                           " joint proposals; evidence looks incompatible");
    }
    double total = 0.0;
    for (const auto& block : blocks) {
      const std::vector<double> draw = detail::propose_block(rng, group, block);
      for (std::size_t j = 0; j < block.size(); ++j) {
        values[block[j]] = draw[j];
        total += draw[j];
      }
    }
    if (!needs_rejection || total < 1.0) break;
  }
  for (std::size_t i = 0; i < group.branches.size(); ++i) {
    sample.probabilities[group.branches[i].edge] = values[i];
  }
  return sample;
}

}  // namespace wmm

#endif  // WMM_SAMPLING_HPP
