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
#ifndef WMM_ESTIMATOR_HPP
#define WMM_ESTIMATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wmm/errors.hpp"
#include "wmm/linalg.hpp"
#include "wmm/parallel.hpp"
#include "wmm/rng.hpp"
#include "wmm/sampling.hpp"
#include "wmm/tree.hpp"

namespace wmm {

// Root-size estimates, one row per Monte Carlo run and one column per
// informative leaf.
struct EstimateMatrix {
  std::size_t runs = 0;
  std::vector<std::string> leaf_order;
  std::vector<double> values;  // row-major, runs x leaf_order.size()

  std::size_t columns() const { return leaf_order.size(); }
  double at(std::size_t run, std::size_t col) const {
    return values[run * leaf_order.size() + col];
  }
  double& at(std::size_t run, std::size_t col) {
    return values[run * leaf_order.size() + col];
  }
};

// Per-leaf combination weights. Entries may be negative when leaf
// estimates are strongly correlated; they always sum to 1. degenerate
// marks the uniform fallback taken when the covariance carries no
// usable precision.
struct WeightVector {
  std::vector<std::string> leaf_order;
  std::vector<double> weights;
  bool degenerate = false;
};

struct WmmResult {
  double point_estimate = 0.0;
  double log_estimate = 0.0;
  std::pair<double, double> interval{0.0, 0.0};
  WeightVector weights;
  std::vector<double> per_run_log_estimates;
  // Second-stage weights across evidence combinations; empty when a
  // single combination was used.
  std::vector<double> combination_weights;
};

// Multiplier back-calculation: scale the observed leaf count by the
// reciprocal of every sampled branch probability on the path.
inline double back_calculate(const InformativePath& path,
                             const BranchSample& sample) {
  double estimate = static_cast<double>(path.leaf_count);
  for (const auto& edge : path.edges) {
    const auto it = sample.probabilities.find(edge);
    if (it == sample.probabilities.end()) {
      throw MissingBranch("no sampled probability for edge '" + edge.parent +
                          "' -> '" + edge.child + "'");
    }
    estimate /= it->second;
  }
  return estimate;
}

namespace detail {

// Type-7 empirical quantile of an ascending-sorted series.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) {
    throw InvalidParameter("quantile of an empty series");
  }
  if (sorted.size() == 1) return sorted.front();
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

// One coherent joint draw of all sibling groups per row, so that paths
// sharing an edge see the same sampled value within a row. That shared
// randomness is what puts covariance between leaf columns.
inline EstimateMatrix build_matrix(const std::vector<InformativePath>& paths,
                                   const std::vector<SiblingGroup>& groups,
                                   std::size_t runs, Scheme scheme,
                                   std::uint64_t matrix_seed,
                                   unsigned threads = 1) {
  if (paths.empty()) {
    throw EmptyPathSet("matrix construction needs at least one path");
  }
  if (runs < 2) {
    throw InvalidParameter("run count must be at least 2");
  }
  EstimateMatrix matrix;
  matrix.runs = runs;
  matrix.leaf_order.reserve(paths.size());
  for (const auto& path : paths) matrix.leaf_order.push_back(path.leaf);
  matrix.values.assign(runs * paths.size(), 0.0);

  detail::parallel_rows(runs, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t run = begin; run < end; ++run) {
      BranchSample joint;
      joint.scheme = scheme;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        Rng rng = substream(matrix_seed, run, g);
        BranchSample part = sample_sibling_group(groups[g], scheme, rng);
        for (const auto& [edge, p] : part.probabilities) {
          joint.probabilities[edge] = p;
        }
      }
      for (std::size_t i = 0; i < paths.size(); ++i) {
        matrix.at(run, i) = back_calculate(paths[i], joint);
      }
    }
  });
  return matrix;
}

inline EstimateMatrix log_matrix(const EstimateMatrix& matrix) {
  EstimateMatrix logs = matrix;
  for (double& v : logs.values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidParameter("estimate matrix entries must be positive finite");
    }
    v = std::log(v);
  }
  return logs;
}

// Minimum-variance weights from the log-scale column covariance: row sums
// of the pseudo-inverse, normalized to total 1. Falls back to uniform
// weights when the covariance pseudo-inverse annihilates the ones vector.
inline WeightVector compute_weights(const EstimateMatrix& log_m) {
  const std::size_t cols = log_m.columns();
  WeightVector result;
  result.leaf_order = log_m.leaf_order;
  if (cols == 0) {
    throw InvalidParameter("weight computation needs at least one column");
  }
  if (cols == 1) {
    result.weights = {1.0};
    return result;
  }
  if (log_m.runs < 2) {
    throw InvalidParameter("weight computation needs at least two runs");
  }
  const std::vector<double> cov =
      column_covariance(log_m.values, log_m.runs, cols);
  const std::vector<double> pinv = pseudo_inverse(cov, cols);

  std::vector<double> row_sums(cols, 0.0);
  double denom = 0.0;
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      row_sums[i] += pinv[i * cols + j];
    }
    denom += row_sums[i];
  }
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    result.weights.assign(cols, 1.0 / static_cast<double>(cols));
    result.degenerate = true;
    return result;
  }
  result.weights.resize(cols);
  for (std::size_t i = 0; i < cols; ++i) {
    result.weights[i] = row_sums[i] / denom;
  }
  return result;
}

// Combines the leaf columns on the log scale with the given weights, then
// averages over runs. The interval is the equal-tailed empirical quantile
// pair of the per-run weighted logs, mapped back through exp; with
// pooled_interval the quantiles are taken over every log entry of the
// matrix instead (all runs and all leaves pooled, weights ignored).
inline WmmResult wmm_estimate(const EstimateMatrix& matrix,
                              const WeightVector& weights,
                              double interval_mass = 0.95,
                              bool pooled_interval = false) {
  if (weights.leaf_order != matrix.leaf_order) {
    throw InvalidParameter("weights are not aligned with the matrix columns");
  }
  if (!(interval_mass > 0.0) || !(interval_mass < 1.0)) {
    throw InvalidParameter("interval mass must lie in (0,1)");
  }
  const std::size_t cols = matrix.columns();
  WmmResult result;
  result.weights = weights;
  result.per_run_log_estimates.resize(matrix.runs);

  double total = 0.0;
  for (std::size_t run = 0; run < matrix.runs; ++run) {
    double acc = 0.0;
    for (std::size_t i = 0; i < cols; ++i) {
      acc += weights.weights[i] * std::log(matrix.at(run, i));
    }
    result.per_run_log_estimates[run] = acc;
    total += acc;
  }
  result.log_estimate = total / static_cast<double>(matrix.runs);
  result.point_estimate = std::exp(result.log_estimate);

  std::vector<double> sorted;
  if (pooled_interval) {
    sorted.reserve(matrix.values.size());
    for (const double value : matrix.values) {
      sorted.push_back(std::log(value));
    }
  } else {
    sorted = result.per_run_log_estimates;
  }
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - interval_mass) / 2.0;
  result.interval = {std::exp(detail::quantile_sorted(sorted, tail)),
                     std::exp(detail::quantile_sorted(sorted, 1.0 - tail))};
  return result;
}

struct EstimateOptions {
  std::size_t runs = 100000;
  Scheme scheme = Scheme::Dir;
  double interval_mass = 0.95;
  std::uint64_t seed = 0;
  std::size_t combination_cap = 1024;
  unsigned threads = 1;
  // Cut the tree below counted internal nodes instead of warning about them.
  bool truncate_at_observed = false;
  // Interval from pooled per-leaf log estimates instead of per-run
  // weighted logs.
  bool pooled_interval = false;
};

struct EstimateOutcome {
  WmmResult result;
  std::size_t combinations = 1;
  std::vector<std::string> warnings;
};

namespace detail {

// Shared driver: one matrix per evidence combination, each on its own
// derived seed; a second weighting stage across combinations when there
// is more than one.
inline WmmResult estimate_over_combinations(
    const TreeSpec& tree, const std::vector<BranchEvidence>& evidence,
    const std::vector<Combination>& combinations, const EstimateOptions& opt,
    std::vector<std::string>* warnings) {
  std::vector<WmmResult> stage_one;
  stage_one.reserve(combinations.size());
  std::vector<std::string> leaf_order;
  for (std::size_t j = 0; j < combinations.size(); ++j) {
    const auto paths = informative_paths(tree, evidence, combinations[j]);
    const auto groups = sibling_groups(tree, evidence, combinations[j]);
    const EstimateMatrix matrix =
        build_matrix(paths, groups, opt.runs, opt.scheme,
                     derive_seed(opt.seed, j), opt.threads);
    const WeightVector weights = compute_weights(log_matrix(matrix));
    if (weights.degenerate && warnings) {
      warnings->push_back(
          "combination " + std::to_string(j) +
          ": covariance carried no precision, using uniform leaf weights");
    }
    if (j == 0) {
      leaf_order = matrix.leaf_order;
    } else if (matrix.leaf_order != leaf_order) {
      throw InvalidParameter(
          "informative leaves differ across evidence combinations");
    }
    stage_one.push_back(wmm_estimate(matrix, weights, opt.interval_mass,
                                     opt.pooled_interval));
  }
  if (stage_one.size() == 1) return std::move(stage_one.front());

  // Second stage: treat per-combination weighted logs as columns and
  // weight them by the same minimum-variance rule.
  const std::size_t combos = stage_one.size();
  EstimateMatrix stacked;
  stacked.runs = opt.runs;
  for (std::size_t j = 0; j < combos; ++j) {
    stacked.leaf_order.push_back("combination-" + std::to_string(j));
  }
  stacked.values.resize(opt.runs * combos);
  for (std::size_t run = 0; run < opt.runs; ++run) {
    for (std::size_t j = 0; j < combos; ++j) {
      stacked.values[run * combos + j] =
          stage_one[j].per_run_log_estimates[run];
    }
  }
  const WeightVector stage_two = compute_weights(stacked);
  if (stage_two.degenerate && warnings) {
    warnings->push_back(
        "combination stage: covariance carried no precision, using uniform "
        "combination weights");
  }

  WmmResult result;
  result.combination_weights = stage_two.weights;
  result.per_run_log_estimates.resize(opt.runs);
  double total = 0.0;
  for (std::size_t run = 0; run < opt.runs; ++run) {
    double acc = 0.0;
    for (std::size_t j = 0; j < combos; ++j) {
      acc += stage_two.weights[j] * stage_one[j].per_run_log_estimates[run];
    }
    result.per_run_log_estimates[run] = acc;
    total += acc;
  }
  result.log_estimate = total / static_cast<double>(opt.runs);
  result.point_estimate = std::exp(result.log_estimate);

  std::vector<double> sorted;
  if (opt.pooled_interval) {
    sorted = stacked.values;  // already per-run per-combination logs
  } else {
    sorted = result.per_run_log_estimates;
  }
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - opt.interval_mass) / 2.0;
  result.interval = {std::exp(quantile_sorted(sorted, tail)),
                     std::exp(quantile_sorted(sorted, 1.0 - tail))};

  // Effective per-leaf weights: combination weights pushed through each
  // combination's leaf weights. They still sum to 1.
  result.weights.leaf_order = leaf_order;
  result.weights.weights.assign(leaf_order.size(), 0.0);
  for (std::size_t j = 0; j < combos; ++j) {
    for (std::size_t i = 0; i < leaf_order.size(); ++i) {
      result.weights.weights[i] +=
          stage_two.weights[j] * stage_one[j].weights.weights[i];
    }
  }
  return result;
}

}  // namespace detail

inline WmmResult two_stage_estimate(const TreeSpec& tree,
                                    const std::vector<BranchEvidence>& evidence,
                                    std::size_t runs, Scheme scheme,
                                    std::uint64_t seed, unsigned threads = 1,
                                    double interval_mass = 0.95,
                                    std::size_t combination_cap = 1024) {
  EstimateOptions opt;
  opt.runs = runs;
  opt.scheme = scheme;
  opt.seed = seed;
  opt.threads = threads;
  opt.interval_mass = interval_mass;
  opt.combination_cap = combination_cap;
  const auto combos = evidence_combinations(evidence, combination_cap);
  return detail::estimate_over_combinations(tree, evidence, combos, opt,
                                            nullptr);
}

// Full pipeline: validation, combination enumeration, estimation.
inline EstimateOutcome estimate(const TreeSpec& tree,
                                const std::vector<BranchEvidence>& evidence,
                                const EstimateOptions& options) {
  EstimateOutcome outcome;
  TreeSpec working_tree = tree;
  std::vector<BranchEvidence> working_evidence = evidence;
  if (options.truncate_at_observed) {
    TruncatedTree cut = truncate_at_observed(tree, evidence);
    working_tree = std::move(cut.tree);
    working_evidence = std::move(cut.evidence);
  }

  const ValidationReport report = validate_tree(working_tree, working_evidence);
  if (!report.ok()) {
    std::string message = "invalid tree/evidence:";
    for (const auto& violation : report.violations) {
      message += "\n  - " + violation;
    }
    throw InvalidParameter(message);
  }
  outcome.warnings = report.warnings;

  const auto combos =
      evidence_combinations(working_evidence, options.combination_cap);
  outcome.combinations = combos.size();
  outcome.result = detail::estimate_over_combinations(
      working_tree, working_evidence, combos, options, &outcome.warnings);
  return outcome;
}

enum class LeafChoice { InverseVariance, Uniform };

namespace detail {

// Normalized inverse-variance weights over raw leaf estimates; exact
// (zero-variance) leaves absorb all the weight if present.
inline std::vector<double> inverse_variance_weights(
    const std::vector<double>& variances) {
  std::vector<double> weights(variances.size(), 0.0);
  std::size_t exact = 0;
  for (const double v : variances) {
    if (!(v > 0.0)) ++exact;
  }
  if (exact > 0) {
    for (std::size_t i = 0; i < variances.size(); ++i) {
      if (!(variances[i] > 0.0)) {
        weights[i] = 1.0 / static_cast<double>(exact);
      }
    }
    return weights;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < variances.size(); ++i) {
    weights[i] = 1.0 / variances[i];
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

inline void column_mean_variance(const EstimateMatrix& matrix,
                                 std::vector<double>* means,
                                 std::vector<double>* variances) {
  const std::size_t cols = matrix.columns();
  means->assign(cols, 0.0);
  variances->assign(cols, 0.0);
  for (std::size_t run = 0; run < matrix.runs; ++run) {
    for (std::size_t i = 0; i < cols; ++i) {
      (*means)[i] += matrix.at(run, i);
    }
  }
  for (double& m : *means) m /= static_cast<double>(matrix.runs);
  for (std::size_t run = 0; run < matrix.runs; ++run) {
    for (std::size_t i = 0; i < cols; ++i) {
      const double d = matrix.at(run, i) - (*means)[i];
      (*variances)[i] += d * d;
    }
  }
  for (double& v : *variances) v /= static_cast<double>(matrix.runs - 1);
}

}  // namespace detail

// Raw-scale inverse-variance combination of the leaf column means. Serves
// as the large-M reference the repeat-sampling scheme converges to.
inline double inverse_variance_weighted_sum(const EstimateMatrix& matrix) {
  std::vector<double> means;
  std::vector<double> variances;
  detail::column_mean_variance(matrix, &means, &variances);
  const std::vector<double> weights =
      detail::inverse_variance_weights(variances);
  double total = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    total += weights[i] * means[i];
  }
  return total;
}

// Repeat weighted sampling: K outer runs; each draws Q joint samples,
// weights the leaves by inverse sample variance, picks one leaf from the
// categorical defined by those weights, and records that leaf's mean
// estimate. The final estimate is the uniform average over runs.
inline double repeat_weighted_sampling(
    const TreeSpec& tree, const std::vector<BranchEvidence>& evidence,
    std::size_t outer_runs, std::size_t inner_runs, std::uint64_t seed,
    LeafChoice choice = LeafChoice::InverseVariance,
    Scheme scheme = Scheme::Dir, unsigned threads = 1) {
  if (outer_runs < 2 || inner_runs < 2) {
    throw InvalidParameter("repeat weighted sampling needs K, Q >= 2");
  }
  const auto combos = evidence_combinations(evidence);
  if (combos.size() != 1) {
    throw InvalidParameter(
        "repeat weighted sampling expects a single evidence combination");
  }
  const auto paths = informative_paths(tree, evidence, combos.front());
  const auto groups = sibling_groups(tree, evidence, combos.front());

  std::vector<double> per_run(outer_runs, 0.0);
  detail::parallel_rows(
      outer_runs, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
          const std::uint64_t run_seed = derive_seed(seed, k);
          const EstimateMatrix matrix =
              build_matrix(paths, groups, inner_runs, scheme, run_seed, 1);
          std::vector<double> means;
          std::vector<double> variances;
          detail::column_mean_variance(matrix, &means, &variances);

          Rng pick_rng = substream(run_seed, inner_runs, 0);
          std::size_t pick = 0;
          if (choice == LeafChoice::Uniform || means.size() == 1) {
            pick = means.size() == 1 ? 0 : pick_rng.index(means.size());
          } else {
            const std::vector<double> weights =
                detail::inverse_variance_weights(variances);
            const double u = pick_rng.uniform();
            double cumulative = 0.0;
            pick = weights.size() - 1;
            for (std::size_t i = 0; i < weights.size(); ++i) {
              cumulative += weights[i];
              if (u < cumulative) {
                pick = i;
                break;
              }
            }
          }
          per_run[k] = means[pick];
        }
      });
  double total = 0.0;
  for (const double v : per_run) total += v;
  return total / static_cast<double>(outer_runs);
}

}  // namespace wmm

#endif  // WMM_ESTIMATOR_HPP
