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
#ifndef WMM_SIMULATE_HPP
#define WMM_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wmm/errors.hpp"
#include "wmm/estimator.hpp"
#include "wmm/format.hpp"
#include "wmm/parallel.hpp"
#include "wmm/posterior.hpp"
#include "wmm/rng.hpp"
#include "wmm/tree.hpp"

namespace wmm {

enum class Method { ClosedForm, WmmInd, WmmDir };

inline const char* to_string(Method method) {
  switch (method) {
    case Method::ClosedForm:
      return "closed_form";
    case Method::WmmInd:
      return "wmm_ind";
    default:
      return "wmm_dir";
  }
}

// One benchmark scenario on the two-split chain: true root size 1000,
// branch probabilities 0.25 and 0.8, per-trial surveys of a fixed size.
struct ExperimentConfig {
  int experiment_id = 1;
  PriorSpec prior = PriorSpec::uniform(750.0, 1250.0);
  long survey_size = 50;
  long z_true = 1000;
  double p_true = 0.25;
  double q_true = 0.8;
  std::size_t trials = 1000;
  std::size_t wmm_runs = 2000;
  std::vector<Method> methods{Method::ClosedForm, Method::WmmInd,
                              Method::WmmDir};
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  // Point functional for the reference posterior: mean of log z by
  // default, log of the posterior mean when set.
  bool bayes_point_log_mean = false;

  // The five standard scenarios: survey size 50 or 1000 crossed with a
  // tight uniform, a wide uniform, and one deliberately misplaced
  // Gaussian prior.
  static ExperimentConfig standard(int id, std::size_t trials,
                                   std::uint64_t seed) {
    ExperimentConfig config;
    config.experiment_id = id;
    config.trials = trials;
    config.master_seed = seed;
    switch (id) {
      case 1:
        config.prior = PriorSpec::uniform(750.0, 1250.0);
        config.survey_size = 50;
        break;
      case 2:
        config.prior = PriorSpec::uniform(0.0, 10000.0);
        config.survey_size = 50;
        break;
      case 3:
        config.prior = PriorSpec::uniform(750.0, 1250.0);
        config.survey_size = 1000;
        break;
      case 4:
        config.prior = PriorSpec::uniform(0.0, 10000.0);
        config.survey_size = 1000;
        break;
      case 5:
        config.prior = PriorSpec::gaussian(2000.0, 150.0);
        config.survey_size = 50;
        break;
      default:
        throw InvalidParameter("experiment id must be between 1 and 5");
    }
    return config;
  }

  bool wants(Method method) const {
    return std::find(methods.begin(), methods.end(), method) != methods.end();
  }
};

struct TrialRecord {
  std::size_t trial = 0;
  long s_p = 0;
  long s_q = 0;
  long a = 0;
  long b = 0;
  double log_closed = std::numeric_limits<double>::quiet_NaN();
  double log_ind = std::numeric_limits<double>::quiet_NaN();
  double log_dir = std::numeric_limits<double>::quiet_NaN();

  double log_estimate(Method method) const {
    switch (method) {
      case Method::ClosedForm:
        return log_closed;
      case Method::WmmInd:
        return log_ind;
      default:
        return log_dir;
    }
  }
};

struct MethodRmse {
  Method method = Method::ClosedForm;
  double rmse = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialRecord> records;
  std::vector<MethodRmse> rmse;
};

namespace detail {

// The trial's tree: the first split is a complete two-branch survey
// (same source), the second a single evidenced branch with a latent
// sibling.
inline void make_trial_tree(long a, long b, long s_p, long s_q, long survey,
                            TreeSpec* tree,
                            std::vector<BranchEvidence>* evidence) {
  tree->root = "Z";
  tree->nodes = {
      NodeSpec{"Z", "root", std::nullopt},
      NodeSpec{"A", "first-split remainder", static_cast<std::uint64_t>(a)},
      NodeSpec{"At", "first-split branch", std::nullopt},
      NodeSpec{"B", "observed below second split",
               static_cast<std::uint64_t>(b)},
  };
  tree->edges = {Edge{"Z", "A"}, Edge{"Z", "At"}, Edge{"At", "B"}};
  *evidence = {
      BranchEvidence{Edge{"Z", "A"}, static_cast<std::uint64_t>(survey - s_p),
                     static_cast<std::uint64_t>(survey), "sp", "only"},
      BranchEvidence{Edge{"Z", "At"}, static_cast<std::uint64_t>(s_p),
                     static_cast<std::uint64_t>(survey), "sp", "only"},
      BranchEvidence{Edge{"At", "B"}, static_cast<std::uint64_t>(s_q),
                     static_cast<std::uint64_t>(survey), "sq", "only"},
  };
}

inline double wmm_trial_log_estimate(const TreeSpec& tree,
                                     const std::vector<BranchEvidence>& ev,
                                     std::size_t runs, Scheme scheme,
                                     std::uint64_t matrix_seed) {
  const auto combos = evidence_combinations(ev);
  const auto paths = informative_paths(tree, ev, combos.front());
  const auto groups = sibling_groups(tree, ev, combos.front());
  const EstimateMatrix matrix =
      build_matrix(paths, groups, runs, scheme, matrix_seed, 1);
  const WeightVector weights = compute_weights(log_matrix(matrix));
  return wmm_estimate(matrix, weights).log_estimate;
}

}  // namespace detail

// Simulates one trial: survey draws for both branches, leaf counts via
// the two-step binomial, then every requested method's log-estimate.
inline TrialRecord run_trial(const ExperimentConfig& config, std::size_t i) {
  const std::uint64_t trial_seed = derive_seed(config.master_seed, i);
  Rng data_rng = substream(trial_seed, 0, 0);

  TrialRecord record;
  record.trial = i;
  record.s_p = data_rng.binomial(config.survey_size, config.p_true);
  record.s_q = data_rng.binomial(config.survey_size, config.q_true);
  record.a = data_rng.binomial(config.z_true, 1.0 - config.p_true);
  record.b = data_rng.binomial(config.z_true - record.a, config.q_true);

  if (config.wants(Method::ClosedForm)) {
    const double s = static_cast<double>(config.survey_size);
    const PosteriorGrid grid = posterior_simple(
        record.a, record.b, static_cast<double>(record.s_p) + 1.0,
        s - static_cast<double>(record.s_p) + 1.0,
        static_cast<double>(record.s_q) + 1.0,
        s - static_cast<double>(record.s_q) + 1.0, config.prior);
    record.log_closed = config.bayes_point_log_mean ? posterior_log_mean(grid)
                                                    : posterior_mean_log(grid);
  }
  TreeSpec tree;
  std::vector<BranchEvidence> evidence;
  if (config.wants(Method::WmmInd) || config.wants(Method::WmmDir)) {
    detail::make_trial_tree(record.a, record.b, record.s_p, record.s_q,
                            config.survey_size, &tree, &evidence);
  }
  if (config.wants(Method::WmmInd)) {
    record.log_ind = detail::wmm_trial_log_estimate(
        tree, evidence, config.wmm_runs, Scheme::Ind, derive_seed(trial_seed, 1));
  }
  if (config.wants(Method::WmmDir)) {
    record.log_dir = detail::wmm_trial_log_estimate(
        tree, evidence, config.wmm_runs, Scheme::Dir, derive_seed(trial_seed, 2));
  }
  return record;
}

// Root mean squared error of one method's log estimates against a known
// log truth.
inline double method_rmse(const std::vector<TrialRecord>& records,
                          Method method, double log_true) {
  if (records.empty()) {
    throw InvalidParameter("RMSE needs at least one trial record");
  }
  double sum_sq = 0.0;
  for (const auto& record : records) {
    const double d = log_true - record.log_estimate(method);
    sum_sq += d * d;
  }
  return std::sqrt(sum_sq / static_cast<double>(records.size()));
}

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.trials < 2) {
    throw InvalidParameter("an experiment needs at least 2 trials");
  }
  ExperimentResult result;
  result.config = config;
  result.records.resize(config.trials);
  detail::parallel_rows(config.trials, config.threads,
                        [&](std::size_t begin, std::size_t end) {
                          for (std::size_t i = begin; i < end; ++i) {
                            result.records[i] = run_trial(config, i);
                          }
                        });

  const double log_true = std::log(static_cast<double>(config.z_true));
  for (const Method method : config.methods) {
    result.rmse.push_back({method, method_rmse(result.records, method, log_true)});
  }
  return result;
}

struct CorrelationTable {
  std::vector<Method> methods;
  std::vector<double> values;  // row-major, methods x methods

  double at(std::size_t i, std::size_t j) const {
    return values[i * methods.size() + j];
  }
};

// Pairwise Pearson correlations of per-trial log-estimates.
inline CorrelationTable correlation_table(
    const std::vector<TrialRecord>& records,
    const std::vector<Method>& methods) {
  if (records.size() < 3) {
    throw InvalidParameter("correlations need at least 3 trials");
  }
  const std::size_t k = methods.size();
  const auto n = static_cast<double>(records.size());
  std::vector<double> means(k, 0.0);
  for (const auto& record : records) {
    for (std::size_t i = 0; i < k; ++i) {
      means[i] += record.log_estimate(methods[i]);
    }
  }
  for (double& m : means) m /= n;

  std::vector<double> cov(k * k, 0.0);
  for (const auto& record : records) {
    for (std::size_t i = 0; i < k; ++i) {
      const double di = record.log_estimate(methods[i]) - means[i];
      for (std::size_t j = 0; j < k; ++j) {
        cov[i * k + j] += di * (record.log_estimate(methods[j]) - means[j]);
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(cov[i * k + i] > 0.0)) {
      throw ConstantSeries(std::string("method '") + to_string(methods[i]) +
                           "' produced a constant series");
    }
  }
  CorrelationTable table;
  table.methods = methods;
  table.values.resize(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      table.values[i * k + j] =
          cov[i * k + j] / std::sqrt(cov[i * k + i] * cov[j * k + j]);
    }
  }
  return table;
}

// CSV emission. Headers are fixed so downstream tooling can rely on them.
inline std::string trial_table_csv(const std::vector<TrialRecord>& records) {
  std::string out =
      "trial,s_p,s_q,A,B,logZ_closed,logZ_wmm_ind,logZ_wmm_dir\n";
  for (const auto& r : records) {
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.s_p);
    out += ',';
    out += std::to_string(r.s_q);
    out += ',';
    out += std::to_string(r.a);
    out += ',';
    out += std::to_string(r.b);
    out += ',';
    out += detail::format_double(r.log_closed);
    out += ',';
    out += detail::format_double(r.log_ind);
    out += ',';
    out += detail::format_double(r.log_dir);
    out += '\n';
  }
  return out;
}

inline std::string summary_csv(const ExperimentResult& result) {
  std::string out = "experiment,method,rmse,trials,wmm_runs,seed\n";
  for (const auto& row : result.rmse) {
    out += std::to_string(result.config.experiment_id);
    out += ',';
    out += to_string(row.method);
    out += ',';
    out += detail::format_double(row.rmse);
    out += ',';
    out += std::to_string(result.config.trials);
    out += ',';
    out += std::to_string(result.config.wmm_runs);
    out += ',';
    out += std::to_string(result.config.master_seed);
    out += '\n';
  }
  return out;
}

inline std::string correlation_csv(const CorrelationTable& table) {
  std::string out = "method_a,method_b,pearson\n";
  for (std::size_t i = 0; i < table.methods.size(); ++i) {
    for (std::size_t j = 0; j < table.methods.size(); ++j) {
      out += to_string(table.methods[i]);
      out += ',';
      out += to_string(table.methods[j]);
      out += ',';
      out += detail::format_double(table.at(i, j));
      out += '\n';
    }
  }
  return out;
}

}  // namespace wmm

#endif  // WMM_SIMULATE_HPP
