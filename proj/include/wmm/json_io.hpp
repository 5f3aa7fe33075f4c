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
#ifndef WMM_JSON_IO_HPP
#define WMM_JSON_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wmm/errors.hpp"
#include "wmm/estimator.hpp"
#include "wmm/format.hpp"
#include "wmm/posterior.hpp"
#include "wmm/sampling.hpp"
#include "wmm/tree.hpp"

#ifndef WMM_BUILD_VERSION
#define WMM_BUILD_VERSION "unknown"
#endif

namespace wmm {

inline const char* build_version() { return WMM_BUILD_VERSION; }

struct TreeDocument {
  TreeSpec tree;
  std::vector<BranchEvidence> evidence;
};

namespace detail {

using json = nlohmann::ordered_json;

[[noreturn]] inline void schema_fail(const std::string& path,
                                     const std::string& what) {
  throw SchemaError(path + ": " + what);
}

inline void require_keys(const json& object, const std::string& path,
                         const std::vector<std::string>& required,
                         const std::vector<std::string>& optional) {
  if (!object.is_object()) schema_fail(path, "expected an object");
  for (const auto& key : required) {
    if (!object.contains(key)) schema_fail(path, "missing key '" + key + "'");
  }
  for (const auto& item : object.items()) {
    const std::string& key = item.key();
    const bool known =
        std::find(required.begin(), required.end(), key) != required.end() ||
        std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) schema_fail(path + "/" + key, "unknown key");
  }
}

inline std::string get_string(const json& object, const std::string& path,
                              const std::string& key) {
  const auto& value = object.at(key);
  if (!value.is_string()) schema_fail(path + "/" + key, "expected a string");
  return value.get<std::string>();
}

inline std::uint64_t get_count(const json& object, const std::string& path,
                               const std::string& key) {
  const auto& value = object.at(key);
  if (!value.is_number_unsigned()) {
    schema_fail(path + "/" + key, "expected a nonnegative integer");
  }
  return value.get<std::uint64_t>();
}

}  // namespace detail

// Strict parse: unknown keys anywhere are rejected, and every complaint
// names the JSON path of the offending element.
inline TreeDocument parse_tree_document(const std::string& text) {
  detail::json doc;
  try {
    doc = detail::json::parse(text);
  } catch (const detail::json::parse_error& error) {
    throw SchemaError(std::string("not valid JSON: ") + error.what());
  }
  detail::require_keys(doc, "", {"root", "nodes", "edges"}, {});

  TreeDocument out;
  out.tree.root = detail::get_string(doc, "", "root");

  const auto& nodes = doc.at("nodes");
  if (!nodes.is_array()) detail::schema_fail("/nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "/nodes/" + std::to_string(i);
    const auto& node = nodes[i];
    detail::require_keys(node, path, {"id", "label"}, {"count"});
    NodeSpec spec;
    spec.id = detail::get_string(node, path, "id");
    spec.label = detail::get_string(node, path, "label");
    if (node.contains("count")) {
      spec.observed_count = detail::get_count(node, path, "count");
    }
    out.tree.nodes.push_back(std::move(spec));
  }

  const auto& edges = doc.at("edges");
  if (!edges.is_array()) detail::schema_fail("/edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "/edges/" + std::to_string(i);
    const auto& edge = edges[i];
    detail::require_keys(edge, path, {"parent", "child", "evidence"}, {});
    Edge e;
    e.parent = detail::get_string(edge, path, "parent");
    e.child = detail::get_string(edge, path, "child");

    const auto& rows = edge.at("evidence");
    if (!rows.is_array()) {
      detail::schema_fail(path + "/evidence", "expected an array");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const std::string row_path = path + "/evidence/" + std::to_string(j);
      const auto& row = rows[j];
      detail::require_keys(row, row_path, {"x", "n", "source"}, {"alt"});
      BranchEvidence evidence;
      evidence.edge = e;
      evidence.x = detail::get_count(row, row_path, "x");
      evidence.n = detail::get_count(row, row_path, "n");
      evidence.source_id = detail::get_string(row, row_path, "source");
      evidence.alternative_id =
          row.contains("alt") ? detail::get_string(row, row_path, "alt")
                              : "default";
      out.evidence.push_back(std::move(evidence));
    }
    out.tree.edges.push_back(std::move(e));
  }
  return out;
}

inline TreeDocument load_tree_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_tree_document(text);
}

// Estimation result plus the provenance needed to rerun it exactly.
struct ResultDocument {
  double point_estimate = 0.0;
  double log_estimate = 0.0;
  std::pair<double, double> interval{0.0, 0.0};
  std::vector<std::string> leaf_order;
  std::vector<double> weights;
  Scheme scheme = Scheme::Dir;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  std::size_t combinations = 1;
  std::vector<std::string> warnings;
  std::string version = build_version();
};

inline ResultDocument make_result_document(const EstimateOutcome& outcome,
                                           const EstimateOptions& options) {
  ResultDocument doc;
  doc.point_estimate = outcome.result.point_estimate;
  doc.log_estimate = outcome.result.log_estimate;
  doc.interval = outcome.result.interval;
  doc.leaf_order = outcome.result.weights.leaf_order;
  doc.weights = outcome.result.weights.weights;
  doc.scheme = options.scheme;
  doc.runs = options.runs;
  doc.seed = options.seed;
  doc.combinations = outcome.combinations;
  doc.warnings = outcome.warnings;
  return doc;
}

inline std::string serialize_result_document(const ResultDocument& doc) {
  detail::json out;
  out["point_estimate"] = doc.point_estimate;
  out["log_estimate"] = doc.log_estimate;
  out["interval"] = {doc.interval.first, doc.interval.second};
  detail::json weights = detail::json::object();
  for (std::size_t i = 0; i < doc.leaf_order.size(); ++i) {
    weights[doc.leaf_order[i]] = doc.weights[i];
  }
  out["weights"] = std::move(weights);
  out["scheme"] = to_string(doc.scheme);
  out["runs"] = doc.runs;
  out["seed"] = doc.seed;
  out["combinations"] = doc.combinations;
  out["warnings"] = doc.warnings;
  out["version"] = doc.version;
  return out.dump(2) + "\n";
}

inline ResultDocument parse_result_document(const std::string& text) {
  detail::json doc;
  try {
    doc = detail::json::parse(text);
  } catch (const detail::json::parse_error& error) {
    throw SchemaError(std::string("not valid JSON: ") + error.what());
  }
  ResultDocument out;
  try {
    out.point_estimate = doc.at("point_estimate").get<double>();
    out.log_estimate = doc.at("log_estimate").get<double>();
    out.interval = {doc.at("interval").at(0).get<double>(),
                    doc.at("interval").at(1).get<double>()};
    for (const auto& item : doc.at("weights").items()) {
      out.leaf_order.push_back(item.key());
      out.weights.push_back(item.value().get<double>());
    }
    out.scheme = parse_scheme(doc.at("scheme").get<std::string>());
    out.runs = doc.at("runs").get<std::size_t>();
    out.seed = doc.at("seed").get<std::uint64_t>();
    out.combinations = doc.at("combinations").get<std::size_t>();
    out.warnings = doc.at("warnings").get<std::vector<std::string>>();
    out.version = doc.at("version").get<std::string>();
  } catch (const detail::json::exception& error) {
    throw SchemaError(std::string("malformed result document: ") +
                      error.what());
  }
  return out;
}

// Posterior grid as a two-column table of exact pmf values.
inline std::string posterior_grid_csv(const PosteriorGrid& grid) {
  std::string out = "z,pmf\n";
  for (std::size_t i = 0; i < grid.z_values.size(); ++i) {
    out += std::to_string(grid.z_values[i]);
    out += ',';
    out += detail::format_double(std::exp(grid.log_pmf[i]));
    out += '\n';
  }
  return out;
}

inline std::string posterior_moments_json(const PosteriorGrid& grid) {
  const PosteriorMoments moments = posterior_moments(grid);
  detail::json out;
  out["mean"] = moments.mean;
  out["sd"] = moments.sd;
  out["q025"] = posterior_quantile(grid, 0.025);
  out["q500"] = posterior_quantile(grid, 0.5);
  out["q975"] = posterior_quantile(grid, 0.975);
  return out.dump(2) + "\n";
}

// Atomic write: the content lands under a temporary name and is renamed
// over the target, so readers never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw IoError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("failed to move '" + tmp.string() + "' into place: " +
                  ec.message());
  }
}

}  // namespace wmm

#endif  // WMM_JSON_IO_HPP
