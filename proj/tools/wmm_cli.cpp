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
#include <CLI11.hpp>

#include <wmm/wmm.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

// Exit codes are part of the tool's contract; scripts depend on them.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitEmptyPathSet = 2;
constexpr int kExitRejectionStall = 3;
constexpr int kExitInvalidInput = 4;
constexpr int kExitEmptySupport = 5;

unsigned resolve_threads() {
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("WMM_THREADS")) {
        char* end = nullptr;
        const unsigned long parsed = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && parsed >= 1 && parsed <= 1024) {
            threads = static_cast<unsigned>(parsed);
        }
    }
    return threads;
}

wmm::PriorSpec parse_prior(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw wmm::InvalidParameter(
            "prior must look like uniform:u,v or gauss:mu,sigma");
    }
    const std::string kind = text.substr(0, colon);
    const std::string args = text.substr(colon + 1);
    const auto comma = args.find(',');
    if (comma == std::string::npos) {
        throw wmm::InvalidParameter(
            "prior must carry two comma-separated numbers");
    }
    double first = 0.0;
    double second = 0.0;
    try {
        std::size_t used_first = 0;
        std::size_t used_second = 0;
        const std::string first_text = args.substr(0, comma);
        const std::string second_text = args.substr(comma + 1);
        first = std::stod(first_text, &used_first);
        second = std::stod(second_text, &used_second);
        if (used_first != first_text.size() || used_second != second_text.size()) {
            throw wmm::InvalidParameter("prior numbers did not parse cleanly");
        }
    } catch (const wmm::InvalidParameter&) {
        throw;
    } catch (const std::exception&) {
        throw wmm::InvalidParameter("prior numbers did not parse cleanly");
    }
    if (kind == "uniform") {
        return wmm::PriorSpec::uniform(first, second);
    }
    if (kind == "gauss") {
        return wmm::PriorSpec::gaussian(first, second);
    }
    throw wmm::InvalidParameter("prior kind must be uniform or gauss");
}

int run_estimate(const std::string& tree_path, std::uint64_t runs,
                 std::uint64_t seed, const std::string& scheme_text,
                 double interval_mass, bool two_stage,
                 const std::string& out_path, unsigned threads) {
    const wmm::TreeDocument doc = wmm::load_tree_document(tree_path);

    wmm::EstimateOptions options;
    options.runs = runs;
    options.scheme = wmm::parse_scheme(scheme_text);
    options.interval_mass = interval_mass;
    options.seed = seed;
    options.threads = threads;

    const auto combos =
        wmm::evidence_combinations(doc.evidence, options.combination_cap);
    if (combos.size() > 1 && !two_stage) {
        std::ostringstream msg;
        msg << "tree carries " << combos.size()
            << " evidence combinations; rerun with --two-stage true to combine them";
        throw wmm::InvalidParameter(msg.str());
    }

    const wmm::EstimateOutcome outcome =
        wmm::estimate(doc.tree, doc.evidence, options);
    const wmm::ResultDocument result =
        wmm::make_result_document(outcome, options);
    wmm::write_file_atomic(out_path, wmm::serialize_result_document(result));

    std::cout << "point estimate " << wmm::detail::format_double(result.point_estimate)
              << " interval [" << wmm::detail::format_double(result.interval.first)
              << ", " << wmm::detail::format_double(result.interval.second)
              << "] written to " << out_path << "\n";
    for (const auto& warning : outcome.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    return kExitOk;
}

int run_simulate(int experiment, std::uint64_t trials, std::uint64_t seed,
                 const std::string& out_dir, unsigned threads) {
    wmm::ExperimentConfig config =
        wmm::ExperimentConfig::standard(experiment, trials, seed);
    config.threads = threads;

    const wmm::ExperimentResult result = wmm::run_experiment(config);

    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    wmm::write_file_atomic((dir / "trials.csv").string(),
                           wmm::trial_table_csv(result.records));
    wmm::write_file_atomic((dir / "summary.csv").string(),
                           wmm::summary_csv(result));

    std::cout << "experiment " << experiment << " trials " << trials
              << " runs " << config.wmm_runs << " seed " << seed << "\n";
    std::cout << "method       rmse\n";
    for (const auto& entry : result.rmse) {
        std::ostringstream row;
        row << wmm::to_string(entry.method);
        while (row.str().size() < 13) {
            row << ' ';
        }
        std::cout << row.str() << wmm::detail::format_double(entry.rmse) << "\n";
    }
    return kExitOk;
}

int run_posterior(const std::string& mode,
                  const std::vector<std::uint64_t>& counts,
                  const std::vector<double>& hyper,
                  const std::string& prior_text, std::uint64_t mc_samples,
                  std::uint64_t seed, const std::string& out_prefix,
                  unsigned threads) {
    const wmm::PriorSpec prior = parse_prior(prior_text);

    wmm::PosteriorGrid grid;
    if (mode == "simple") {
        if (counts.size() != 2) {
            throw wmm::InvalidParameter(
                "simple mode needs --counts a,b (two values)");
        }
        std::vector<double> h = hyper;
        if (h.empty()) {
            h.assign(4, 1.0);
        }
        if (h.size() != 4) {
            throw wmm::InvalidParameter(
                "simple mode needs --hyper alpha_p,beta_p,alpha_q,beta_q");
        }
        grid = wmm::posterior_simple(counts[0], counts[1], h[0], h[1], h[2],
                                     h[3], prior);
    } else if (mode == "hidden") {
        if (counts.size() != 3) {
            throw wmm::InvalidParameter(
                "hidden mode needs --counts b,c,c_tilde (three values)");
        }
        std::vector<double> h = hyper;
        if (h.empty()) {
            h.assign(8, 1.0);
        }
        if (h.size() != 8) {
            throw wmm::InvalidParameter(
                "hidden mode needs --hyper with eight values "
                "(p, q, r, s pairs)");
        }
        wmm::HiddenHyper hh;
        hh.alpha_p = h[0];
        hh.beta_p = h[1];
        hh.alpha_q = h[2];
        hh.beta_q = h[3];
        hh.alpha_r = h[4];
        hh.beta_r = h[5];
        hh.alpha_s = h[6];
        hh.beta_s = h[7];
        grid = wmm::posterior_hidden(counts[0], counts[1], counts[2], hh, prior,
                                     mc_samples, seed, threads);
    } else {
        throw wmm::InvalidParameter("mode must be simple or hidden");
    }

    wmm::write_file_atomic(out_prefix + ".csv", wmm::posterior_grid_csv(grid));
    wmm::write_file_atomic(out_prefix + ".json",
                           wmm::posterior_moments_json(grid));

    const wmm::PosteriorMoments moments = wmm::posterior_moments(grid);
    std::cout << "posterior mean " << wmm::detail::format_double(moments.mean)
              << " sd " << wmm::detail::format_double(moments.sd)
              << " written to " << out_prefix << ".csv and " << out_prefix
              << ".json\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted multiplier estimation on tree-structured survey evidence"};
    app.set_version_flag("--version", std::string(wmm::build_version()));
    app.require_subcommand(1);

    std::string tree_path;
    std::uint64_t runs = 100000;
    std::uint64_t seed = 0;
    std::string scheme_text = "dir";
    double interval_mass = 0.95;
    bool two_stage = true;
    std::string out_path;

    CLI::App* estimate = app.add_subcommand(
        "estimate", "Estimate the root population size from a tree document");
    estimate->add_option("--tree", tree_path, "Tree document (JSON)")
        ->required();
    estimate->add_option("--runs", runs, "Monte Carlo runs per combination")
        ->capture_default_str();
    estimate->add_option("--seed", seed, "Master seed")->capture_default_str();
    estimate->add_option("--scheme", scheme_text, "Branch sampling scheme")
        ->check(CLI::IsMember({"ind", "dir"}))
        ->capture_default_str();
    estimate->add_option("--interval", interval_mass, "Central interval mass")
        ->check(CLI::Range(1e-6, 1.0 - 1e-6))
        ->capture_default_str();
    estimate
        ->add_option("--two-stage", two_stage,
                     "Allow combining multiple evidence alternatives")
        ->capture_default_str();
    estimate->add_option("--out", out_path, "Result document path (JSON)")
        ->required();

    int experiment = 1;
    std::uint64_t trials = 1000;
    std::string out_dir;

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Run a benchmark experiment and write RMSE tables");
    simulate->add_option("--experiment", experiment, "Experiment id (1-5)")
        ->check(CLI::Range(1, 5))
        ->capture_default_str();
    simulate->add_option("--trials", trials, "Number of synthetic trials")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_option("--seed", seed, "Master seed")->capture_default_str();
    simulate->add_option("--out-dir", out_dir, "Directory for CSV output")
        ->required();

    std::string mode;
    std::vector<std::uint64_t> counts;
    std::vector<double> hyper;
    std::string prior_text;
    std::uint64_t mc_samples = 200000;
    std::string out_prefix;

    CLI::App* posterior = app.add_subcommand(
        "posterior", "Evaluate an exact posterior for the root size");
    posterior->add_option("--mode", mode, "Posterior family")
        ->check(CLI::IsMember({"simple", "hidden"}))
        ->required();
    posterior->add_option("--counts", counts, "Observed leaf counts")
        ->delimiter(',')
        ->required();
    posterior
        ->add_option("--hyper", hyper,
                     "Beta hyperparameters (defaults to all ones)")
        ->delimiter(',');
    posterior
        ->add_option("--prior", prior_text,
                     "Root-size prior: uniform:u,v or gauss:mu,sigma")
        ->required();
    posterior
        ->add_option("--mc-samples", mc_samples,
                     "Monte Carlo draws for hidden mode")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    posterior->add_option("--seed", seed, "Master seed")->capture_default_str();
    posterior
        ->add_option("--out", out_prefix,
                     "Output prefix; writes <prefix>.csv and <prefix>.json")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return kExitInvalidInput;
    }

    const unsigned threads = resolve_threads();
    try {
        if (estimate->parsed()) {
            return run_estimate(tree_path, runs, seed, scheme_text,
                                interval_mass, two_stage, out_path, threads);
        }
        if (simulate->parsed()) {
            return run_simulate(experiment, trials, seed, out_dir, threads);
        }
        if (posterior->parsed()) {
            return run_posterior(mode, counts, hyper, prior_text, mc_samples,
                                 seed, out_prefix, threads);
        }
    } catch (const wmm::EmptyPathSet& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEmptyPathSet;
    } catch (const wmm::RejectionStall& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRejectionStall;
    } catch (const wmm::EmptySupport& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEmptySupport;
    } catch (const wmm::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const wmm::InvalidParameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const wmm::CombinatorialLimit& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const wmm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
