// Command-line front end: solve one dataset, run an experiment grid, or
// generate a synthetic bundle.
//
// Exit codes: 0 success, 2 validation error, 3 oracle failure.

#include "topk/dataset.hpp"
#include "topk/engine.hpp"
#include "topk/error.hpp"
#include "topk/experiment.hpp"
#include "topk/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

constexpr int kValidationExit = 2;
constexpr int kOracleExit = 3;

nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw topk::ValidationError("cannot read " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw topk::ValidationError(path + ": " + e.what());
    }
}

topk::LlmOracleConfig llm_config(const std::string& path)
{
    topk::LlmOracleConfig cfg;
    if (path.empty()) {
        return cfg;
    }
    const auto j = read_json(path);
    try {
        cfg.endpoint_url = j.value("endpointUrl", cfg.endpoint_url);
        cfg.api_key_env = j.value("apiKeyEnvVar", cfg.api_key_env);
        cfg.model = j.value("model", cfg.model);
        cfg.prompt_template = j.value("promptTemplate", cfg.prompt_template);
        cfg.timeout_seconds = j.value("timeoutSeconds", cfg.timeout_seconds);
        cfg.max_retries = j.value("maxRetries", cfg.max_retries);
        cfg.temperature = j.value("temperature", cfg.temperature);
    } catch (const nlohmann::json::exception& e) {
        throw topk::ValidationError(path + ": " + e.what());
    }
    return cfg;
}

std::string members(const topk::Candidate& c)
{
    std::string out = "{";
    for (std::size_t i = 0; i < c.members.size(); ++i) {
        out += (i ? "," : "") + c.members[i].str();
    }
    return out + "}";
}

struct SolveArgs {
    std::string dataset;
    std::size_t k = 0;
    std::optional<std::size_t> candidates;
    std::string policy = "entrred-dep";
    std::string oracle = "table";
    std::uint64_t seed = 0;
    std::string trace;
    std::optional<std::size_t> max_calls;
    std::string llm_config;
    bool no_timings = false;
};

void write_trace_file(const std::string& path, const topk::SolveResult& result,
                      const topk::ScoringSpec& spec, bool timings)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw topk::ValidationError("cannot write " + path);
    }
    topk::write_trace(out, result, spec, {.timings = timings});
}

int run_solve(const SolveArgs& a)
{
    const auto problem = topk::load_problem(a.dataset, a.k, a.candidates);
    const topk::Policy policy{topk::parse_selector(a.policy), a.seed};
    std::unique_ptr<topk::Oracle> oracle;
    if (a.oracle == "table") {
        oracle = std::make_unique<topk::TableOracle>(*problem.ground_truth);
    } else {
        oracle = std::make_unique<topk::LlmOracle>(llm_config(a.llm_config), problem);
    }
    try {
        const auto result = topk::solve(problem, policy, *oracle, {a.max_calls});
        if (!a.trace.empty()) {
            write_trace_file(a.trace, result, problem.spec, !a.no_timings);
        }
        std::cout << "winner=" << members(result.winner) << " id=" << result.winner.id
                  << " oracleCalls=" << result.oracle_calls
                  << " certified=" << (result.certified ? "true" : "false") << '\n';
    } catch (const topk::BudgetExceeded& e) {
        if (!a.trace.empty()) {
            write_trace_file(a.trace, e.partial(), problem.spec, !a.no_timings);
        }
        std::cerr << "error: " << e.what() << " after " << e.partial().oracle_calls
                  << " calls\n";
        return kValidationExit;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Top-k set queries with an expensive scoring oracle"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "find the top-k set of one dataset");
    solve->add_option("--dataset", solve_args.dataset, "bundle directory")->required();
    solve->add_option("--k", solve_args.k, "set size")->required()->check(CLI::PositiveNumber);
    solve->add_option("--candidates", solve_args.candidates, "keep only the first N candidates");
    solve->add_option("--policy", solve_args.policy)
        ->check(CLI::IsMember({"entrred-dep", "entrred-ind", "random", "baseline"}));
    solve->add_option("--oracle", solve_args.oracle)->check(CLI::IsMember({"table", "llm"}));
    solve->add_option("--seed", solve_args.seed, "random policy seed");
    solve->add_option("--trace", solve_args.trace, "JSON Lines trace output");
    solve->add_option("--max-calls", solve_args.max_calls, "oracle call budget");
    solve->add_option("--llm-config", solve_args.llm_config, "JSON file with LLM client settings");
    solve->add_flag("--no-timings", solve_args.no_timings, "write zero timings in the trace");

    std::string config_path;
    std::string out_dir;
    auto* experiment = app.add_subcommand("experiment", "run a seeded policy comparison");
    experiment->add_option("--config", config_path)->required();
    experiment->add_option("--out", out_dir)->required();

    std::size_t gen_n = 0;
    std::size_t gen_k = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    double gen_step = 0.5;
    auto* gen = app.add_subcommand("gen", "write a synthetic dataset bundle");
    gen->add_option("--n", gen_n)->required()->check(CLI::PositiveNumber);
    gen->add_option("--k", gen_k)->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed)->required();
    gen->add_option("--out", gen_out)->required();
    gen->add_option("--step", gen_step, "grid step on [0, 1]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kValidationExit;
    }

    try {
        if (*solve) {
            return run_solve(solve_args);
        }
        if (*experiment) {
            const auto cfg = topk::experiment_config_from_json(read_json(config_path));
            const auto rows = topk::run_experiment(cfg, out_dir);
            std::cout << rows.size() << " runs written to " << out_dir << '\n';
            return 0;
        }
        if (*gen) {
            const auto p = topk::generate_synthetic(gen_n, gen_k, std::nullopt, gen_seed,
                                                    topk::default_spec(gen_step));
            topk::save_problem(p, gen_out);
            std::cout << "wrote " << gen_n << " entities to " << gen_out << '\n';
            return 0;
        }
    } catch (const topk::OracleError& e) {
        std::cerr << "oracle error: " << e.what() << '\n';
        if (!e.raw_reply().empty()) {
            std::cerr << "raw reply: " << e.raw_reply() << '\n';
        }
        return kOracleExit;
    } catch (const topk::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationExit;
    }
    return 0;
}
