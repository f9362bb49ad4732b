#pragma once

// Seeded policy comparisons: one row per (dataset, k, M, policy, trial),
// written as runs.csv plus a per-group summary.csv.

#include "topk/engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace topk {

struct ExperimentConfig {
    std::vector<std::string> datasets;             // bundle directories
    std::optional<std::size_t> synthetic_entities;  // adds a "synthetic" dataset, fresh per trial
    std::vector<std::size_t> k_list;
    std::vector<std::size_t> candidate_counts;
    std::vector<Selector> policies;
    std::size_t trials = 1;
    std::uint64_t seed_base = 0;
    double grid_step = 0.5;  // synthetic instances only
    std::size_t threads = 0;  // 0 = hardware concurrency
    bool timings = true;      // false zeroes every nanosecond column
};

/// Keys: datasets, syntheticEntities, kList, candidateCountList, policies,
/// trials, seedBase, gridStep, threads, timings.
[[nodiscard]] ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct RunRow {
    std::string dataset;
    std::size_t k = 0;
    std::size_t m = 0;  // candidates actually maintained
    Selector policy = Selector::EntrRedDep;
    std::size_t trial = 0;
    std::size_t oracle_calls = 0;
    std::int64_t wall_nanos = 0;
    TaskNanos nanos;
    bool recall = false;  // winner score equals the ground-truth maximum
};

/// Runs every configuration on a worker pool; rows come back sorted.
[[nodiscard]] std::vector<RunRow> run_experiment(const ExperimentConfig& cfg);

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<RunRow>& rows);

/// run_experiment, then runs.csv and summary.csv into `out_dir`.
std::vector<RunRow> run_experiment(const ExperimentConfig& cfg,
                                   const std::filesystem::path& out_dir);

}  // namespace topk
