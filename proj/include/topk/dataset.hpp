#pragma once

// Dataset bundles on disk and seeded synthetic instances.
//
// A bundle directory holds
//   entities.csv       id,displayName,contextText
//   <construct>.csv    arity-many id columns, then the score
//   spec.json          {constructs:[{name,arity,weight,definition}], range:[min,max], step, aggregation}
//   known.csv          optional; construct,a[,b] rows revealed before solving
//   query.txt          optional query text for prompts

#include "topk/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace topk {

/// Splits CSV text into rows of fields. Handles quoted fields with embedded
/// commas, doubled quotes and newlines; blank lines are skipped.
[[nodiscard]] std::vector<std::vector<std::string>> parse_csv(const std::string& text);

[[nodiscard]] ScoringSpec spec_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json spec_to_json(const ScoringSpec& spec);

/// Reads a bundle and enumerates the first `cap` k-subsets as candidates.
/// Binary score rows are symmetrized; (a,b) and (b,a) must agree.
[[nodiscard]] Problem load_problem(const std::filesystem::path& dir, std::size_t k,
                                   std::optional<std::size_t> cap = {});

/// Writes a bundle that load_problem reads back to the same problem.
void save_problem(const Problem& problem, const std::filesystem::path& dir);

/// Rel (unary) + Div (binary), SUM, range [0, 1].
[[nodiscard]] ScoringSpec default_spec(double grid_step = 0.5);

/// n entities E1..En (zero padded), every question's ground truth drawn
/// uniformly from the grid. Nothing is known up front.
[[nodiscard]] Problem generate_synthetic(std::size_t n, std::size_t k,
                                         std::optional<std::size_t> cap, std::uint64_t seed,
                                         const ScoringSpec& spec);

}  // namespace topk
