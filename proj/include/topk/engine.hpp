#pragma once

// The solve loop: bounds -> winner distribution -> next question -> oracle,
// repeated until one candidate provably beats every other.

#include "topk/bounds.hpp"
#include "topk/model.hpp"
#include "topk/oracle.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace topk {

enum class Selector { EntrRedDep, EntrRedInd, Random, Baseline };

[[nodiscard]] std::string_view to_string(Selector s) noexcept;
/// Accepts entrred-dep, entrred-ind, random, baseline (and the upper-case enum spellings).
[[nodiscard]] Selector parse_selector(std::string_view text);

struct Policy {
    Selector selector = Selector::EntrRedDep;
    std::uint64_t rng_seed = 0;  // Random only
};

struct TaskNanos {
    std::int64_t bounds = 0;
    std::int64_t probability = 0;
    std::int64_t selection = 0;
    std::int64_t oracle = 0;

    [[nodiscard]] std::int64_t total() const noexcept
    {
        return bounds + probability + selection + oracle;
    }
};

struct TraceStep {
    std::size_t iteration = 0;
    Question question;
    OracleResponse response;
    std::vector<Interval> bounds;         // every candidate, after the update
    std::vector<double> probs;            // every candidate; empty when not computed
    std::optional<double> entropy;        // of probs
    std::vector<std::size_t> pruned;      // candidate ids dropped so far
};

struct SolveResult {
    Candidate winner;
    std::size_t oracle_calls = 0;
    bool certified = true;  // false only if range answers left the winner undecided
    std::vector<TraceStep> steps;
    TaskNanos nanos;
};

struct Limits {
    std::optional<std::size_t> max_calls;
};

/// Thrown when the call budget runs out; carries the trace so far.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(SolveResult partial)
        : std::runtime_error("oracle call budget exhausted"), partial_(std::move(partial))
    {
    }
    [[nodiscard]] const SolveResult& partial() const noexcept { return partial_; }

private:
    SolveResult partial_;
};

/// Lexicographic k-subsets of `entities` (by position), optionally only the first `cap`.
[[nodiscard]] std::vector<Candidate> enumerate_candidates(std::span<const EntityId> entities,
                                                          std::size_t k,
                                                          std::optional<std::size_t> cap = {});

/// The lowest-id candidate that dominates every other one on eliminated bounds.
[[nodiscard]] std::optional<std::size_t> find_winner(const ScoreModel& model);
[[nodiscard]] std::optional<Candidate> find_winner(std::span<const Candidate> candidates,
                                                   const ScoringSpec& spec,
                                                   const KnownStore& knowns);

/// Indices (into the model) of candidates no other candidate strictly dominates.
[[nodiscard]] std::vector<std::size_t> surviving_candidates(const ScoreModel& model);
[[nodiscard]] std::vector<Candidate> prune_dominated(std::span<const Candidate> candidates,
                                                     const ScoringSpec& spec,
                                                     const KnownStore& knowns);

[[nodiscard]] SolveResult solve(const Problem& problem, const Policy& policy, Oracle& oracle,
                                const Limits& limits = {});

struct TraceOptions {
    bool timings = true;  // false writes zeros so traces compare byte for byte
};

/// JSON Lines: one object per step, then a final summary line.
void write_trace(std::ostream& out, const SolveResult& result, const ScoringSpec& spec,
                 const TraceOptions& options = {});

}  // namespace topk
