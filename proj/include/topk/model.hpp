#pragma once

// Domain vocabulary: entities, constructs, questions, candidates and the
// known/unknown partition of the question universe.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topk {

class EntityId {
public:
    EntityId() = default;
    explicit EntityId(std::string value);

    [[nodiscard]] const std::string& str() const noexcept { return value_; }

    auto operator<=>(const EntityId&) const = default;

private:
    std::string value_;
};

enum class Aggregation { Sum };

struct Construct {
    std::string name;
    int arity = 1;
    double weight = 1.0;
    std::string definition;  // free text, only used in oracle prompts
};

/// The user-defined decomposable scoring function together with the
/// oracle response range [min, max] and its grid.
///
/// Weights must be non-negative integers so that every candidate score stays
/// on the grid lattice; this is what lets score pdfs be compared by index.
class ScoringSpec {
public:
    ScoringSpec(std::vector<Construct> constructs, double min_score, double max_score,
                double grid_step, Aggregation aggregation = Aggregation::Sum);

    [[nodiscard]] const std::vector<Construct>& constructs() const noexcept { return constructs_; }
    [[nodiscard]] const Construct& construct(std::size_t i) const { return constructs_.at(i); }
    [[nodiscard]] double min_score() const noexcept { return min_; }
    [[nodiscard]] double max_score() const noexcept { return max_; }
    [[nodiscard]] double grid_step() const noexcept { return step_; }
    [[nodiscard]] Aggregation aggregation() const noexcept { return aggregation_; }

    /// Number of grid steps between min and max.
    [[nodiscard]] std::int64_t grid_ticks() const noexcept { return ticks_; }
    [[nodiscard]] std::vector<double> grid_values() const;

    [[nodiscard]] bool on_grid(double v) const noexcept;
    /// Index of an on-grid value; throws ValidationError otherwise.
    [[nodiscard]] std::int64_t to_tick(double v) const;
    [[nodiscard]] double from_tick(std::int64_t tick) const noexcept { return min_ + step_ * tick; }

    /// Width of one question's contribution to a candidate score, in grid steps.
    [[nodiscard]] std::int64_t question_ticks(std::size_t construct) const;

    [[nodiscard]] std::optional<std::size_t> find_construct(std::string_view name) const;
    [[nodiscard]] std::size_t construct_index(std::string_view name) const;

private:
    std::vector<Construct> constructs_;
    double min_;
    double max_;
    double step_;
    std::int64_t ticks_;
    Aggregation aggregation_;
};

/// A construct instantiated on concrete entities. Arguments are kept sorted,
/// so symmetric constructs compare equal regardless of argument order.
struct Question {
    std::size_t construct = 0;
    std::vector<EntityId> args;

    static Question make(std::size_t construct, std::vector<EntityId> args);

    auto operator<=>(const Question&) const = default;
};

[[nodiscard]] std::string to_string(const Question& q, const ScoringSpec& spec);

/// Answered questions (Q_K). The unknown set is always derived.
///
/// Besides exact answers the store keeps narrowed ranges for questions whose
/// oracle reply was a range; those stay unknown but contribute only their
/// narrowed interval to candidate bounds.
class KnownStore {
public:
    using Map = std::map<Question, double>;
    using RangeMap = std::map<Question, std::pair<double, double>>;

    [[nodiscard]] std::optional<double> find(const Question& q) const;
    [[nodiscard]] bool contains(const Question& q) const { return answers_.contains(q); }
    [[nodiscard]] std::size_t size() const noexcept { return answers_.size(); }
    [[nodiscard]] bool empty() const noexcept { return answers_.empty(); }
    [[nodiscard]] const Map& answers() const noexcept { return answers_; }

    /// Narrowed [lo, hi] of an unanswered question, if any.
    [[nodiscard]] std::optional<std::pair<double, double>> find_range(const Question& q) const;
    [[nodiscard]] const RangeMap& ranges() const noexcept { return ranges_; }

private:
    friend KnownStore record_response(KnownStore knowns, const ScoringSpec& spec,
                                      const Question& q, double v);
    friend KnownStore record_range(KnownStore knowns, const ScoringSpec& spec,
                                   const Question& q, double lo, double hi);
    Map answers_;
    RangeMap ranges_;
};

struct Candidate {
    std::size_t id = 0;
    std::vector<EntityId> members;  // sorted

    static Candidate make(std::size_t id, std::vector<EntityId> members);

    [[nodiscard]] bool contains(const EntityId& e) const;
    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct Problem {
    std::vector<EntityId> entities;
    ScoringSpec spec;
    std::size_t k = 1;
    std::vector<Candidate> candidates;
    KnownStore knowns;                                   // answers available before solving
    std::optional<std::map<Question, double>> ground_truth;  // backs the table oracle
    std::map<EntityId, std::string> entity_context;      // prompt material
    std::string query_text;
};

/// Throws ValidationError if the problem breaks any structural invariant.
void validate(const Problem& problem);

/// Every question instantiable over the entities of the candidates: one per
/// entity for unary constructs, one per co-occurring tuple otherwise. Sorted.
[[nodiscard]] std::vector<Question> build_question_universe(const ScoringSpec& spec,
                                                            std::span<const Candidate> candidates);

[[nodiscard]] std::vector<Question> unknown_questions(std::span<const Question> universe,
                                                      const KnownStore& knowns);

[[nodiscard]] std::vector<Question> questions_of(const Candidate& c, const ScoringSpec& spec);

/// Returns `knowns` with q -> v added. Re-recording the same value is a no-op;
/// a conflicting value, an off-grid value or an out-of-range value throws.
[[nodiscard]] KnownStore record_response(KnownStore knowns, const ScoringSpec& spec,
                                         const Question& q, double v);

/// Narrows an unanswered question to the on-grid interval [lo, hi],
/// intersecting with any earlier narrowing. lo == hi records an answer.
[[nodiscard]] KnownStore record_range(KnownStore knowns, const ScoringSpec& spec,
                                      const Question& q, double lo, double hi);

/// Exact score of a candidate whose questions all have values in `values`.
[[nodiscard]] double exact_score(const Candidate& c, const ScoringSpec& spec,
                                 const std::map<Question, double>& values);

}  // namespace topk

template <>
struct std::hash<topk::EntityId> {
    std::size_t operator()(const topk::EntityId& e) const noexcept
    {
        return std::hash<std::string>{}(e.str());
    }
};

template <>
struct std::hash<topk::Question> {
    std::size_t operator()(const topk::Question& q) const noexcept
    {
        std::size_t h = std::hash<std::size_t>{}(q.construct);
        for (const auto& a : q.args) {
            h ^= std::hash<topk::EntityId>{}(a) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};
