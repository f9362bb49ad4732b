#pragma once

// Oracles answering questions: a ground-truth table, an HTTP chat-completion
// client, and the processing of point/range responses into grid pdfs.

#include "topk/model.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topk {

struct OracleResponse {
    enum class Kind { Point, Range };

    Kind kind = Kind::Point;
    double lo = 0.0;  // the value, for points
    double hi = 0.0;

    static OracleResponse point(double v) { return {Kind::Point, v, v}; }
    static OracleResponse range(double lo, double hi);

    [[nodiscard]] double value() const noexcept { return lo; }
};

/// Frequency pdf over the grid values covered by a set of responses.
struct ResponsePdf {
    std::vector<double> support;  // the grid S
    std::vector<double> masses;   // aligned with support

    [[nodiscard]] double min_supported() const;
    [[nodiscard]] double max_supported() const;
};

/// Each response selects the grid values inside its closed range (a point
/// r counts as [r, r]); the selections are pooled and counted. Throws if a
/// response covers no grid value.
[[nodiscard]] ResponsePdf process_responses(std::span<const OracleResponse> responses,
                                            const ScoringSpec& spec);

/// Clamps into [min, max] and rounds to the nearest grid value; exact
/// midpoints go toward min. Non-finite input throws.
[[nodiscard]] double snap_to_grid(double v, const ScoringSpec& spec);

class Oracle {
public:
    virtual ~Oracle() = default;
    virtual OracleResponse ask(const Question& q) = 0;
};

class TableOracle final : public Oracle {
public:
    explicit TableOracle(const std::map<Question, double>& table) : table_(&table) {}

    OracleResponse ask(const Question& q) override;

private:
    const std::map<Question, double>* table_;
};

[[nodiscard]] OracleResponse ask_table(const std::map<Question, double>& table,
                                       const Question& q);

struct LlmOracleConfig {
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";
    std::string model = "gpt-4o-mini";
    std::string prompt_template =
        "You are scoring items for the request: \"{query}\".\n"
        "Criterion: {construct} - {definition}\n"
        "Items:\n{entityContext}\n"
        "Subject: {entityA} {entityB}\n"
        "Reply with a single number between {min} and {max}.";
    double timeout_seconds = 30.0;
    int max_retries = 3;
    double temperature = 0.0;
    std::chrono::milliseconds backoff{500};  // doubled after every failed attempt
};

/// Checks the template carries the placeholders a construct arity needs.
void validate_template(const LlmOracleConfig& cfg, int arity);

/// Prompt material for one question.
struct PromptContext {
    std::string query;
    std::string construct;
    std::string definition;
    std::vector<std::string> entity_ids;
    std::vector<std::string> entity_texts;
    double min_score = 0.0;
    double max_score = 1.0;
};

[[nodiscard]] std::string render_prompt(const std::string& tmpl, const PromptContext& ctx);

/// First decimal number in free text, if any.
[[nodiscard]] std::optional<double> first_number(std::string_view text);

struct LlmAnswer {
    OracleResponse response;
    int retries = 0;
    std::string raw_reply;
};

/// POSTs the rendered prompt as a chat-completion request and snaps the
/// first number of the reply onto the grid. Retries timeouts, non-2xx and
/// unparseable replies with exponential backoff; throws OracleError once
/// the retries are spent.
[[nodiscard]] LlmAnswer ask_llm(const LlmOracleConfig& cfg, const PromptContext& ctx,
                                const ScoringSpec& spec);

/// Oracle adapter pulling prompt material from a problem.
class LlmOracle final : public Oracle {
public:
    LlmOracle(LlmOracleConfig cfg, const Problem& problem);

    OracleResponse ask(const Question& q) override;
    [[nodiscard]] int total_retries() const noexcept { return retries_; }

private:
    LlmOracleConfig cfg_;
    const Problem* problem_;
    int retries_ = 0;
};

}  // namespace topk
