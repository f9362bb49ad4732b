#include "topk/oracle.hpp"

#include "topk/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <sstream>
#include <thread>

namespace topk {

namespace {

constexpr double kRangeTolerance = 1e-9;

std::string format_number(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

void replace_all(std::string& text, std::string_view key, std::string_view value)
{
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
}

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;
};

Endpoint split_url(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ValidationError("endpoint url needs a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

OracleResponse OracleResponse::range(double lo, double hi)
{
    if (!(lo < hi)) {
        throw ValidationError("range response needs lo < hi");
    }
    return {Kind::Range, lo, hi};
}

double ResponsePdf::min_supported() const
{
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (masses[i] > 0.0) {
            return support[i];
        }
    }
    throw ValidationError("empty response pdf");
}

double ResponsePdf::max_supported() const
{
    for (std::size_t i = support.size(); i-- > 0;) {
        if (masses[i] > 0.0) {
            return support[i];
        }
    }
    throw ValidationError("empty response pdf");
}

ResponsePdf process_responses(std::span<const OracleResponse> responses, const ScoringSpec& spec)
{
    if (responses.empty()) {
        throw ValidationError("no responses to process");
    }
    ResponsePdf out;
    out.support = spec.grid_values();
    std::vector<int> counts(out.support.size(), 0);
    int pooled = 0;
    for (const auto& r : responses) {
        if (r.lo < spec.min_score() - kRangeTolerance || r.hi > spec.max_score() + kRangeTolerance
            || r.lo > r.hi) {
            throw ValidationError("response outside the score range");
        }
        int mapped = 0;
        for (std::size_t i = 0; i < out.support.size(); ++i) {
            const double s = out.support[i];
            if (r.lo - kRangeTolerance <= s && s <= r.hi + kRangeTolerance) {
                ++counts[i];
                ++mapped;
            }
        }
        if (mapped == 0) {
            throw ValidationError("empty mapping: response covers no grid value");
        }
        pooled += mapped;
    }
    out.masses.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out.masses[i] = static_cast<double>(counts[i]) / static_cast<double>(pooled);
    }
    return out;
}

double snap_to_grid(double v, const ScoringSpec& spec)
{
    if (!std::isfinite(v)) {
        throw ValidationError("cannot snap a non-finite score");
    }
    const double clamped = std::clamp(v, spec.min_score(), spec.max_score());
    const double pos = (clamped - spec.min_score()) / spec.grid_step();
    // Nearest tick, ties toward min: ceil(pos - 0.5).
    auto tick = static_cast<std::int64_t>(std::ceil(pos - 0.5 - 1e-12));
    tick = std::clamp<std::int64_t>(tick, 0, spec.grid_ticks());
    return spec.from_tick(tick);
}

OracleResponse ask_table(const std::map<Question, double>& table, const Question& q)
{
    auto it = table.find(q);
    if (it == table.end()) {
        throw OracleError("ground truth incomplete: no answer for question");
    }
    return OracleResponse::point(it->second);
}

OracleResponse TableOracle::ask(const Question& q)
{
    return ask_table(*table_, q);
}

void validate_template(const LlmOracleConfig& cfg, int arity)
{
    const auto& t = cfg.prompt_template;
    if (arity >= 1 && t.find("{entityA}") == std::string::npos) {
        throw ValidationError("prompt template lacks {entityA}");
    }
    if (arity >= 2 && t.find("{entityB}") == std::string::npos) {
        throw ValidationError("prompt template lacks {entityB}");
    }
    if (arity > 2) {
        throw ValidationError("prompt templates support constructs of arity 1 and 2");
    }
}

std::string render_prompt(const std::string& tmpl, const PromptContext& ctx)
{
    std::string context;
    for (std::size_t i = 0; i < ctx.entity_ids.size(); ++i) {
        context += "- " + ctx.entity_ids[i];
        if (i < ctx.entity_texts.size() && !ctx.entity_texts[i].empty()) {
            context += ": " + ctx.entity_texts[i];
        }
        context += "\n";
    }
    std::string out = tmpl;
    replace_all(out, "{query}", ctx.query);
    replace_all(out, "{construct}", ctx.construct);
    replace_all(out, "{definition}", ctx.definition);
    replace_all(out, "{entityA}", ctx.entity_ids.empty() ? "" : ctx.entity_ids[0]);
    replace_all(out, "{entityB}", ctx.entity_ids.size() < 2 ? "" : ctx.entity_ids[1]);
    replace_all(out, "{entityContext}", context);
    replace_all(out, "{min}", format_number(ctx.min_score));
    replace_all(out, "{max}", format_number(ctx.max_score));
    return out;
}

std::optional<double> first_number(std::string_view text)
{
    static const std::regex number(R"([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(text.begin(), text.end(), m, number)) {
        return std::nullopt;
    }
    try {
        return std::stod(m.str());
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

LlmAnswer ask_llm(const LlmOracleConfig& cfg, const PromptContext& ctx, const ScoringSpec& spec)
{
    const auto endpoint = split_url(cfg.endpoint_url);
    std::string key;
    if (!cfg.api_key_env.empty()) {
        if (const char* v = std::getenv(cfg.api_key_env.c_str())) {
            key = v;
        }
    }
    const nlohmann::json request{
        {"model", cfg.model},
        {"messages", nlohmann::json::array({{{"role", "user"},
                                             {"content", render_prompt(cfg.prompt_template, ctx)}}})},
        {"temperature", cfg.temperature},
    };
    const std::string body = request.dump();

    httplib::Client client(endpoint.base);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(cfg.timeout_seconds));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!key.empty()) {
        headers.emplace("Authorization", "Bearer " + key);
    }

    std::string last_error = "no attempt made";
    std::string last_reply;
    auto delay = cfg.backoff;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
        auto res = client.Post(endpoint.path, headers, body, "application/json");
        if (!res) {
            last_error = "request failed: " + httplib::to_string(res.error());
            continue;
        }
        last_reply = res->body;
        if (res->status < 200 || res->status >= 300) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        std::string content;
        try {
            const auto reply = nlohmann::json::parse(res->body);
            content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            last_error = std::string("malformed reply: ") + e.what();
            continue;
        }
        last_reply = content;
        const auto number = first_number(content);
        if (!number || !std::isfinite(*number)) {
            last_error = "reply has no number";
            continue;
        }
        return {OracleResponse::point(snap_to_grid(*number, spec)), attempt, content};
    }
    throw OracleError("llm oracle gave up after " + std::to_string(cfg.max_retries)
                          + " retries: " + last_error,
                      last_reply);
}

LlmOracle::LlmOracle(LlmOracleConfig cfg, const Problem& problem)
    : cfg_(std::move(cfg)), problem_(&problem)
{
    for (const auto& c : problem.spec.constructs()) {
        validate_template(cfg_, c.arity);
    }
}

OracleResponse LlmOracle::ask(const Question& q)
{
    const auto& construct = problem_->spec.construct(q.construct);
    PromptContext ctx{
        .query = problem_->query_text,
        .construct = construct.name,
        .definition = construct.definition,
        .entity_ids = {},
        .entity_texts = {},
        .min_score = problem_->spec.min_score(),
        .max_score = problem_->spec.max_score(),
    };
    for (const auto& a : q.args) {
        ctx.entity_ids.push_back(a.str());
        auto it = problem_->entity_context.find(a);
        ctx.entity_texts.push_back(it == problem_->entity_context.end() ? "" : it->second);
    }
    auto answer = ask_llm(cfg_, ctx, problem_->spec);
    retries_ += answer.retries;
    return answer.response;
}

}  // namespace topk
