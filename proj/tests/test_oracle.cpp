#include "topk/error.hpp"
#include "topk/fixture.hpp"
#include "topk/oracle.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <thread>

using namespace topk;

namespace {

const ScoringSpec& unit_spec()
{
    static const ScoringSpec spec({Construct{"Rel", 1}, Construct{"Div", 2}}, 0.0, 1.0, 0.5);
    return spec;
}

// Local chat-completion stand-in. Each request runs `reply` with the call index.
class MockServer {
public:
    explicit MockServer(std::function<void(int, const httplib::Request&, httplib::Response&)> reply)
    {
        server_.Post("/v1/chat/completions", [this, reply](const auto& req, auto& res) {
            reply(calls_++, req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockServer()
    {
        server_.stop();
        thread_.join();
    }
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    [[nodiscard]] std::string url() const
    {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    }
    [[nodiscard]] int calls() const { return calls_; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> calls_{0};
};

std::string chat_reply(const std::string& content)
{
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}
        .dump();
}

LlmOracleConfig mock_config(const MockServer& server)
{
    LlmOracleConfig cfg;
    cfg.endpoint_url = server.url();
    cfg.api_key_env = "TOPK_TEST_UNSET_KEY";
    cfg.timeout_seconds = 0.3;
    cfg.max_retries = 3;
    cfg.backoff = std::chrono::milliseconds(1);
    return cfg;
}

PromptContext context()
{
    return {.query = "quiet hotels",
            .construct = "Rel",
            .definition = "relevance",
            .entity_ids = {"HNY"},
            .entity_texts = {"Hilton NY"},
            .min_score = 0.0,
            .max_score = 1.0};
}

}  // namespace

TEST_CASE("table oracle")
{
    const auto f1 = hotel_example();
    const auto q = Question::make(1, {EntityId("MLN"), EntityId("HYN")});
    CHECK(ask_table(*f1.ground_truth, q).value() == 1.0);
    CHECK(ask_table(*f1.ground_truth, q).value() == 1.0);
    const auto known = Question::make(0, {EntityId("MLN")});
    CHECK(ask_table(*f1.ground_truth, known).value() == 1.0);
    const auto absent = Question::make(0, {EntityId("ZZZ")});
    CHECK_THROWS_WITH_AS((void)ask_table(*f1.ground_truth, absent), doctest::Contains("ground truth incomplete"),
                         OracleError);
}

TEST_CASE("response processing")
{
    const auto& spec = unit_spec();
    SUBCASE("two experts with ranges")
    {
        const std::vector<OracleResponse> rs{OracleResponse::range(0.4, 1.0),
                                             OracleResponse::range(0.3, 0.6)};
        const auto pdf = process_responses(rs, spec);
        REQUIRE(pdf.support == std::vector<double>{0.0, 0.5, 1.0});
        CHECK(pdf.masses[0] == 0.0);
        CHECK(pdf.masses[1] == 2.0 / 3.0);
        CHECK(pdf.masses[2] == 1.0 / 3.0);
        CHECK(pdf.min_supported() == 0.5);
        CHECK(pdf.max_supported() == 1.0);
    }
    SUBCASE("single point")
    {
        const std::vector<OracleResponse> rs{OracleResponse::point(0.5)};
        const auto pdf = process_responses(rs, spec);
        CHECK(pdf.masses == std::vector<double>{0.0, 1.0, 0.0});
    }
    SUBCASE("full range is uniform")
    {
        const std::vector<OracleResponse> rs{OracleResponse::range(0.0, 1.0)};
        const auto pdf = process_responses(rs, spec);
        for (double m : pdf.masses) {
            CHECK(m == doctest::Approx(1.0 / 3.0));
        }
    }
    SUBCASE("repeated ranges give the same pdf")
    {
        const std::vector<OracleResponse> one{OracleResponse::range(0.2, 1.0)};
        const std::vector<OracleResponse> three(3, OracleResponse::range(0.2, 1.0));
        CHECK(process_responses(one, spec).masses == process_responses(three, spec).masses);
    }
    SUBCASE("errors")
    {
        const std::vector<OracleResponse> gap{OracleResponse::range(0.1, 0.4)};
        CHECK_THROWS_WITH_AS((void)process_responses(gap, spec), doctest::Contains("empty mapping"), ValidationError);
        CHECK_THROWS_AS((void)process_responses(std::vector<OracleResponse>{}, spec),
                        ValidationError);
        CHECK_THROWS_AS((void)OracleResponse::range(0.5, 0.5), ValidationError);
    }
}

TEST_CASE("grid snapping")
{
    const auto& spec = unit_spec();
    CHECK(snap_to_grid(0.7, spec) == 0.5);
    CHECK(snap_to_grid(0.75, spec) == 0.5);
    CHECK(snap_to_grid(0.25, spec) == 0.0);
    CHECK(snap_to_grid(0.76, spec) == 1.0);
    CHECK(snap_to_grid(1.4, spec) == 1.0);
    CHECK(snap_to_grid(-3.0, spec) == 0.0);
    CHECK_THROWS_AS((void)snap_to_grid(std::nan(""), spec), ValidationError);
}

TEST_CASE("prompt rendering and number extraction")
{
    LlmOracleConfig cfg;
    CHECK_NOTHROW(validate_template(cfg, 2));
    cfg.prompt_template = "Rate {entityA}";
    CHECK_NOTHROW(validate_template(cfg, 1));
    CHECK_THROWS_AS(validate_template(cfg, 2), ValidationError);

    const auto text = render_prompt("{query}|{construct}|{entityA}|{entityB}|{min}-{max}", context());
    CHECK(text == "quiet hotels|Rel|HNY||0-1");

    CHECK(first_number("0.5") == 0.5);
    CHECK(first_number("Score: 1") == 1.0);
    CHECK(first_number("about .75 overall") == 0.75);
    CHECK_FALSE(first_number("no digits here"));
}

TEST_CASE("llm client against a mock server")
{
    SUBCASE("plain number")
    {
        MockServer server([](int, const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body);
            CHECK(body.at("model") == "gpt-4o-mini");
            CHECK(body.at("messages").at(0).at("role") == "user");
            CHECK(body.at("temperature") == 0.0);
            res.set_content(chat_reply("0.5"), "application/json");
        });
        const auto answer = ask_llm(mock_config(server), context(), unit_spec());
        CHECK(answer.response.kind == OracleResponse::Kind::Point);
        CHECK(answer.response.value() == 0.5);
        CHECK(answer.retries == 0);
    }
    SUBCASE("number inside text")
    {
        MockServer server([](int, const httplib::Request&, httplib::Response& res) {
            res.set_content(chat_reply("Score: 1"), "application/json");
        });
        CHECK(ask_llm(mock_config(server), context(), unit_spec()).response.value() == 1.0);
    }
    SUBCASE("two timeouts then a reply")
    {
        MockServer server([](int call, const httplib::Request&, httplib::Response& res) {
            if (call < 2) {
                std::this_thread::sleep_for(std::chrono::milliseconds(700));
            }
            res.set_content(chat_reply("1.0"), "application/json");
        });
        const auto answer = ask_llm(mock_config(server), context(), unit_spec());
        CHECK(answer.response.value() == 1.0);
        CHECK(answer.retries == 2);
    }
    SUBCASE("unparseable replies exhaust the retries")
    {
        MockServer server([](int, const httplib::Request&, httplib::Response& res) {
            res.set_content(chat_reply("I cannot say"), "application/json");
        });
        try {
            (void)ask_llm(mock_config(server), context(), unit_spec());
            FAIL("expected an oracle error");
        } catch (const OracleError& e) {
            CHECK(e.raw_reply() == "I cannot say");
        }
        CHECK(server.calls() == 4);
    }
    SUBCASE("server errors")
    {
        MockServer server([](int, const httplib::Request&, httplib::Response& res) {
            res.status = 500;
            res.set_content("overloaded", "text/plain");
        });
        auto cfg = mock_config(server);
        cfg.max_retries = 1;
        CHECK_THROWS_AS((void)ask_llm(cfg, context(), unit_spec()), OracleError);
        CHECK(server.calls() == 2);
    }
    SUBCASE("oracle adapter fills prompts from the problem")
    {
        const auto f1 = hotel_example();
        std::string seen;
        MockServer server([&seen](int, const httplib::Request& req, httplib::Response& res) {
            seen = nlohmann::json::parse(req.body).at("messages").at(0).at("content");
            res.set_content(chat_reply("0.62"), "application/json");
        });
        LlmOracle oracle(mock_config(server), f1);
        const auto r = oracle.ask(Question::make(1, {EntityId("MLN"), EntityId("HYN")}));
        CHECK(r.value() == 0.5);
        CHECK(seen.find("Affordable hotels in Manhattan") != std::string::npos);
        CHECK(seen.find("Hyatt NY") != std::string::npos);
        CHECK(seen.find("Subject: HYN MLN") != std::string::npos);
    }
}
