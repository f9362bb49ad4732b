#include "support/brute.hpp"
#include "topk/engine.hpp"
#include "topk/error.hpp"
#include "topk/fixture.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <unordered_set>

using namespace topk;

namespace {

EntityId id(const char* s)
{
    return EntityId(s);
}

Question rel(const char* a)
{
    return Question::make(0, {id(a)});
}

Question div(const char* a, const char* b)
{
    return Question::make(1, {id(a), id(b)});
}

}  // namespace

TEST_CASE("entity ids and specs validate their invariants")
{
    CHECK_THROWS_AS(EntityId(""), ValidationError);
    CHECK_THROWS_AS(ScoringSpec({Construct{"Rel", 1}}, 1.0, 1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(ScoringSpec({Construct{"Rel", 1}}, 0.0, 1.0, 0.3), ValidationError);
    CHECK_THROWS_AS(ScoringSpec({Construct{"Rel", 1}, Construct{"Rel", 2}}, 0.0, 1.0, 0.5),
                    ValidationError);
    CHECK_THROWS_AS(ScoringSpec({Construct{"Rel", 0}}, 0.0, 1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(ScoringSpec({Construct{"Rel", 1, -1.0}}, 0.0, 1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(ScoringSpec({Construct{"Rel", 1, 0.5}}, 0.0, 1.0, 0.5), ValidationError);

    const ScoringSpec spec({Construct{"Rel", 1}}, 0.0, 1.0, 0.5);
    CHECK(spec.grid_ticks() == 2);
    CHECK(spec.grid_values() == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(spec.on_grid(0.5));
    CHECK_FALSE(spec.on_grid(0.3));
    CHECK_FALSE(spec.on_grid(1.5));
}

TEST_CASE("questions are canonical under argument order")
{
    const auto a = div("MLN", "HNY");
    const auto b = div("HNY", "MLN");
    CHECK(a == b);
    CHECK(std::hash<Question>{}(a) == std::hash<Question>{}(b));
    std::unordered_set<Question> set{a, b};
    CHECK(set.size() == 1);
    CHECK_THROWS_AS(Question::make(1, {id("A"), id("A")}), ValidationError);
    const auto spec = hotel_example().spec;
    CHECK(to_string(a, spec) == "Div(HNY,MLN)");
}

TEST_CASE("question universe")
{
    const auto spec = hotel_example().spec;
    const std::vector<EntityId> hotels{id("HNY"), id("MLN"), id("HYN"), id("SHN"), id("WLD")};

    SUBCASE("all ten candidates give five relevance and ten diversity questions")
    {
        const auto all = enumerate_candidates(hotels, 3);
        CHECK(build_question_universe(spec, all).size() == 15);
    }
    SUBCASE("single pair")
    {
        const std::vector<Candidate> one{Candidate::make(0, {id("A"), id("B")})};
        const auto u = build_question_universe(spec, one);
        CHECK(u == std::vector<Question>{rel("A"), rel("B"), div("A", "B")});
    }
    SUBCASE("fixture candidates give twelve questions")
    {
        const auto f1 = hotel_example();
        const auto u = build_question_universe(f1.spec, f1.candidates);
        CHECK(u.size() == 12);
        CHECK(std::is_sorted(u.begin(), u.end()));
        const auto unknown = unknown_questions(u, f1.knowns);
        CHECK(unknown
              == std::vector<Question>{rel("HNY"), div("HYN", "MLN"), div("MLN", "SHN"),
                                       div("MLN", "WLD")});
        CHECK(unknown_questions(u, KnownStore{}) == u);
        KnownStore everything;
        for (const auto& q : u) {
            everything = record_response(everything, f1.spec, q, f1.ground_truth->at(q));
        }
        CHECK(unknown_questions(u, everything).empty());
    }
    SUBCASE("empty candidate list")
    {
        CHECK_THROWS_WITH_AS((void)build_question_universe(spec, std::vector<Candidate>{}),
                             "no candidates", ValidationError);
    }
}

TEST_CASE("universe is insensitive to candidate order and covers every candidate")
{
    const auto spec = hotel_example().spec;
    const std::vector<EntityId> es{id("A"), id("B"), id("C"), id("D"), id("E"), id("F")};
    auto cs = enumerate_candidates(es, 3, 7);
    const auto u = build_question_universe(spec, cs);
    std::mt19937 rng(3);
    for (int round = 0; round < 5; ++round) {
        std::shuffle(cs.begin(), cs.end(), rng);
        CHECK(build_question_universe(spec, cs) == u);
    }
    for (const auto& c : cs) {
        for (const auto& q : questions_of(c, spec)) {
            CHECK(std::binary_search(u.begin(), u.end(), q));
        }
    }
}

TEST_CASE("questions of a candidate")
{
    const auto spec = hotel_example().spec;
    CHECK(questions_of(Candidate::make(0, {id("HNY"), id("MLN"), id("HYN")}), spec).size() == 6);
    CHECK(questions_of(Candidate::make(0, {id("A"), id("B"), id("C"), id("D")}), spec).size() == 10);
    const ScoringSpec rel_only({Construct{"Rel", 1}}, 0.0, 1.0, 0.5);
    CHECK(questions_of(Candidate::make(0, {id("A")}), rel_only).size() == 1);

    for (std::size_t k = 1; k <= 5; ++k) {
        std::vector<EntityId> m;
        for (std::size_t i = 0; i < k; ++i) {
            m.emplace_back(std::string(1, static_cast<char>('A' + i)));
        }
        const auto c = Candidate::make(0, m);
        auto mine = questions_of(c, spec);
        auto theirs = ref::questions(c, spec);
        std::sort(mine.begin(), mine.end());
        std::sort(theirs.begin(), theirs.end());
        CHECK(mine == theirs);
        CHECK(mine.size() == k + k * (k - 1) / 2);
    }
}

TEST_CASE("recording responses")
{
    const auto f1 = hotel_example();
    const auto& spec = f1.spec;
    KnownStore k;
    k = record_response(k, spec, div("MLN", "HYN"), 1.0);
    CHECK(k.find(div("HYN", "MLN")) == 1.0);
    k = record_response(k, spec, rel("HNY"), 0.0);
    CHECK(k.find(rel("HNY")) == 0.0);
    CHECK_THROWS_AS((void)record_response(k, spec, rel("SHN"), 0.3), ValidationError);
    CHECK_THROWS_AS((void)record_response(k, spec, rel("SHN"), 1.5), ValidationError);
    CHECK_THROWS_AS((void)record_response(k, spec, rel("SHN"), -0.5), ValidationError);

    SUBCASE("idempotent for the same value, rejects a different one")
    {
        const auto again = record_response(k, spec, div("MLN", "HYN"), 1.0);
        CHECK(again.answers() == k.answers());
        CHECK_THROWS_AS((void)record_response(k, spec, div("MLN", "HYN"), 0.5), ValidationError);
    }
    SUBCASE("ranges narrow and collapse to answers")
    {
        auto r = record_range(k, spec, rel("SHN"), 0.5, 1.0);
        CHECK_FALSE(r.contains(rel("SHN")));
        CHECK(r.find_range(rel("SHN")) == std::pair{0.5, 1.0});
        CHECK_THROWS_AS((void)record_range(r, spec, rel("SHN"), 0.0, 0.0), ValidationError);
        r = record_range(r, spec, rel("SHN"), 0.0, 0.5);
        CHECK(r.find(rel("SHN")) == 0.5);
        CHECK_FALSE(r.find_range(rel("SHN")));
        CHECK_THROWS_AS((void)record_response(record_range(k, spec, rel("WLD"), 0.5, 1.0), spec,
                                              rel("WLD"), 0.0),
                        ValidationError);
    }
}

TEST_CASE("problem validation")
{
    auto p = hotel_example();
    CHECK_NOTHROW(validate(p));
    auto dup = p;
    dup.entities.push_back(id("HNY"));
    CHECK_THROWS_AS(validate(dup), ValidationError);
    auto big = p;
    big.k = 6;
    CHECK_THROWS_AS(validate(big), ValidationError);
    auto dangling = p;
    dangling.candidates[0] = Candidate::make(0, {id("HNY"), id("MLN"), id("XXX")});
    CHECK_THROWS_AS(validate(dangling), ValidationError);
    auto twice = p;
    twice.candidates[1] = Candidate::make(1, twice.candidates[0].members);
    CHECK_THROWS_AS(validate(twice), ValidationError);
    auto off_grid = p;
    (*off_grid.ground_truth)[rel("HNY")] = 0.25;
    CHECK_THROWS_AS(validate(off_grid), ValidationError);
}

TEST_CASE("fixture matches the worked example tables")
{
    const auto p = hotel_example();
    CHECK(p.candidates.size() == 3);
    CHECK(p.candidates[0].members == std::vector<EntityId>{id("HNY"), id("HYN"), id("MLN")});
    CHECK(p.candidates[1].members == std::vector<EntityId>{id("HNY"), id("MLN"), id("SHN")});
    CHECK(p.candidates[2].members == std::vector<EntityId>{id("HNY"), id("MLN"), id("WLD")});
    CHECK(p.knowns.size() == 9);
    CHECK(p.ground_truth->size() == 15);
    CHECK(hotel_example(10).candidates.size() == 10);
}
