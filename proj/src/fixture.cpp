#include "topk/fixture.hpp"

#include "topk/engine.hpp"

namespace topk {

Problem hotel_example(std::size_t candidate_cap)
{
    ScoringSpec spec({Construct{"Rel", 1, 1.0, "relevance of the hotel to the query"},
                      Construct{"Div", 2, 1.0, "how different the two hotels are"}},
                     0.0, 1.0, 0.5);
    const std::vector<EntityId> hotels{EntityId("HNY"), EntityId("MLN"), EntityId("HYN"),
                                       EntityId("SHN"), EntityId("WLD")};
    const auto rel = [&](const char* a) { return Question::make(0, {EntityId(a)}); };
    const auto div = [&](const char* a, const char* b) {
        return Question::make(1, {EntityId(a), EntityId(b)});
    };

    std::map<Question, double> truth{
        {rel("HNY"), 0.5},        {rel("MLN"), 1.0},        {rel("HYN"), 1.0},
        {rel("SHN"), 0.0},        {rel("WLD"), 0.5},        {div("HNY", "MLN"), 1.0},
        {div("HNY", "HYN"), 0.5}, {div("HNY", "SHN"), 0.5}, {div("HNY", "WLD"), 0.5},
        {div("MLN", "HYN"), 1.0}, {div("MLN", "SHN"), 0.0}, {div("MLN", "WLD"), 0.5},
        {div("HYN", "SHN"), 0.5}, {div("HYN", "WLD"), 0.5}, {div("SHN", "WLD"), 0.0},
    };

    KnownStore knowns;
    for (const auto& q : {rel("MLN"), rel("HYN"), rel("SHN"), rel("WLD"), div("HNY", "MLN"),
                          div("HNY", "HYN"), div("HNY", "SHN"), div("HNY", "WLD"),
                          div("HYN", "WLD")}) {
        knowns = record_response(std::move(knowns), spec, q, truth.at(q));
    }

    Problem p{
        .entities = hotels,
        .spec = spec,
        .k = 3,
        .candidates = enumerate_candidates(hotels, 3, candidate_cap),
        .knowns = std::move(knowns),
        .ground_truth = std::move(truth),
        .entity_context = {{EntityId("HNY"), "Hilton NY"},
                           {EntityId("MLN"), "Marriott LN"},
                           {EntityId("HYN"), "Hyatt NY"},
                           {EntityId("SHN"), "Sheraton NY"},
                           {EntityId("WLD"), "Waldorf NY"}},
        .query_text = "Affordable hotels in Manhattan",
    };
    return p;
}

}  // namespace topk
