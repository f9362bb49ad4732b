#pragma once

// Test-side reference implementations. They share no code with the library
// beyond the plain data types: questions per candidate, completions of the
// unknowns and winner frequencies are all rebuilt from scratch here.

#include "topk/model.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace ref {

using topk::Candidate;
using topk::KnownStore;
using topk::Problem;
using topk::Question;
using topk::ScoringSpec;

/// Questions of c for arity 1 and 2 constructs, by direct loops.
std::vector<Question> questions(const Candidate& c, const ScoringSpec& spec);

/// Union of the candidates' questions that have no exact answer.
std::vector<Question> open_questions(const std::vector<Candidate>& cs, const ScoringSpec& spec,
                                     const KnownStore& knowns);

/// Calls visit(values) for every grid assignment of the open questions
/// (respecting narrowed ranges); values also hold the known answers.
void for_each_completion(const std::vector<Candidate>& cs, const ScoringSpec& spec,
                         const KnownStore& knowns,
                         const std::function<void(const std::map<Question, double>&)>& visit);

double score(const Candidate& c, const ScoringSpec& spec, const std::map<Question, double>& values);

/// (min, max) of each candidate's score over all completions.
std::vector<std::pair<double, double>> bounds(const std::vector<Candidate>& cs,
                                              const ScoringSpec& spec, const KnownStore& knowns);

/// Fraction of completions each candidate wins, ties split evenly.
std::vector<double> winner_frequencies(const std::vector<Candidate>& cs, const ScoringSpec& spec,
                                       const KnownStore& knowns);

/// True iff F(a) >= F(b) in every completion.
bool always_geq(const std::vector<Candidate>& cs, std::size_t a, std::size_t b,
                const ScoringSpec& spec, const KnownStore& knowns);

/// Highest exact score among the candidates under full ground truth.
double best_score(const Problem& p);

/// sum over x >= y of a(x) b(y), by the double loop.
double naive_geq(const std::vector<double>& a_values, const std::vector<double>& a_masses,
                 const std::vector<double>& b_values, const std::vector<double>& b_masses);

/// Small random instance: synthetic truth with a seeded subset of the
/// questions already revealed, capped so brute force stays cheap.
Problem random_instance(std::uint64_t seed, std::size_t n, std::size_t k,
                        std::size_t max_candidates, std::size_t max_unknowns);

}  // namespace ref
