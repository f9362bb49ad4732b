#pragma once

#include "topk/model.hpp"

namespace topk {

/// The five-hotel running example: relevance (unary) + diversity (binary),
/// range [0, 1], step 0.5, with the partially filled relevance and diversity
/// tables as known answers.
///
/// Candidates are the lexicographic 3-subsets of (HNY, MLN, HYN, SHN, WLD);
/// `candidate_cap = 3` yields c1={HNY,MLN,HYN}, c2={HNY,MLN,SHN},
/// c3={HNY,MLN,WLD}. The ground truth fills every unknown cell; notably
/// Div(MLN,HYN) = 1.0.
[[nodiscard]] Problem hotel_example(std::size_t candidate_cap = 3);

}  // namespace topk
