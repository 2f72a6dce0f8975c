#pragma once

#include <span>
#include <utility>

#include "sigmalab/pathspace.hpp"
#include "sigmalab/process_spec.hpp"

namespace sigmalab {

// Walk paths are child ranks on the fair binary tree: rank 0 is an up-step
// (+1), rank 1 a down-step (-1).
int walk_step(int child_rank);

// Value at the end of a walk path for a gallery kind:
//   reflected_srw  |S_n|
//   drawdown       max_{k<=n} S_k - S_n
//   positive_part  max(S_n, 0)
// Throws std::invalid_argument for ProcessKind::kCustom.
long long gallery_value(ProcessKind kind, std::span<const int> path);

std::pair<SpacePtr, AdaptedProcess> make_process(const ProcessSpec& spec);

// |S_n| + n on the fair binary tree: a submartingale outside class (Sigma).
ProcessSpec reflected_plus_time_spec(int horizon);

}  // namespace sigmalab
