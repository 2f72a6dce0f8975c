#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sigmalab/rational.hpp"

namespace sigmalab {

enum class ProcessKind { kReflectedSrw, kDrawdown, kPositivePart, kCustom };

std::string_view kind_name(ProcessKind kind);
// Throws std::invalid_argument for unknown names.
ProcessKind parse_kind(std::string_view name);

// Declarative description of a process on a finite tree.
//
// Gallery kinds only need a horizon. A custom spec carries node values by
// depth (values[d][k] is the k-th depth-d node, left to right) and,
// optionally, the branching: edge_probs[d][k] lists the child transition
// probabilities of the k-th depth-d node. Without edge_probs the tree is the
// fair binary tree.
struct ProcessSpec {
  ProcessKind kind = ProcessKind::kReflectedSrw;
  int horizon = 1;
  std::vector<std::vector<Rational>> values;
  std::optional<std::vector<std::vector<std::vector<Rational>>>> edge_probs;
};

}  // namespace sigmalab
