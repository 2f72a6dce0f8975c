#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sigmalab/pathspace.hpp"

namespace sigmalab {

// X = N + A with N a martingale and A predictable, non-decreasing, A_0 = 0.
struct Decomposition {
  AdaptedProcess martingale;   // N
  AdaptedProcess compensator;  // A
};

// Thrown by doob_decompose when some one-step drift is negative.
class NotSubmartingale : public std::domain_error {
 public:
  NotSubmartingale(NodeId node, Rational drift);
  NodeId node() const { return node_; }
  const Rational& drift() const { return drift_; }

 private:
  NodeId node_;
  Rational drift_;
};

// One-step drift E[X_{n+1} | F_n] - X_n at every node of depth < H, stored
// densely by node index (leaf entries are unused and zero).
std::vector<Rational> one_step_drift(const AdaptedProcess& x);

Decomposition doob_decompose(const AdaptedProcess& x);

bool is_martingale(const AdaptedProcess& n);
// Martingale property on depths first_depth..H only.
bool is_martingale(const AdaptedProcess& n, int first_depth);
bool is_submartingale(const AdaptedProcess& x);

struct SigmaViolation {
  NodeId node;          // depth-n node where (A_{n+1} - A_n) X_n != 0
  Rational increment;   // A_{n+1} - A_n below the node
  Rational value;       // X_n at the node
};

struct SigmaClassReport {
  std::vector<SigmaViolation> violations;
  std::vector<NodeId> negative_values;  // nodes with X < 0; reported, not fatal
  // Decomposition invariants re-checked on the supplied pair.
  bool sum_matches = true;
  bool compensator_starts_at_zero = true;
  bool compensator_increasing = true;
  bool compensator_predictable = true;
  bool martingale_part = true;

  bool decomposition_valid() const {
    return sum_matches && compensator_starts_at_zero && compensator_increasing && compensator_predictable &&
           martingale_part;
  }
  // Class (Sigma) holds: a valid decomposition and no increase away from zeros.
  bool passed() const { return decomposition_valid() && violations.empty(); }
};

// Throws std::invalid_argument if the decomposition lives on another space.
SigmaClassReport check_sigma_class(const AdaptedProcess& x, const Decomposition& dec);

}  // namespace sigmalab
