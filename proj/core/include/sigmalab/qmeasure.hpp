#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "sigmalab/pathspace.hpp"
#include "sigmalab/randomtimes.hpp"

namespace sigmalab {

// Q^(n): the finite measure whose density on F_p (p > n) is X stopped at the
// first zero after n. Leaf weight = P(leaf) * X_H(leaf) * 1{g(leaf) <= n}.
class QnMeasure {
 public:
  QnMeasure(AdaptedProcess process, int level, PathMeasure measure);

  int level() const { return level_; }
  const AdaptedProcess& process() const { return process_; }
  const PathMeasure& measure() const { return measure_; }
  const PathSpace& space() const { return process_.space(); }
  const Rational& weight(std::size_t leaf) const { return measure_.weight(leaf); }
  // X stopped at the first zero strictly after the level.
  const AdaptedProcess& density() const { return density_; }
  const RandomTime& last_zero() const { return last_zero_; }
  Rational total() const { return measure_.total(); }

  // Same process and level, different weights. Used to probe the checks.
  QnMeasure with_weights(std::vector<Rational> weights) const;

 private:
  AdaptedProcess process_;
  int level_;
  PathMeasure measure_;
  AdaptedProcess density_;
  RandomTime last_zero_;
};

// Builds Q^(level) from the stopped density and asserts it equals the closed
// form; a mismatch throws std::logic_error.
QnMeasure build_qn(const AdaptedProcess& x, int level);

// First depth-p atom whose Q^(n) mass differs from E_P[1_atom X_{p ^ d_n}].
std::optional<NodeId> density_mismatch(const QnMeasure& qn, int p);
bool qn_density_check(const QnMeasure& qn, int p);

// No weight on paths where X vanishes strictly after the level.
bool qn_kills_future_zeros(const QnMeasure& qn);
// First leaf ordinal carrying weight despite a zero after the level.
std::optional<std::size_t> future_zero_violation(const QnMeasure& qn);

// qm equals qn restricted to {g <= qm.level()}.
bool restriction_check(const QnMeasure& qm, const QnMeasure& qn);
// First leaf ordinal where the restriction identity fails.
std::optional<std::size_t> restriction_mismatch(const QnMeasure& qm, const QnMeasure& qn);

// Horizon slice of Q: the increasing limit of Q^(0..H-1), with g per leaf.
struct QSlice {
  PathMeasure measure;
  RandomTime last_zero;
};
QSlice q_limit(const AdaptedProcess& x);

// Both sides of Q[1_atom 1_{g<n}] = E_P[1_atom X_n] for one depth-n atom.
struct IdentitySides {
  NodeId atom;
  Rational expectation;  // E_P[1_atom X_n]
  Rational q_mass;       // Q^(n-1)[{g < n} and atom]
};

class IdentityMismatch : public std::domain_error {
 public:
  explicit IdentityMismatch(IdentitySides sides);
  const IdentitySides& sides() const { return sides_; }

 private:
  IdentitySides sides_;
};

IdentitySides q_eval_sides(const QnMeasure& previous_level, NodeId atom);

// Q[F 1_{g<n}] for F the indicator of a union of depth-n atoms, computed from
// both sides of the identity. Throws IdentityMismatch with the first
// disagreeing atom.
Rational q_eval(const AdaptedProcess& x, int n, std::span<const NodeId> event);

// First depth-n atom where the two sides disagree, if any.
std::optional<IdentitySides> find_q_eval_disagreement(const AdaptedProcess& x, int n);

// Law of g under Q on the horizon: mass[n] = Q[g = n] for n in [0, H-1] and
// the mass of zero-free paths (g = -infinity).
struct LastZeroLaw {
  std::vector<Rational> mass;
  Rational zero_free;
  std::vector<Rational> expectations;  // E_P[X_n], n = 0..H
};

// Differences of E_P[X_n], cross-checked against the horizon slice grouped
// by g. Throws std::domain_error on a negative mass or a mismatch.
LastZeroLaw q_law_of_g(const AdaptedProcess& x);

// Solves for the leaf weights of Q on {g < H} using only the values
// E_P[1_atom X_n] and g per leaf. Returns std::nullopt when the system is
// inconsistent (no measure satisfies the identity); throws std::logic_error
// if it is underdetermined.
std::optional<PathMeasure> reconstruct_q(const AdaptedProcess& x);

// The reconstruction exists and every Q^(n) derived from it matches build_qn.
bool uniqueness_probe(const AdaptedProcess& x);

}  // namespace sigmalab
