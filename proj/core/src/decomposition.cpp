#include "sigmalab/decomposition.hpp"

#include <algorithm>

namespace sigmalab {

NotSubmartingale::NotSubmartingale(NodeId node, Rational drift)
    : std::domain_error("process is not a submartingale: negative drift " + to_string(drift) + " at node " +
                        std::to_string(node.index)),
      node_(node),
      drift_(std::move(drift)) {}

std::vector<Rational> one_step_drift(const AdaptedProcess& x) {
  const PathSpace& space = x.space();
  std::vector<Rational> drift(space.node_count());
  for (int d = 0; d < space.horizon(); ++d) {
    const auto next = cond_exp(x, d);
    const std::size_t offset = space.level_offset(d);
    for (std::size_t k = 0; k < next.size(); ++k) {
      drift[offset + k] = next[k] - x[space.at_level(d, k)];
    }
  }
  return drift;
}

Decomposition doob_decompose(const AdaptedProcess& x) {
  const PathSpace& space = x.space();
  const auto drift = one_step_drift(x);
  std::vector<Rational> a(space.node_count());
  for (std::uint32_t i = 0; i < space.node_count(); ++i) {
    const NodeId v{space.id(), i};
    const auto parent = space.parent(v);
    if (!parent) continue;
    const Rational& step = drift[parent->index];
    if (sgn(step) < 0) throw NotSubmartingale(*parent, step);
    a[i] = a[parent->index] + step;
  }
  AdaptedProcess compensator(x.space_ptr(), std::move(a));
  return {x - compensator, compensator};
}

bool is_martingale(const AdaptedProcess& n) { return is_martingale(n, 0); }

bool is_martingale(const AdaptedProcess& n, int first_depth) {
  const PathSpace& space = n.space();
  for (int d = std::max(first_depth, 0); d < space.horizon(); ++d) {
    const auto next = cond_exp(n, d);
    const auto current = n.level(d);
    for (std::size_t k = 0; k < next.size(); ++k) {
      if (next[k] != current[k]) return false;
    }
  }
  return true;
}

bool is_submartingale(const AdaptedProcess& x) {
  const PathSpace& space = x.space();
  for (int d = 0; d < space.horizon(); ++d) {
    const auto next = cond_exp(x, d);
    const auto current = x.level(d);
    for (std::size_t k = 0; k < next.size(); ++k) {
      if (next[k] < current[k]) return false;
    }
  }
  return true;
}

SigmaClassReport check_sigma_class(const AdaptedProcess& x, const Decomposition& dec) {
  const PathSpace& space = x.space();
  if (dec.martingale.space().id() != space.id() || dec.compensator.space().id() != space.id()) {
    throw std::invalid_argument("decomposition belongs to a different path space");
  }
  const AdaptedProcess& a = dec.compensator;

  SigmaClassReport report;
  report.sum_matches = (dec.martingale + a) == x;
  report.compensator_starts_at_zero = a[space.root()] == 0;
  report.compensator_predictable = is_predictable(a);
  report.martingale_part = is_martingale(dec.martingale);

  for (std::uint32_t i = 0; i < space.node_count(); ++i) {
    const NodeId v{space.id(), i};
    if (sgn(x[v]) < 0) report.negative_values.push_back(v);
    if (space.depth(v) == space.horizon()) continue;
    bool reported = false;
    for (std::size_t c = 0; c < space.child_count(v); ++c) {
      const Rational increment = a[space.child(v, c)] - a[v];
      if (sgn(increment) < 0) report.compensator_increasing = false;
      if (!reported && sgn(increment) != 0 && sgn(x[v]) != 0) {
        report.violations.push_back({v, increment, x[v]});
        reported = true;
      }
    }
  }
  return report;
}

}  // namespace sigmalab
