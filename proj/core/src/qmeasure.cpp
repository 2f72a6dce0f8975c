#include "sigmalab/qmeasure.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <string>

namespace sigmalab {

namespace {

void check_level(const PathSpace& space, int level) {
  if (level < 0 || level >= space.horizon()) {
    throw std::out_of_range("level " + std::to_string(level) + " outside [0, " +
                            std::to_string(space.horizon() - 1) + "]");
  }
}

bool at_most(const RandomTime::Value& g, int n) { return !g || *g <= n; }

// P(leaf) * X_H(leaf) * 1{g(leaf) <= level}
std::vector<Rational> closed_form_weights(const AdaptedProcess& x, const RandomTime& g, int level) {
  const PathSpace& space = x.space();
  std::vector<Rational> w(space.leaf_count());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (at_most(g.at_leaf(i), level)) {
      const NodeId leaf = space.leaf(i);
      w[i] = space.prob(leaf) * x[leaf];
    }
  }
  return w;
}

}  // namespace

QnMeasure::QnMeasure(AdaptedProcess process, int level, PathMeasure measure)
    : process_(std::move(process)),
      level_(level),
      measure_(std::move(measure)),
      density_(process_),
      last_zero_(sigmalab::last_zero(process_)) {
  check_level(process_.space(), level_);
  if (measure_.space().id() != process_.space().id()) {
    throw std::invalid_argument("measure and process live on different spaces");
  }
  density_ = stop_process(process_, first_zero_after(process_, level_));
}

QnMeasure QnMeasure::with_weights(std::vector<Rational> weights) const {
  QnMeasure copy = *this;
  copy.measure_ = PathMeasure(process_.space_ptr(), std::move(weights));
  return copy;
}

QnMeasure build_qn(const AdaptedProcess& x, int level) {
  const PathSpace& space = x.space();
  check_level(space, level);
  const AdaptedProcess stopped = stop_process(x, first_zero_after(x, level));
  std::vector<Rational> weights(space.leaf_count());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const NodeId leaf = space.leaf(i);
    weights[i] = space.prob(leaf) * stopped[leaf];
  }
  if (weights != closed_form_weights(x, last_zero(x), level)) {
    throw std::logic_error("stopped-density weights disagree with P * X_H * 1{g <= " + std::to_string(level) + "}");
  }
  return QnMeasure(x, level, PathMeasure(x.space_ptr(), std::move(weights)));
}

std::optional<NodeId> density_mismatch(const QnMeasure& qn, int p) {
  const PathSpace& space = qn.space();
  if (p < qn.level() + 1 || p > space.horizon()) {
    throw std::out_of_range("density check depth " + std::to_string(p) + " outside [" +
                            std::to_string(qn.level() + 1) + ", " + std::to_string(space.horizon()) + "]");
  }
  for (std::size_t k = 0; k < space.level_size(p); ++k) {
    const NodeId atom = space.at_level(p, k);
    if (qn.measure().mass(atom) != space.prob(atom) * qn.density()[atom]) return atom;
  }
  return std::nullopt;
}

bool qn_density_check(const QnMeasure& qn, int p) { return !density_mismatch(qn, p).has_value(); }

std::optional<std::size_t> future_zero_violation(const QnMeasure& qn) {
  const RandomTime d = first_zero_after(qn.process(), qn.level());
  for (std::size_t i = 0; i < qn.space().leaf_count(); ++i) {
    if (d.at_leaf(i) && sgn(qn.weight(i)) != 0) return i;
  }
  return std::nullopt;
}

bool qn_kills_future_zeros(const QnMeasure& qn) { return !future_zero_violation(qn).has_value(); }

bool restriction_check(const QnMeasure& qm, const QnMeasure& qn) { return !restriction_mismatch(qm, qn).has_value(); }

std::optional<std::size_t> restriction_mismatch(const QnMeasure& qm, const QnMeasure& qn) {
  if (qm.space().id() != qn.space().id() || !(qm.process() == qn.process())) {
    throw std::invalid_argument("restriction_check: measures built from different spaces or processes");
  }
  if (qm.level() > qn.level()) throw std::invalid_argument("restriction_check: first level exceeds second");
  const RandomTime& g = qn.last_zero();
  for (std::size_t i = 0; i < qm.space().leaf_count(); ++i) {
    const Rational expected = at_most(g.at_leaf(i), qm.level()) ? qn.weight(i) : Rational(0);
    if (qm.weight(i) != expected) return i;
  }
  return std::nullopt;
}

QSlice q_limit(const AdaptedProcess& x) {
  const PathSpace& space = x.space();
  std::vector<Rational> weights(space.leaf_count());
  for (int level = 0; level < space.horizon(); ++level) {
    const QnMeasure qn = build_qn(x, level);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (level == 0 || qn.weight(i) > weights[i]) weights[i] = qn.weight(i);
    }
  }
  RandomTime g = last_zero(x);
  if (weights != closed_form_weights(x, g, space.horizon() - 1)) {
    throw std::logic_error("limit of Q^(n) disagrees with P * X_H * 1{g <= H-1}");
  }
  return {PathMeasure(x.space_ptr(), std::move(weights)), std::move(g)};
}

IdentityMismatch::IdentityMismatch(IdentitySides sides)
    : std::domain_error("Q[F 1{g<n}] != E_P[F X_n] on atom " + std::to_string(sides.atom.index) + ": " +
                        to_string(sides.q_mass) + " vs " + to_string(sides.expectation)),
      sides_(std::move(sides)) {}

IdentitySides q_eval_sides(const QnMeasure& previous_level, NodeId atom) {
  const PathSpace& space = previous_level.space();
  const int n = previous_level.level() + 1;
  if (space.depth(atom) != n) throw std::invalid_argument("atom depth does not match level + 1");
  IdentitySides sides{atom, space.prob(atom) * previous_level.process()[atom], 0};
  const auto [first, last] = space.leaves_below(atom);
  const RandomTime& g = previous_level.last_zero();
  for (std::size_t i = first; i < last; ++i) {
    if (!g.at_leaf(i) || *g.at_leaf(i) < n) sides.q_mass += previous_level.weight(i);
  }
  return sides;
}

Rational q_eval(const AdaptedProcess& x, int n, std::span<const NodeId> event) {
  const PathSpace& space = x.space();
  if (n < 1 || n > space.horizon()) {
    throw std::out_of_range("q_eval: n = " + std::to_string(n) + " outside [1, " +
                            std::to_string(space.horizon()) + "]");
  }
  std::vector<NodeId> sorted(event.begin(), event.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("q_eval: event lists an atom twice");
  }
  const QnMeasure previous = build_qn(x, n - 1);
  Rational value = 0;
  for (NodeId atom : sorted) {
    IdentitySides sides = q_eval_sides(previous, atom);
    if (sides.expectation != sides.q_mass) throw IdentityMismatch(std::move(sides));
    value += sides.expectation;
  }
  return value;
}

std::optional<IdentitySides> find_q_eval_disagreement(const AdaptedProcess& x, int n) {
  const PathSpace& space = x.space();
  if (n < 1 || n > space.horizon()) throw std::out_of_range("find_q_eval_disagreement: n out of range");
  const QnMeasure previous = build_qn(x, n - 1);
  for (std::size_t k = 0; k < space.level_size(n); ++k) {
    IdentitySides sides = q_eval_sides(previous, space.at_level(n, k));
    if (sides.expectation != sides.q_mass) return sides;
  }
  return std::nullopt;
}

LastZeroLaw q_law_of_g(const AdaptedProcess& x) {
  const PathSpace& space = x.space();
  const int horizon = space.horizon();
  LastZeroLaw law;
  for (int n = 0; n <= horizon; ++n) law.expectations.push_back(expect(x, n));

  const QSlice slice = q_limit(x);
  std::vector<Rational> grouped(static_cast<std::size_t>(horizon));
  for (std::size_t i = 0; i < space.leaf_count(); ++i) {
    const auto& g = slice.last_zero.at_leaf(i);
    if (!g) {
      law.zero_free += slice.measure.weight(i);
    } else if (*g < horizon) {
      grouped[static_cast<std::size_t>(*g)] += slice.measure.weight(i);
    }
  }

  // Q[g < n] = E_P[X_n] for n >= 1, and {g < 1} = {g = 0} plus the zero-free paths.
  law.mass.resize(static_cast<std::size_t>(horizon));
  law.mass[0] = law.expectations[1] - law.zero_free;
  for (int n = 1; n < horizon; ++n) {
    law.mass[static_cast<std::size_t>(n)] =
        law.expectations[static_cast<std::size_t>(n) + 1] - law.expectations[static_cast<std::size_t>(n)];
  }
  for (int n = 0; n < horizon; ++n) {
    const auto& m = law.mass[static_cast<std::size_t>(n)];
    if (sgn(m) < 0) {
      throw std::domain_error("negative mass Q[g = " + std::to_string(n) + "] = " + to_string(m) +
                              " (input is not a submartingale)");
    }
    if (m != grouped[static_cast<std::size_t>(n)]) {
      throw std::domain_error("Q[g = " + std::to_string(n) + "]: expectation differences give " + to_string(m) +
                              " but the horizon slice gives " + to_string(grouped[static_cast<std::size_t>(n)]));
    }
  }
  return law;
}

namespace {

// Sparse exact linear system solved by Gaussian elimination. Pivots are
// kept in creation order; reducing a row by pivot t only introduces
// variables whose pivots (if any) were created after t.
class SparseSystem {
 public:
  using Row = std::map<std::size_t, Rational>;

  explicit SparseSystem(std::size_t unknowns) : pivot_of_(unknowns, kNone) {}

  // Returns false if the row reduces to 0 = c with c != 0.
  bool add(Row row, Rational rhs) {
    using Entry = std::pair<std::size_t, std::size_t>;  // (pivot order, variable)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pending;
    for (const auto& [var, coef] : row) {
      if (pivot_of_[var] != kNone) pending.push({pivot_of_[var], var});
    }
    while (!pending.empty()) {
      const auto [order, var] = pending.top();
      pending.pop();
      const auto it = row.find(var);
      if (it == row.end()) continue;
      const Rational factor = it->second / pivots_[order].row.at(var);
      for (const auto& [pv, pc] : pivots_[order].row) {
        Rational& slot = row[pv];
        const bool was_zero = sgn(slot) == 0;
        slot -= factor * pc;
        if (sgn(slot) == 0) {
          row.erase(pv);
        } else if (was_zero && pivot_of_[pv] != kNone) {
          pending.push({pivot_of_[pv], pv});
        }
      }
      rhs -= factor * pivots_[order].rhs;
    }
    if (row.empty()) return sgn(rhs) == 0;
    const std::size_t var = row.begin()->first;
    pivot_of_[var] = pivots_.size();
    pivots_.push_back({var, std::move(row), std::move(rhs)});
    return true;
  }

  bool full_rank() const { return pivots_.size() == pivot_of_.size(); }

  std::vector<Rational> solve() const {
    std::vector<Rational> x(pivot_of_.size());
    for (std::size_t t = pivots_.size(); t-- > 0;) {
      const Pivot& p = pivots_[t];
      Rational acc = p.rhs;
      for (const auto& [var, coef] : p.row) {
        if (var != p.var) acc -= coef * x[var];
      }
      x[p.var] = acc / p.row.at(p.var);
    }
    return x;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  struct Pivot {
    std::size_t var;
    Row row;
    Rational rhs;
  };
  std::vector<std::size_t> pivot_of_;
  std::vector<Pivot> pivots_;
};

}  // namespace

std::optional<PathMeasure> reconstruct_q(const AdaptedProcess& x) {
  const PathSpace& space = x.space();
  const int horizon = space.horizon();
  const RandomTime g = last_zero(x);

  // Unknowns: weights of leaves with g < H. Leaves with g = H carry no
  // Q-mass on the horizon slice.
  std::vector<std::size_t> unknown_of(space.leaf_count(), static_cast<std::size_t>(-1));
  std::size_t unknowns = 0;
  for (std::size_t i = 0; i < space.leaf_count(); ++i) {
    if (!g.at_leaf(i) || *g.at_leaf(i) < horizon) unknown_of[i] = unknowns++;
  }

  // One equation per (n, depth-n atom): sum of weights below the atom on
  // {g < n} equals E_P[1_atom X_n]. Finest atoms first.
  SparseSystem system(unknowns);
  for (int n = horizon; n >= 1; --n) {
    for (std::size_t k = 0; k < space.level_size(n); ++k) {
      const NodeId atom = space.at_level(n, k);
      SparseSystem::Row row;
      const auto [first, last] = space.leaves_below(atom);
      for (std::size_t i = first; i < last; ++i) {
        if (!g.at_leaf(i) || *g.at_leaf(i) < n) row.emplace(unknown_of[i], 1);
      }
      if (!system.add(std::move(row), space.prob(atom) * x[atom])) return std::nullopt;
    }
  }
  if (!system.full_rank()) throw std::logic_error("reconstruct_q: identity system is underdetermined");

  const auto solution = system.solve();
  std::vector<Rational> weights(space.leaf_count());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (unknown_of[i] != static_cast<std::size_t>(-1)) weights[i] = solution[unknown_of[i]];
  }
  for (const auto& w : weights) {
    if (sgn(w) < 0) return std::nullopt;
  }
  return PathMeasure(x.space_ptr(), std::move(weights));
}

bool uniqueness_probe(const AdaptedProcess& x) {
  const auto q = reconstruct_q(x);
  if (!q) return false;
  const PathSpace& space = x.space();
  const RandomTime g = last_zero(x);
  for (int level = 0; level < space.horizon(); ++level) {
    const QnMeasure qn = build_qn(x, level);
    for (std::size_t i = 0; i < space.leaf_count(); ++i) {
      const Rational expected = at_most(g.at_leaf(i), level) ? q->weight(i) : Rational(0);
      if (qn.weight(i) != expected) return false;
    }
  }
  return true;
}

}  // namespace sigmalab
