#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "sigmalab/decomposition.hpp"
#include "sigmalab/gallery.hpp"
#include "walk_oracle.hpp"

namespace sigmalab {
namespace {

std::pair<SpacePtr, AdaptedProcess> gallery(ProcessKind kind, int horizon) {
  return make_process({kind, horizon, {}, {}});
}

oracle::Walk walk_of(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::kReflectedSrw: return oracle::Walk::kReflected;
    case ProcessKind::kDrawdown: return oracle::Walk::kDrawdown;
    default: return oracle::Walk::kPositivePart;
  }
}

std::vector<int> steps_to(const PathSpace& space, NodeId v) {
  std::vector<int> steps;
  for (int rank : space.path_of(v)) steps.push_back(rank == 0 ? 1 : -1);
  return steps;
}

TEST(DoobDecompose, ZeroProcess) {
  const auto space = PathSpace::fair_binary(3);
  const auto dec = doob_decompose(AdaptedProcess::constant(space, 0));
  for (const auto& v : dec.martingale.values()) EXPECT_EQ(v, 0);
  for (const auto& v : dec.compensator.values()) EXPECT_EQ(v, 0);
}

// A at a depth-n node counts the zeros of the walk at times k < n.
TEST(DoobDecompose, ReflectedCompensatorCountsZeros) {
  const auto [space, x] = gallery(ProcessKind::kReflectedSrw, 4);
  const auto dec = doob_decompose(x);
  for (std::uint32_t i = 0; i < space->node_count(); ++i) {
    const NodeId v{space->id(), i};
    const auto values = oracle::values_along(oracle::Walk::kReflected, steps_to(*space, v));
    long zeros = 0;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) zeros += values[k] == 0;
    EXPECT_EQ(dec.compensator[v], zeros);
  }
}

TEST(DoobDecompose, DrawdownCompensatorStepsByHalfAfterZeros) {
  const auto [space, x] = gallery(ProcessKind::kDrawdown, 4);
  const auto dec = doob_decompose(x);
  for (std::uint32_t i = 0; i < space->node_count(); ++i) {
    const NodeId v{space->id(), i};
    const auto parent = space->parent(v);
    if (!parent) continue;
    const Rational step = dec.compensator[v] - dec.compensator[*parent];
    EXPECT_EQ(step, sgn(x[*parent]) == 0 ? Rational(1, 2) : Rational(0));
  }
}

TEST(DoobDecompose, MatchesBruteForceOracle) {
  for (auto kind : {ProcessKind::kReflectedSrw, ProcessKind::kDrawdown, ProcessKind::kPositivePart}) {
    const auto [space, x] = gallery(kind, 6);
    const auto dec = doob_decompose(x);
    for (std::uint32_t i = 0; i < space->node_count(); ++i) {
      const NodeId v{space->id(), i};
      EXPECT_EQ(dec.compensator[v], oracle::compensator(walk_of(kind), steps_to(*space, v)));
    }
  }
}

TEST(DoobDecompose, RejectsNonSubmartingale) {
  const auto [space, x] = gallery(ProcessKind::kReflectedSrw, 3);
  try {
    doob_decompose(-x);
    FAIL() << "expected NotSubmartingale";
  } catch (const NotSubmartingale& e) {
    EXPECT_EQ(e.node(), space->root());
    EXPECT_EQ(e.drift(), -1);
  }
}

TEST(Martingale, Examples) {
  const auto space = PathSpace::fair_binary(3);
  EXPECT_TRUE(is_martingale(AdaptedProcess::constant(space, 7)));
  for (int h = 2; h <= 5; ++h) {
    const auto [s, x] = gallery(ProcessKind::kReflectedSrw, h);
    EXPECT_FALSE(is_martingale(x));
  }
  for (auto kind : {ProcessKind::kReflectedSrw, ProcessKind::kDrawdown, ProcessKind::kPositivePart}) {
    const auto [s, x] = gallery(kind, 6);
    EXPECT_TRUE(is_martingale(doob_decompose(x).martingale));
  }
}

TEST(Submartingale, Examples) {
  const auto space = PathSpace::fair_binary(3);
  EXPECT_TRUE(is_submartingale(AdaptedProcess::constant(space, -3)));
  const auto [s, x] = gallery(ProcessKind::kReflectedSrw, 5);
  EXPECT_TRUE(is_submartingale(x));
  EXPECT_TRUE(is_submartingale(doob_decompose(x).martingale));
  EXPECT_FALSE(is_submartingale(-x));
}

TEST(SigmaClass, GalleryPasses) {
  for (auto kind : {ProcessKind::kReflectedSrw, ProcessKind::kPositivePart, ProcessKind::kDrawdown}) {
    const auto [space, x] = gallery(kind, 6);
    const auto report = check_sigma_class(x, doob_decompose(x));
    EXPECT_TRUE(report.passed()) << kind_name(kind);
    EXPECT_TRUE(report.violations.empty());
    EXPECT_TRUE(report.negative_values.empty());
  }
}

TEST(SigmaClass, ReflectedPlusTimeFailsAtEveryPositiveNode) {
  const auto [space, x] = make_process(reflected_plus_time_spec(4));
  const auto dec = doob_decompose(x);
  const auto report = check_sigma_class(x, dec);
  EXPECT_TRUE(report.decomposition_valid());
  EXPECT_FALSE(report.passed());
  std::size_t positive_internal = 0;
  for (std::uint32_t i = 0; i < space->node_count(); ++i) {
    const NodeId v{space->id(), i};
    if (space->depth(v) < space->horizon() && sgn(x[v]) > 0) ++positive_internal;
  }
  EXPECT_EQ(report.violations.size(), positive_internal);
  for (const auto& v : report.violations) {
    EXPECT_GT(v.value, 0);
    EXPECT_NE(v.increment, 0);
  }
}

TEST(SigmaClass, ReportsBrokenDecompositionAndNegativeValues) {
  const auto [space, x] = gallery(ProcessKind::kReflectedSrw, 3);
  Decomposition dec = doob_decompose(x);
  // Shift A by a constant: A_0 != 0 and N + A != X.
  dec.compensator = dec.compensator + AdaptedProcess::constant(space, 1);
  const auto report = check_sigma_class(x, dec);
  EXPECT_FALSE(report.compensator_starts_at_zero);
  EXPECT_FALSE(report.sum_matches);
  EXPECT_TRUE(report.compensator_predictable);
  EXPECT_FALSE(report.passed());

  const auto shifted = x - AdaptedProcess::constant(space, 1);
  const auto shifted_report = check_sigma_class(shifted, doob_decompose(shifted));
  EXPECT_FALSE(shifted_report.negative_values.empty());

  const auto other = PathSpace::fair_binary(3);
  const auto foreign = doob_decompose(AdaptedProcess::constant(other, 0));
  EXPECT_THROW(check_sigma_class(x, foreign), std::invalid_argument);
}

TEST(Properties, ExpectationSplitsIntoStartPlusCompensator) {
  for (auto kind : {ProcessKind::kReflectedSrw, ProcessKind::kDrawdown, ProcessKind::kPositivePart}) {
    for (int h = 1; h <= 8; ++h) {
      const auto [space, x] = gallery(kind, h);
      const auto dec = doob_decompose(x);
      for (int n = 0; n <= h; ++n) EXPECT_EQ(expect(x, n), x[space->root()] + expect(dec.compensator, n));
    }
  }
}

// Any other predictable B with B_0 = 0 leaves X - B a non-martingale.
TEST(Properties, DecompositionIsUnique) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto space = gen::random_space(rng, 1 + trial % 4);
    const auto x = gen::random_sigma_process(rng, space);
    const auto dec = doob_decompose(x);
    // Perturb A by a random predictable process vanishing at the root.
    std::uniform_int_distribution<int> d(-3, 3);
    std::vector<Rational> shift(space->node_count());
    bool nonzero = false;
    for (std::uint32_t i = 0; i < space->node_count(); ++i) {
      const NodeId v{space->id(), i};
      if (space->depth(v) == space->horizon()) continue;
      const Rational s(d(rng));
      nonzero = nonzero || sgn(s) != 0;
      for (NodeId c : space->children(v)) shift[c.index] = shift[i] + s;
    }
    const AdaptedProcess b(space, shift);
    ASSERT_TRUE(is_predictable(b));
    const auto other_a = dec.compensator + b;
    EXPECT_EQ(is_martingale(x - other_a), !nonzero);
  }
}

TEST(Properties, IdempotentOnValidPairs) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto space = gen::random_space(rng, 1 + trial % 5);
    const auto x = gen::random_sigma_process(rng, space);
    const auto dec = doob_decompose(x);
    const auto again = doob_decompose(dec.martingale + dec.compensator);
    EXPECT_EQ(again.martingale, dec.martingale);
    EXPECT_EQ(again.compensator, dec.compensator);
    const auto report = check_sigma_class(x, dec);
    EXPECT_TRUE(report.passed());
  }
}

}  // namespace
}  // namespace sigmalab
