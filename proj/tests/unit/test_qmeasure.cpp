#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "sigmalab/gallery.hpp"
#include "sigmalab/qmeasure.hpp"
#include "walk_oracle.hpp"

namespace sigmalab {
namespace {

constexpr ProcessKind kGallery[] = {ProcessKind::kReflectedSrw, ProcessKind::kDrawdown, ProcessKind::kPositivePart};

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

TEST(BuildQn, ZeroProcessGivesZeroMeasure) {
  const auto space = PathSpace::fair_binary(3);
  const auto zero = AdaptedProcess::constant(space, 0);
  for (int level = 0; level < 3; ++level) EXPECT_EQ(build_qn(zero, level).total(), 0);
}

TEST(BuildQn, PositiveConstantIsScaledProbability) {
  const auto space = PathSpace::fair_binary(3);
  const auto x = AdaptedProcess::constant(space, 5);
  const auto p = PathMeasure::probability(space);
  for (int level = 0; level < 3; ++level) {
    const auto qn = build_qn(x, level);
    for (std::size_t i = 0; i < space->leaf_count(); ++i) EXPECT_EQ(qn.weight(i), 5 * p.weight(i));
  }
}

TEST(BuildQn, ReflectedLevelZeroHasMassOne) {
  const auto [s, x] = gallery(ProcessKind::kReflectedSrw, 4);
  EXPECT_EQ(build_qn(x, 0).total(), 1);
  EXPECT_THROW(build_qn(x, 4), std::out_of_range);
  EXPECT_THROW(build_qn(x, -1), std::out_of_range);
}

TEST(BuildQn, MatchesOracleDensity) {
  for (auto kind : kGallery) {
    const int h = 6;
    const auto [space, x] = gallery(kind, h);
    for (int level = 0; level < h; ++level) {
      const auto qn = build_qn(x, level);
      for (std::size_t i = 0; i < space->leaf_count(); ++i) {
        EXPECT_EQ(qn.weight(i), oracle::qn_leaf_weight(walk_of(kind), oracle::steps_of(i, h), level));
      }
    }
  }
}

TEST(DensityCheck, DetectsCorruption) {
  const auto [space, x] = gallery(ProcessKind::kReflectedSrw, 4);
  const auto qn = build_qn(x, 1);
  for (int p = 2; p <= 4; ++p) EXPECT_TRUE(qn_density_check(qn, p));
  EXPECT_THROW(qn_density_check(qn, 1), std::out_of_range);
  EXPECT_THROW(qn_density_check(qn, 5), std::out_of_range);

  std::vector<Rational> w(qn.measure().weights().begin(), qn.measure().weights().end());
  w[0] += Rational(1, 16);
  const auto corrupted = qn.with_weights(w);
  EXPECT_FALSE(qn_density_check(corrupted, 4));
  EXPECT_EQ(density_mismatch(corrupted, 2), space->at_level(2, 0));

  const auto zero = AdaptedProcess::constant(space, 0);
  EXPECT_TRUE(qn_density_check(build_qn(zero, 0), 3));
}

TEST(KillsFutureZeros, GalleryCorruptedAndZeroFree) {
  const auto [space, x] = gallery(ProcessKind::kPositivePart, 5);
  for (int level = 0; level < 5; ++level) EXPECT_TRUE(qn_kills_future_zeros(build_qn(x, level)));

  const auto qn = build_qn(x, 0);
  std::vector<Rational> w(qn.measure().weights().begin(), qn.measure().weights().end());
  // Steps +1 -1 +1 +1 +1: X vanishes at time 2, so Q^(0) gives the leaf no mass.
  const std::size_t zero_at_two = 0b01000;
  ASSERT_EQ(w[zero_at_two], 0);
  w[zero_at_two] = Rational(1, 32);
  EXPECT_FALSE(qn_kills_future_zeros(qn.with_weights(w)));
  EXPECT_EQ(future_zero_violation(qn.with_weights(w)), zero_at_two);

  const auto positive = AdaptedProcess::constant(space, 2);
  EXPECT_TRUE(qn_kills_future_zeros(build_qn(positive, 2)));
}

TEST(Restriction, AllPairsOnReflectedAndDrawdown) {
  const auto [space, x] = gallery(ProcessKind::kReflectedSrw, 6);
  std::vector<QnMeasure> qns;
  for (int level = 0; level < 6; ++level) qns.push_back(build_qn(x, level));
  for (int m = 0; m < 6; ++m) {
    EXPECT_TRUE(restriction_check(qns[static_cast<std::size_t>(m)], qns[static_cast<std::size_t>(m)]));
    for (int n = m; n < 6; ++n) {
      EXPECT_TRUE(restriction_check(qns[static_cast<std::size_t>(m)], qns[static_cast<std::size_t>(n)]));
    }
  }
  EXPECT_THROW(restriction_check(qns[3], qns[1]), std::invalid_argument);

  const auto [s2, drawdown] = gallery(ProcessKind::kDrawdown, 6);
  EXPECT_TRUE(restriction_check(build_qn(drawdown, 1), build_qn(drawdown, 4)));
  EXPECT_THROW(restriction_check(qns[0], build_qn(drawdown, 1)), std::invalid_argument);
}

TEST(QLimit, Examples) {
  const auto space = PathSpace::fair_binary(3);
  EXPECT_EQ(q_limit(AdaptedProcess::constant(space, 0)).measure.total(), 0);

  const auto positive = AdaptedProcess::constant(space, 3);
  const auto slice = q_limit(positive);
  const auto p = PathMeasure::probability(space);
  for (std::size_t i = 0; i < space->leaf_count(); ++i) EXPECT_EQ(slice.measure.weight(i), 3 * p.weight(i));

  const auto [s4, x] = gallery(ProcessKind::kReflectedSrw, 4);
  const auto reflected = q_limit(x);
  for (std::size_t i = 0; i < s4->leaf_count(); ++i) {
    const auto steps = oracle::steps_of(i, 4);
    const auto values = oracle::values_along(oracle::Walk::kReflected, steps);
    const bool massless = values[4] == 0 || oracle::last_zero(oracle::Walk::kReflected, steps) == 4;
    EXPECT_EQ(sgn(reflected.measure.weight(i)) == 0, massless) << "leaf " << i;
    EXPECT_EQ(reflected.last_zero.at_leaf(i), oracle::last_zero(oracle::Walk::kReflected, steps));
  }
}

TEST(QEval, Examples) {
  const auto [space, x] = gallery(ProcessKind::kReflectedSrw, 4);
  EXPECT_EQ(q_eval(x, 3, atoms(*space, 3)), Rational(3, 2));
  EXPECT_EQ(q_eval(x, 1, atoms(*space, 1)), 1);
  EXPECT_EQ(q_eval(x, 2, {}), 0);
  EXPECT_THROW(q_eval(x, 0, atoms(*space, 0)), std::out_of_range);
  EXPECT_THROW(q_eval(x, 5, {}), std::out_of_range);
  const std::vector<NodeId> twice{space->at_level(2, 0), space->at_level(2, 0)};
  EXPECT_THROW(q_eval(x, 2, twice), std::invalid_argument);
  EXPECT_THROW(q_eval(x, 2, atoms(*space, 3)), std::invalid_argument);
}

TEST(QEval, BothSidesMatchOracle) {
  for (auto kind : kGallery) {
    const int h = 6;
    const auto [space, x] = gallery(kind, h);
    for (int n = 1; n <= h; ++n) {
      const auto previous = build_qn(x, n - 1);
      for (std::size_t k = 0; k < space->level_size(n); ++k) {
        const auto sides = q_eval_sides(previous, space->at_level(n, k));
        EXPECT_EQ(sides.expectation, oracle::atom_expectation(walk_of(kind), n, k));
        EXPECT_EQ(sides.q_mass, oracle::atom_q_mass(walk_of(kind), h, n, k));
        EXPECT_EQ(sides.q_mass, sides.expectation);
      }
    }
  }
}

TEST(QEval, NegativeControlThrowsWithWitness) {
  const auto [space, x] = make_process(reflected_plus_time_spec(4));
  const auto witness = find_q_eval_disagreement(x, 1);
  ASSERT_TRUE(witness.has_value());
  EXPECT_NE(witness->expectation, witness->q_mass);
  try {
    q_eval(x, 1, atoms(*space, 1));
    FAIL() << "expected IdentityMismatch";
  } catch (const IdentityMismatch& e) {
    EXPECT_EQ(space->depth(e.sides().atom), 1);
  }
}

TEST(LawOfG, Examples) {
  const auto [s4, reflected] = gallery(ProcessKind::kReflectedSrw, 4);
  const auto law = q_law_of_g(reflected);
  EXPECT_EQ(law.mass, (std::vector<Rational>{1, 0, Rational(1, 2), 0}));
  EXPECT_EQ(law.zero_free, 0);

  const auto [s2, drawdown] = gallery(ProcessKind::kDrawdown, 2);
  EXPECT_EQ(q_law_of_g(drawdown).mass[0], Rational(1, 2));

  const auto zero = AdaptedProcess::constant(PathSpace::fair_binary(3), 0);
  for (const auto& m : q_law_of_g(zero).mass) EXPECT_EQ(m, 0);
}

TEST(LawOfG, PartialSumsRecoverExpectations) {
  for (auto kind : kGallery) {
    for (int h = 1; h <= 8; ++h) {
      const auto [space, x] = gallery(kind, h);
      const auto law = q_law_of_g(x);
      Rational cumulative = law.zero_free;
      for (int m = 1; m <= h; ++m) {
        cumulative += law.mass[static_cast<std::size_t>(m - 1)];
        EXPECT_EQ(cumulative, oracle::expectation(walk_of(kind), m));
      }
      for (const auto& m : law.mass) EXPECT_GE(m, 0);
    }
  }
}

TEST(LawOfG, ZeroFreePathsUnderPositiveStart) {
  // X_0 = 1 and the walk from 1 reflected at 0: a class (Sigma) process with
  // zero-free paths, which sit in {g < n} for every n.
  const auto space = PathSpace::fair_binary(3);
  const auto x = AdaptedProcess::from_function(space, [&](NodeId v) {
    long s = 1;
    for (int r : space->path_of(v)) s += r == 0 ? 1 : -1;
    return Rational(s < 0 ? -s : s);
  });
  const auto law = q_law_of_g(x);
  Rational cumulative = law.zero_free;
  EXPECT_GT(law.zero_free, 0);
  for (int m = 1; m <= 3; ++m) {
    cumulative += law.mass[static_cast<std::size_t>(m - 1)];
    EXPECT_EQ(cumulative, expect(x, m));
  }
  EXPECT_TRUE(uniqueness_probe(x));
}

TEST(LawOfG, NonSigmaInputIsRejected) {
  const auto [space, x] = make_process(reflected_plus_time_spec(3));
  EXPECT_THROW(q_law_of_g(x), std::domain_error);
}

TEST(Uniqueness, GalleryH5) {
  for (auto kind : kGallery) {
    const auto [space, x] = gallery(kind, 5);
    EXPECT_TRUE(uniqueness_probe(x)) << kind_name(kind);
    const auto q = reconstruct_q(x);
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(*q, q_limit(x).measure);
  }
}

TEST(Uniqueness, FailsOffClass) {
  const auto [space, x] = make_process(reflected_plus_time_spec(3));
  EXPECT_FALSE(reconstruct_q(x).has_value());
  EXPECT_FALSE(uniqueness_probe(x));
}

TEST(Properties, MonotoneFamilyAndTotalsOnGallery) {
  for (auto kind : kGallery) {
    for (int h = 1; h <= 8; ++h) {
      const auto [space, x] = gallery(kind, h);
      std::optional<QnMeasure> previous;
      for (int level = 0; level < h; ++level) {
        auto qn = build_qn(x, level);
        EXPECT_EQ(qn.total(), expect(x, level + 1));
        if (previous) {
          for (std::size_t i = 0; i < space->leaf_count(); ++i) EXPECT_LE(previous->weight(i), qn.weight(i));
        }
        previous = std::move(qn);
      }
      EXPECT_EQ(q_limit(x).measure.total(), expect(x, h));
    }
  }
}

TEST(Properties, ExpectationsGrowStrictlyWhenZerosHaveMass) {
  // Reflected walk and drawdown always move up from zero.
  for (auto kind : {ProcessKind::kReflectedSrw, ProcessKind::kDrawdown}) {
    const auto [space, x] = gallery(kind, 8);
    for (int n = 0; n < 8; ++n) {
      Rational zero_mass = 0;
      for (NodeId a : atoms(*space, n)) {
        if (sgn(x[a]) == 0) zero_mass += space->prob(a);
      }
      const Rational gain = expect(x, n + 1) - expect(x, n);
      EXPECT_GE(gain, 0);
      if (zero_mass > 0) EXPECT_GT(gain, 0) << kind_name(kind) << " n=" << n;
    }
  }
}

TEST(Properties, IdentityHoldsOnRandomSigmaProcesses) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto space = gen::random_space(rng, 1 + trial % 5);
    const auto x = gen::random_sigma_process(rng, space);
    const int h = space->horizon();
    std::vector<QnMeasure> qns;
    for (int level = 0; level < h; ++level) {
      qns.push_back(build_qn(x, level));
      const auto& qn = qns.back();
      EXPECT_EQ(qn.total(), expect(x, level + 1));
      EXPECT_TRUE(qn_kills_future_zeros(qn));
      for (int p = level + 1; p <= h; ++p) EXPECT_TRUE(qn_density_check(qn, p));
    }
    for (int m = 0; m < h; ++m) {
      for (int n = m; n < h; ++n) {
        EXPECT_TRUE(restriction_check(qns[static_cast<std::size_t>(m)], qns[static_cast<std::size_t>(n)]));
      }
    }
    for (int n = 1; n <= h; ++n) {
      EXPECT_FALSE(find_q_eval_disagreement(x, n).has_value()) << "trial " << trial << " n=" << n;
      EXPECT_EQ(q_eval(x, n, atoms(*space, n)), expect(x, n));
    }
    EXPECT_NO_THROW(q_law_of_g(x));
    EXPECT_TRUE(uniqueness_probe(x));
  }
}

}  // namespace
}  // namespace sigmalab
