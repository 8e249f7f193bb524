#include <gtest/gtest.h>

#include <vector>

#include "idv/error.hpp"
#include "idv/property_checks.hpp"
#include "idv/random.hpp"
#include "idv/valuation.hpp"

using namespace idv;

namespace {

// Brute-force decreasing-differences test over every comparable pair of
// contexts and every pair of values of the raised coordinate.
bool submodular_by_pairs(const ValuationFunction& v, const SignalGrid& grid) {
  std::vector<SignalProfile> points;
  grid.for_each_point([&](const auto&, const SignalProfile& p) { points.push_back(p); });
  const std::size_t n = grid.arity();
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& lo_ctx : points) {
      for (const auto& hi_ctx : points) {
        bool above = true;
        for (std::size_t j = 0; j < n; ++j) above = above && (j == i || hi_ctx[j] >= lo_ctx[j]);
        if (!above) continue;
        for (double a : grid.axis(i)) {
          for (double b : grid.axis(i)) {
            if (b <= a) continue;
            const double gain_hi = v(hi_ctx.with(i, b)) - v(hi_ctx.with(i, a));
            const double gain_lo = v(lo_ctx.with(i, b)) - v(lo_ctx.with(i, a));
            if (gain_hi > gain_lo + kValueTolerance) return false;
          }
        }
      }
    }
  }
  return true;
}

bool subadditive_by_subsets(const ValuationFunction& v, const SignalProfile& s) {
  const std::size_t n = s.size();
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    std::vector<double> in(n, 0.0), out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) ((m >> j) & 1 ? in : out)[j] = s[j];
    if (v(s) > v.evaluate(in) + v.evaluate(out) + kValueTolerance) return false;
  }
  return true;
}

ValuationFunction random_table(std::size_t n, RandomSource& src) {
  std::vector<std::vector<double>> axes(n, {0.0, 1.0, 2.0});
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= 3;
  std::vector<double> values(count);
  // Monotone by construction: accumulate non-negative increments.
  const SignalGrid grid(axes);
  std::size_t k = 0;
  grid.for_each_point([&](const auto& idx, const SignalProfile&) {
    double best = 0.0;
    std::size_t stride = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (idx[i] > 0) best = std::max(best, values[k - stride]);
      stride *= 3;
    }
    values[k++] = best + static_cast<double>(src.uniform_index(4));
  });
  return ValuationFunction::lookup_table(axes, values);
}

}  // namespace

TEST(Evaluate, Examples) {
  // Agent 2 of the farsighted hardness family, last signal 0.8 >= 1 - 1/4.
  EXPECT_EQ(ValuationFunction::indicator_power(2, 3)(SignalProfile{0, 0, 0.8}), 4.0);
  EXPECT_EQ(ValuationFunction::indicator_power(2, 3)(SignalProfile{0, 0, 0.7}), 0.0);
  EXPECT_EQ(ValuationFunction::product({0, 1}, 3)(SignalProfile{2, 2, 9}), 4.0);
  EXPECT_EQ(ValuationFunction::additive({1, 1, 1})(SignalProfile{0, 0, 0}), 0.0);
}

TEST(Evaluate, EachForm) {
  const SignalProfile s{1, 2, 3};
  EXPECT_EQ(ValuationFunction::additive({1, 0.5, 2})(s), 1 + 1 + 6);
  EXPECT_EQ(ValuationFunction::weighted_max({3, 1, 0.5})(s), 3.0);
  EXPECT_EQ(ValuationFunction::own_signal(1, 3)(s), 2.0);
  EXPECT_EQ(ValuationFunction::sum_plus_constant(1, {0, 0, 1})(s), 4.0);
  EXPECT_EQ(ValuationFunction::coverage(3, {1, 2}, {{0, 2}, {1}})(s), 1 * 3 + 2 * 2);
  EXPECT_EQ(ValuationFunction::zero(3)(s), 0.0);
  const auto t = ValuationFunction::lookup_table({{0, 1}, {0, 2}}, {0, 1, 2, 5});
  EXPECT_EQ(t(SignalProfile{1, 2}), 5.0);
  EXPECT_EQ(t(SignalProfile{0.5, 3}), 2.0);  // floor onto the grid
}

TEST(Evaluate, ArityMismatchThrows) {
  EXPECT_THROW(ValuationFunction::additive({1, 1})(SignalProfile{1, 2, 3}), InvalidInput);
}

TEST(Evaluate, InvalidParametersThrow) {
  EXPECT_THROW(ValuationFunction::additive({1, -1}), InvalidInput);
  EXPECT_THROW(ValuationFunction::own_signal(3, 3), InvalidInput);
  EXPECT_THROW(ValuationFunction::product({4}, 2), InvalidInput);
  EXPECT_THROW(ValuationFunction::lookup_table({{1, 2}}, {0, 1}), InvalidInput);
  EXPECT_THROW(ValuationFunction::lookup_table({{0, 1}}, {0}), InvalidInput);
  EXPECT_THROW(ValuationFunction::coverage(2, {1}, {{0}, {1}}), InvalidInput);
}

TEST(Evaluate, FullMaskIsIdentityAndDependsOn) {
  const auto v = ValuationFunction::additive({1, 0, 2});
  EXPECT_TRUE(v.depends_on(0));
  EXPECT_FALSE(v.depends_on(1));
  const SignalProfile p{1, 4, 2};
  EXPECT_EQ(v(mask(p, SignalMask::full(3))), v(p));
  const auto w = v.extended_to(5);
  EXPECT_EQ(w.arity(), 5u);
  EXPECT_EQ(w(SignalProfile{1, 4, 2, 7, 7}), v(p));
}

TEST(CheckMonotone, Examples) {
  const auto grid = SignalGrid::uniform(3, {0, 0.5, 1, 2});
  EXPECT_TRUE(check_monotone(ValuationFunction::additive({0.2, 1, 3}), grid));
  EXPECT_TRUE(check_monotone(ValuationFunction::coverage(3, {1, 1, 2}, {{0}, {1, 2}, {0, 2}}),
                             SignalGrid::uniform(3, {0, 1})));
  const auto bad = ValuationFunction::lookup_table({{0, 1}, {0, 1}}, {0, 3, 2, 1});
  const auto r = check_monotone(bad, SignalGrid::uniform(2, {0, 1}));
  ASSERT_FALSE(r.passed);
  EXPECT_EQ(r.witness->value_lower, 3.0);
  EXPECT_EQ(r.witness->value_upper, 1.0);
  EXPECT_THROW(check_monotone(bad, SignalGrid{}), InvalidInput);
}

TEST(CheckMonotone, BuiltInFormsPassOnRandomGrids) {
  RandomSource src(1, streams::kChecker);
  const SignalGrid grid = SignalGrid::uniform(3, {0, 0.25, 0.5, 0.75, 1, 3});
  for (const auto& v : {ValuationFunction::additive({1, 2, 0}),
                        ValuationFunction::weighted_max({1, 0.5, 2}),
                        ValuationFunction::own_signal(2, 3),
                        ValuationFunction::sum_plus_constant(3, {0, 1, 1}),
                        ValuationFunction::indicator_power(2, 3),
                        ValuationFunction::product({0, 2}, 3),
                        ValuationFunction::coverage(3, {1, 2}, {{0, 1}, {2}})}) {
    EXPECT_TRUE(check_monotone(v, grid)) << v.form_name();
  }
}

TEST(CheckSubadditive, Examples) {
  const SignalProfile s{2, 1, 4};
  auto r = check_subadditive(ValuationFunction::additive({1, 2, 3}), s, SubsetMode::exhaustive);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.comparisons, 8u);
  EXPECT_FALSE(check_subadditive(ValuationFunction::product({0, 1}, 2), SignalProfile{2, 2},
                                 SubsetMode::exhaustive));
}

TEST(CheckSubadditive, ProductFailsWithWitness) {
  const auto r = check_subadditive(ValuationFunction::product({0, 1}, 2), SignalProfile{2, 3},
                                   SubsetMode::exhaustive);
  ASSERT_FALSE(r.passed);
  EXPECT_EQ(r.witness->whole, 6.0);
  EXPECT_EQ(r.witness->part + r.witness->rest, 0.0);
}

TEST(CheckSubadditive, AgreesWithSubsetEnumeration) {
  RandomSource src(2, streams::kChecker);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + src.uniform_index(5);
    std::vector<double> s(n);
    for (auto& x : s) x = static_cast<double>(src.uniform_index(5));
    std::vector<ValuationFunction> vs{
        ValuationFunction::weighted_max(std::vector<double>(n, 1.0)),
        ValuationFunction::sum_plus_constant(1, std::vector<double>(n, 0.5)),
        ValuationFunction::product({0, n - 1}, n),
        ValuationFunction::indicator_power(1, n),
        random_table(std::min<std::size_t>(n, 3), src).extended_to(n),
    };
    for (const auto& v : vs) {
      const SignalProfile p(s);
      EXPECT_EQ(check_subadditive(v, p, SubsetMode::exhaustive).passed, subadditive_by_subsets(v, p))
          << v.form_name();
    }
  }
}

TEST(CheckSubadditive, SubadditiveFormsPassForTenAgents) {
  RandomSource src(3, streams::kChecker);
  const std::size_t n = 10;
  std::vector<double> s(n), w(n);
  for (std::size_t j = 0; j < n; ++j) {
    s[j] = src.uniform01() * 4;
    w[j] = src.uniform01();
  }
  const SignalProfile p(s);
  for (const auto& v : {ValuationFunction::additive(w), ValuationFunction::weighted_max(w),
                        ValuationFunction::sum_plus_constant(2, w), ValuationFunction::own_signal(4, n),
                        ValuationFunction::indicator_power(3, n),
                        ValuationFunction::coverage(n, {1, 2, 3}, {{0, 5}, {1, 2, 9}, {7}})}) {
    EXPECT_TRUE(check_subadditive(v, p, SubsetMode::exhaustive)) << v.form_name();
  }
}

TEST(CheckSubadditive, SampledModeFindsProductViolation) {
  RandomSource src(4, streams::kChecker);
  const auto r = check_subadditive(ValuationFunction::product({0, 1, 2}, 12),
                                   SignalProfile(std::vector<double>(12, 2.0)), SubsetMode::sampled,
                                   &src);
  EXPECT_FALSE(r.passed);
  EXPECT_LE(r.comparisons, kSampledSubsets);
  EXPECT_THROW(check_subadditive(ValuationFunction::zero(21), SignalProfile::zeros(21),
                                 SubsetMode::exhaustive),
               PreconditionError);
}

TEST(CheckSubmodular, Examples) {
  const auto g3 = SignalGrid::uniform(3, {0, 1});
  EXPECT_TRUE(check_submodular(ValuationFunction::additive({1, 2, 3}), g3));
  EXPECT_TRUE(check_submodular(ValuationFunction::coverage(3, {1, 2}, {{0, 1}, {1, 2}}), g3));
  const auto r = check_submodular(ValuationFunction::product({0, 1}, 2),
                                  SignalGrid::uniform(2, {0, 1, 2}));
  ASSERT_FALSE(r.passed);
  EXPECT_GT(r.witness->lhs, r.witness->rhs);
}

TEST(CheckSubmodular, LocalCheckMatchesAllPairsOracle) {
  RandomSource src(5, streams::kChecker);
  int fails = 0;
  for (int rep = 0; rep < 80; ++rep) {
    const std::size_t n = 2 + src.uniform_index(2);
    const auto v = random_table(n, src);
    const SignalGrid grid = SignalGrid::uniform(n, {0, 1, 2});
    const bool local = check_submodular(v, grid).passed;
    EXPECT_EQ(local, submodular_by_pairs(v, grid));
    fails += local ? 0 : 1;
  }
  EXPECT_GT(fails, 0);  // the generator produces both outcomes
}

TEST(CheckSubmodular, SubmodularPassImpliesSubadditivePass) {
  RandomSource src(6, streams::kChecker);
  for (int rep = 0; rep < 80; ++rep) {
    const std::size_t n = 2 + src.uniform_index(2);
    const auto v = random_table(n, src);
    const SignalGrid grid = SignalGrid::uniform(n, {0, 1, 2});
    if (!check_submodular(v, grid)) continue;
    grid.for_each_point([&](const auto&, const SignalProfile& p) {
      EXPECT_TRUE(check_subadditive(v, p, SubsetMode::exhaustive));
    });
  }
}

TEST(CheckSingleCrossing, Examples) {
  const auto grid = SignalGrid::uniform(3, {0, 1, 2});
  std::vector<ValuationFunction> own{ValuationFunction::own_signal(0, 3),
                                     ValuationFunction::own_signal(1, 3),
                                     ValuationFunction::own_signal(2, 3)};
  EXPECT_TRUE(check_single_crossing(own, grid));
  std::vector<ValuationFunction> same(3, ValuationFunction::additive({1, 1, 1}));
  EXPECT_TRUE(check_single_crossing(same, grid));

  // v_0 = s_0 + 1, v_last = n s_0: raising s_0 moves the last agent more.
  const std::size_t n = 4;
  std::vector<ValuationFunction> cx(n, ValuationFunction::sum_plus_constant(1, {1, 0, 0, 0}));
  cx[n - 1] = ValuationFunction::additive({static_cast<double>(n), 0, 0, 0});
  const auto r = check_single_crossing(cx, SignalGrid::uniform(n, {0, 1}));
  ASSERT_FALSE(r.passed);
  EXPECT_EQ(r.witness->i, 0u);
  EXPECT_EQ(r.witness->j, n - 1);
  EXPECT_GT(r.witness->other_increase, r.witness->own_increase);
}

TEST(Tabulate, FirstCoordinateFastest) {
  const auto v = ValuationFunction::additive({1, 10});
  EXPECT_EQ(tabulate(v, SignalGrid({{0, 1}, {0, 1}})), (std::vector<double>{0, 1, 10, 11}));
}
