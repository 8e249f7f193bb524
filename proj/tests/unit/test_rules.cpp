#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "idv/error.hpp"
#include "idv/instance.hpp"
#include "idv/policy.hpp"
#include "idv/random.hpp"
#include "idv/rules.hpp"

using namespace idv;

namespace {

// ---- reference rules written straight from the stopping conditions -------

std::vector<double> first_k(const SignalProfile& s, const ArrivalOrder& o, std::size_t k) {
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t t = 0; t < k; ++t) out[o[t]] = s[o[t]];
  return out;
}

double value_at(const Instance& inst, std::size_t agent, const std::vector<double>& obs) {
  return inst.valuation(agent).evaluate(obs);
}

Outcome ref_outcome(const Instance& inst, const SignalProfile& s, const ArrivalOrder& o,
                    std::size_t t) {
  Outcome out;
  out.stopping_time = t;
  out.winner = o[t];
  out.myopic_welfare = value_at(inst, o[t], first_k(s, o, t + 1));
  out.farsighted_welfare = value_at(inst, o[t], std::vector<double>(s.values().begin(), s.values().end()));
  return out;
}

Outcome ref_algo1(const Instance& inst, double x, const SignalProfile& s) {
  const auto o = ArrivalOrder::identity(inst.size());
  for (std::size_t t = 0; t < inst.size(); ++t) {
    const auto obs = first_k(s, o, t + 1);
    const double vt = value_at(inst, t, obs);
    bool ok = vt >= x;
    for (std::size_t i = t + 1; i < inst.size(); ++i) ok = ok && vt >= value_at(inst, i, obs);
    if (ok) return ref_outcome(inst, s, o, t);
  }
  return {};
}

Outcome ref_mech2(const Instance& inst, double x, const SignalProfile& s, Coin coin) {
  const auto o = ArrivalOrder::identity(inst.size());
  for (std::size_t t = 0; t < inst.size(); ++t) {
    const auto obs = first_k(s, o, t + 1);
    if (value_at(inst, t, obs) < x) continue;
    Outcome out;
    if (coin == Coin::stop) {
      out = ref_outcome(inst, s, o, t);
      out.payment = x;
    } else if (t + 1 < inst.size()) {
      std::size_t best = t + 1;
      for (std::size_t i = t + 2; i < inst.size(); ++i) {
        if (value_at(inst, i, obs) > value_at(inst, best, obs)) best = i;
      }
      out = ref_outcome(inst, s, o, best);
    }
    out.coin = coin;
    return out;
  }
  Outcome out;
  out.coin = coin;
  return out;
}

Outcome ref_skip_best(const Instance& inst, const ArrivalOrder& o, std::size_t skip) {
  const auto s = inst.fixed_signals();
  for (std::size_t t = skip; t < inst.size(); ++t) {
    const auto obs = first_k(s, o, t + 1);
    const double vt = value_at(inst, o[t], obs);
    bool ok = true;
    for (std::size_t i = 0; i < t; ++i) ok = ok && vt > value_at(inst, o[i], obs);
    if (ok) return ref_outcome(inst, s, o, t);
  }
  return {};
}

// Sample-then-compare on additive valuations, with the payment in closed form:
// the winner's estimate is linear in its own signal.
Outcome ref_mech4_additive(const Instance& inst, const std::vector<std::vector<double>>& w,
                           const ArrivalOrder& o) {
  const std::size_t n = inst.size();
  const auto s = inst.fixed_signals();
  const std::size_t t0 = n / 2, t1 = t0 + static_cast<std::size_t>(n / (2 * std::exp(1.0)));
  const auto sample = first_k(s, o, t0);
  auto rest = [&](std::size_t agent) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += j == agent ? 0.0 : w[agent][j] * sample[j];
    return r;
  };
  auto est = [&](std::size_t t) { return rest(o[t]) + w[o[t]][o[t]] * s[o[t]]; };
  for (std::size_t t = t1; t < n; ++t) {
    bool ok = true;
    double bar = -1.0;
    for (std::size_t i = t0; i < t; ++i) {
      ok = ok && est(t) > est(i);
      bar = std::max(bar, est(i));
    }
    if (!ok) continue;
    Outcome out = ref_outcome(inst, s, o, t);
    const std::size_t a = o[t];
    const double crit = bar < 0 ? 0.0 : std::max(0.0, (bar - rest(a)) / w[a][a]);
    std::vector<double> ctx = inst.temporality() == Temporality::farsighted
                                  ? std::vector<double>(s.values().begin(), s.values().end())
                                  : first_k(s, o, t);
    ctx[a] = crit;
    out.payment = value_at(inst, a, ctx);
    return out;
  }
  return {};
}

void expect_outcome_near(const Outcome& a, const Outcome& b, double tol = 0.0) {
  EXPECT_EQ(a.stopping_time, b.stopping_time);
  EXPECT_EQ(a.winner, b.winner);
  EXPECT_NEAR(a.myopic_welfare, b.myopic_welfare, tol);
  EXPECT_NEAR(a.farsighted_welfare, b.farsighted_welfare, tol);
  EXPECT_NEAR(a.payment, b.payment, tol + 1e-12);
  EXPECT_EQ(a.coin, b.coin);
}

void expect_type_invariants(const Outcome& o) {
  EXPECT_EQ(o.winner.has_value(), o.stopping_time.has_value());
  if (!o.stopped()) {
    EXPECT_EQ(o.myopic_welfare, 0.0);
    EXPECT_EQ(o.farsighted_welfare, 0.0);
    EXPECT_EQ(o.payment, 0.0);
  }
  EXPECT_GE(o.farsighted_welfare, o.myopic_welfare - 1e-12);
}

Instance additive_secretary(std::size_t n, RandomSource& src, Temporality temp,
                            std::vector<std::vector<double>>& weights) {
  std::vector<Agent> agents;
  weights.clear();
  for (std::size_t i = 0; i < n; ++i) {
    weights.push_back(interdependent_weights(n, i, src));
    agents.push_back({ValuationFunction::additive(weights.back()),
                      SignalDistribution::point_mass(static_cast<double>(src.uniform_index(9)) / 2)});
  }
  return {std::move(agents), ArrivalModel::secretary, temp};
}

}  // namespace

TEST(SkipHorizons, Arithmetic) {
  EXPECT_EQ(algo3_skip(1), 0u);
  EXPECT_EQ(algo3_skip(3), 1u);
  EXPECT_EQ(algo3_skip(10), 3u);
  EXPECT_EQ(algo5_skip(2), 1u);
  EXPECT_EQ(algo5_skip(7), 3u);
  EXPECT_EQ(mech4_sample_size(4), 2u);
  EXPECT_EQ(mech4_skip(4), 2u);  // candidates are 1-based times 3 and 4
  EXPECT_EQ(mech4_skip(11), 5u + 2u);
}

TEST(Threshold, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(Threshold{-1}, InvalidInput);
  EXPECT_THROW(Threshold{std::nan("")}, InvalidInput);
  EXPECT_THROW(Threshold{HUGE_VAL * 2}, InvalidInput);
}

TEST(Algo1, OwnSignalBelowThresholdNeverStops) {
  std::vector<Agent> agents;
  for (std::size_t i = 0; i < 3; ++i) {
    agents.push_back({ValuationFunction::own_signal(i, 3), SignalDistribution::uniform(0, 1)});
  }
  const Instance inst(agents, ArrivalModel::prophet, Temporality::myopic);
  const auto out = prophet_algo1(inst, Threshold(2), SignalProfile{0.5, 0.9, 0.1});
  EXPECT_FALSE(out.stopped());
  expect_type_invariants(out);
}

TEST(Algo1, CounterexampleHighBranchWaitsForLastAgent) {
  const std::size_t n = 6;
  const double eps = 0.1;
  const auto inst = threshold_counterexample_instance(n, eps);
  SignalProfile high = SignalProfile::zeros(n).with(0, 1 / eps);
  std::vector<TraceStep> steps;
  const auto out = prophet_algo1(inst, Threshold(1), high, [&](const TraceStep& s) { steps.push_back(s); });
  EXPECT_EQ(out.winner, n - 1);
  EXPECT_DOUBLE_EQ(out.myopic_welfare, n / eps);
  ASSERT_EQ(steps.size(), n);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    EXPECT_FALSE(steps[t].stop);
    EXPECT_GT(steps[t].future_values.back(), steps[t].arrived_values.back());
  }
}

TEST(Algo1, RejectsWrongModel) {
  EXPECT_THROW(prophet_algo1(thm31_instance(3), Threshold(1), SignalProfile{0, 0, 0}), InvalidInput);
  EXPECT_THROW(prophet_algo1(own_signal_secretary({1, 2}), Threshold(1), SignalProfile{1, 2}),
               InvalidInput);
  EXPECT_THROW(prophet_algo1(prop32_instance(3), Threshold(1), SignalProfile{0, 0}), InvalidInput);
}

TEST(Algo1, MatchesReferenceAndNeverStopsBelowARival) {
  RandomSource src(21, streams::kSuite);
  for (const auto& inst : random_suite(5, SuiteFamily::subadditive, 20, src)) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto s = inst.draw_signals(src);
      const double x = src.uniform01() * 4;
      std::vector<TraceStep> steps;
      const auto out = prophet_algo1(inst, Threshold(x), s, [&](const TraceStep& st) { steps.push_back(st); });
      expect_outcome_near(out, ref_algo1(inst, x, s));
      expect_type_invariants(out);
      for (const auto& st : steps) {
        if (!st.stop) continue;
        for (double f : st.future_values) EXPECT_LE(f, st.arrived_values.back());
        EXPECT_GE(st.arrived_values.back(), x);
      }
    }
  }
}

TEST(Mech2, NoValueReachesThreshold) {
  const auto inst = prop32_instance(3);
  for (Coin c : {Coin::stop, Coin::wait}) {
    const auto out = prophet_mech2_branch(inst, Threshold(100), SignalProfile{2, 2, 2}, c);
    EXPECT_FALSE(out.stopped());
    EXPECT_EQ(out.coin, c);
  }
}

TEST(Mech2, StopBranchChargesX) {
  std::vector<Agent> agents;
  for (std::size_t i = 0; i < 3; ++i) {
    agents.push_back({ValuationFunction::own_signal(i, 3), SignalDistribution::finite({{0, 0.5}, {3, 0.5}})});
  }
  const Instance inst(agents, ArrivalModel::prophet, Temporality::myopic);
  const auto out = prophet_mech2_branch(inst, Threshold(1.5), SignalProfile{0, 3, 0}, Coin::stop);
  EXPECT_EQ(out.winner, 1u);
  EXPECT_EQ(out.payment, 1.5);
  const auto wait = prophet_mech2_branch(inst, Threshold(1.5), SignalProfile{0, 3, 0}, Coin::wait);
  EXPECT_EQ(wait.winner, 2u);  // only remaining agent, value 0
  EXPECT_EQ(wait.payment, 0.0);
  EXPECT_THROW(prophet_mech2_branch(inst, Threshold(1), SignalProfile{0, 0, 0}, Coin::none), InvalidInput);
}

TEST(Mech2, WaitBranchBreaksTiesTowardsLowestIndex) {
  std::vector<Agent> agents{{ValuationFunction::own_signal(0, 4), SignalDistribution::point_mass(1)}};
  for (int k = 0; k < 3; ++k) agents.push_back({ValuationFunction::additive({1, 0, 0, 0}), SignalDistribution::point_mass(0)});
  const Instance inst(agents, ArrivalModel::prophet, Temporality::myopic);
  EXPECT_EQ(prophet_mech2_branch(inst, Threshold(1), SignalProfile{1, 0, 0, 0}, Coin::wait).winner, 1u);
}

TEST(Mech2, MatchesReferenceAndBranchesDominate) {
  RandomSource src(22, streams::kSuite);
  for (const auto& inst : random_suite(4, SuiteFamily::subadditive, 20, src)) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto s = inst.draw_signals(src);
      const double x = src.uniform01() * 4;
      const auto stop = prophet_mech2_branch(inst, Threshold(x), s, Coin::stop);
      const auto wait = prophet_mech2_branch(inst, Threshold(x), s, Coin::wait);
      expect_outcome_near(stop, ref_mech2(inst, x, s, Coin::stop));
      expect_outcome_near(wait, ref_mech2(inst, x, s, Coin::wait));
      // v_T + 1[T < I] v_I(s_[T]) <= 2 * (average of the two branches)
      double lhs = stop.myopic_welfare;
      if (wait.stopped()) {
        lhs += inst.valuation(*wait.winner).evaluate(first_k(s, ArrivalOrder::identity(4), *stop.stopping_time + 1));
      }
      EXPECT_LE(lhs, stop.myopic_welfare + wait.myopic_welfare + 1e-12);
    }
  }
}

TEST(Mech2, SampledCoinIsFair) {
  const auto inst = prop32_instance(2);
  RandomSource coin(23, streams::kCoin);
  int stops = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    stops += prophet_mech2(inst, Threshold(0), SignalProfile{2, 2}, coin).coin == Coin::stop;
  }
  EXPECT_NEAR(stops / double(trials), 0.5, 4 * std::sqrt(0.25 / trials));
}

TEST(Naive, CounterexampleStopsAtFirstAgent) {
  const std::size_t n = 50;
  const double eps = 0.01;
  const auto inst = threshold_counterexample_instance(n, eps);
  const double x = (eps * (n / eps) + (1 - eps) * 1.0) / 2;  // E[OPT] / 2
  const auto high = SignalProfile::zeros(n).with(0, 1 / eps);
  const auto out = naive_threshold_baseline(inst, Threshold(x), high);
  EXPECT_EQ(out.winner, 0u);
  EXPECT_DOUBLE_EQ(out.myopic_welfare, 1 / eps + 1);
  EXPECT_EQ(prophet_algo1(inst, Threshold(x), high).winner, n - 1);
}

TEST(Naive, CoincidesWithAlgo1OnOwnSignalInstances) {
  RandomSource src(24, streams::kSuite);
  for (const auto& inst : random_suite(6, SuiteFamily::own_signal, 10, src)) {
    for (int rep = 0; rep < 30; ++rep) {
      const auto s = inst.draw_signals(src);
      const Threshold x(src.uniform01() * 4);
      const auto a = prophet_algo1(inst, x, s);
      expect_outcome_near(naive_threshold_baseline(inst, x, s), a);
      EXPECT_EQ(a.myopic_welfare, a.farsighted_welfare);
    }
  }
}

TEST(Naive, AllZeroInstanceNeverStops) {
  std::vector<Agent> agents(3, Agent{ValuationFunction::zero(3), SignalDistribution::point_mass(0)});
  const Instance inst(agents, ArrivalModel::prophet, Temporality::myopic);
  EXPECT_FALSE(naive_threshold_baseline(inst, Threshold(0.5), SignalProfile{0, 0, 0}).stopped());
}

TEST(Secretary, SingleAgentStopsAtOnce) {
  const auto out = secretary_algo3(own_signal_secretary({0}), ArrivalOrder::identity(1));
  EXPECT_EQ(out.stopping_time, 0u);
}

TEST(Secretary, Algo5WithTwoAgentsOnlyStopsSecond) {
  for (auto signals : {std::vector<double>{1, 2}, std::vector<double>{2, 1}}) {
    const auto out = secretary_algo5_submodular(own_signal_secretary(signals), ArrivalOrder::identity(2));
    if (signals[1] > signals[0]) {
      EXPECT_EQ(out.stopping_time, 1u);
    } else {
      EXPECT_FALSE(out.stopped());
    }
  }
}

TEST(Secretary, TiesAreRejected) {
  const auto inst = own_signal_secretary({1, 1, 1, 1});
  EXPECT_FALSE(secretary_algo3(inst, ArrivalOrder::identity(4)).stopped());
}

TEST(Secretary, RulesMatchReferenceAndRespectSkip) {
  RandomSource src(25, streams::kSuite);
  for (auto family : {SuiteFamily::subadditive, SuiteFamily::own_signal}) {
    for (const auto& inst : random_suite(7, family, 10, src, ArrivalModel::secretary)) {
      for (int rep = 0; rep < 30; ++rep) {
        const auto order = ArrivalOrder::random(7, src);
        const auto a3 = secretary_algo3(inst, order);
        expect_outcome_near(a3, ref_skip_best(inst, order, algo3_skip(7)));
        const auto a5 = secretary_algo5_submodular(inst, order, {SubmodularCheck::off, {}});
        expect_outcome_near(a5, ref_skip_best(inst, order, algo5_skip(7)));
        for (const auto& o : {a3, a5}) {
          expect_type_invariants(o);
          if (family == SuiteFamily::own_signal) EXPECT_EQ(o.myopic_welfare, o.farsighted_welfare);
        }
        if (a3.stopped()) EXPECT_GE(*a3.stopping_time, algo3_skip(7));
        if (a5.stopped()) EXPECT_GE(*a5.stopping_time, algo5_skip(7));
        EXPECT_EQ(secretary_algo3(inst, order), a3);  // deterministic
      }
    }
  }
}

TEST(Secretary, InvalidInput) {
  EXPECT_THROW(secretary_algo3(prop32_instance(3), ArrivalOrder::identity(3)), InvalidInput);
  EXPECT_THROW(secretary_algo3(own_signal_secretary({1, 2}), ArrivalOrder::identity(3)), InvalidInput);
  EXPECT_THROW(secretary_skip_best(own_signal_secretary({1, 2}), ArrivalOrder::identity(2), 3),
               InvalidInput);
}

TEST(Algo5, SubmodularityCheckEnforcedOrWarned) {
  std::vector<Agent> agents;
  for (std::size_t i = 0; i < 3; ++i) {
    agents.push_back({ValuationFunction::product({0, 1}, 3), SignalDistribution::point_mass(2)});
  }
  const Instance inst(agents, ArrivalModel::secretary, Temporality::myopic);
  const auto order = ArrivalOrder::identity(3);
  EXPECT_THROW(secretary_algo5_submodular(inst, order), PreconditionError);
  std::string warning;
  Algo5Options warn{SubmodularCheck::warn, [&](const std::string& w) { warning = w; }};
  EXPECT_NO_THROW(secretary_algo5_submodular(inst, order, warn));
  EXPECT_NE(warning.find("not submodular"), std::string::npos);
  EXPECT_TRUE(certify_submodular(own_signal_secretary({1, 2, 3})));
}

TEST(Mech4, TooFewAgents) {
  EXPECT_THROW(secretary_mech4(own_signal_secretary({1, 2, 3}), ArrivalOrder::identity(3)),
               DegenerateInstance);
}

TEST(Mech4, EmptyComparisonSetPaysValueAtZero) {
  // n = 4: the first post-sample arrival is already eligible.
  const auto inst = own_signal_secretary({5, 1, 2, 0});
  const auto out = secretary_mech4(inst, ArrivalOrder::identity(4));
  EXPECT_EQ(out.stopping_time, 2u);
  EXPECT_EQ(out.payment, 0.0);
}

TEST(Mech4, OwnSignalPaymentIsTheRivalEstimate) {
  const auto inst = own_signal_secretary({0, 0, 1, 3});
  const auto out = secretary_mech4(inst, ArrivalOrder({0, 1, 3, 2}));
  EXPECT_EQ(out.winner, 3u);
  const auto out2 = secretary_mech4(inst, ArrivalOrder({0, 1, 2, 3}));
  EXPECT_EQ(out2.winner, 2u);
  const auto inst6 = own_signal_secretary({0, 0, 0, 1, 3, 0});  // t0 = 3, t1 = 4
  const auto out3 = secretary_mech4(inst6, ArrivalOrder::identity(6));
  EXPECT_EQ(out3.winner, 4u);
  EXPECT_NEAR(out3.payment, 1.0, 2 * kCriticalSignalTolerance);
  EXPECT_GE(out3.payment, 1.0);
}

TEST(Mech4, AdditiveMatchesClosedFormPayment) {
  RandomSource src(26, streams::kSuite);
  for (auto temp : {Temporality::myopic, Temporality::farsighted}) {
    for (int rep = 0; rep < 40; ++rep) {
      std::vector<std::vector<double>> w;
      const std::size_t n = 4 + src.uniform_index(5);
      const auto inst = additive_secretary(n, src, temp, w);
      for (int k = 0; k < 10; ++k) {
        const auto order = ArrivalOrder::random(n, src);
        const auto out = secretary_mech4(inst, order);
        expect_outcome_near(out, ref_mech4_additive(inst, w, order), 4 * kCriticalSignalTolerance);
        expect_type_invariants(out);
        if (out.stopped()) {
          EXPECT_LE(out.payment, out.welfare(temp) + 1e-12);  // individual rationality
          EXPECT_GE(*out.stopping_time, mech4_skip(n));
        }
      }
    }
  }
}

TEST(FixedIndex, SelectsTheGivenArrival) {
  const auto inst = prop32_instance(3);
  const auto out = fixed_index_policy(inst, 1, SignalProfile{2, 2, 0}, ArrivalOrder::identity(3));
  EXPECT_EQ(out.winner, 1u);
  EXPECT_EQ(out.myopic_welfare, 4.0);
  EXPECT_THROW(fixed_index_policy(inst, 3, SignalProfile{2, 2, 0}, ArrivalOrder::identity(3)), InvalidInput);
}

TEST(CriticalSignal, FindsTheThreshold) {
  EXPECT_EQ(critical_signal([](double s) { return s >= 0; }), 0.0);
  EXPECT_FALSE(critical_signal([](double) { return false; }).has_value());
  const auto c = critical_signal([](double s) { return s >= 2.5; });
  ASSERT_TRUE(c);
  EXPECT_GE(*c, 2.5);
  EXPECT_LE(*c - 2.5, kCriticalSignalTolerance);
  const auto d = critical_signal([](double s) { return s > 1e6 / 3; });
  EXPECT_NEAR(*d, 1e6 / 3, 1e-6);
}

TEST(Policy, RunPolicyDispatchAndWeights) {
  const auto inst = prop32_instance(3);
  const SignalProfile s{2, 2, 2};
  Policy p{RuleId::mech2, Threshold(1), 0, SubmodularCheck::off};
  const auto both = run_policy(p, inst, s, ArrivalOrder::identity(3));
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0].weight + both[1].weight, 1.0);
  const auto e = expectation(both);
  EXPECT_DOUBLE_EQ(e.myopic_welfare, 0.5 * (2 + 4));  // wait: both rivals read 0 at T, tie goes to agent 1
  EXPECT_DOUBLE_EQ(e.payment, 0.5);
  EXPECT_THROW(run_policy(Policy{RuleId::algo1, std::nullopt, 0, SubmodularCheck::off}, inst, s,
                          ArrivalOrder::identity(3)),
               InvalidInput);
  EXPECT_THROW(run_policy(p, inst, s, ArrivalOrder::identity(3), CoinMode::sampled), InvalidInput);
  for (auto r : {RuleId::algo1, RuleId::mech2, RuleId::algo3, RuleId::mech4, RuleId::algo5,
                 RuleId::naive, RuleId::fixed}) {
    EXPECT_EQ(parse_rule(to_string(r)), r);
  }
}
