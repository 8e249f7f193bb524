#include "idv/mechanisms.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "idv/error.hpp"

namespace idv {

std::string_view to_string(PaymentRule p) {
  switch (p) {
    case PaymentRule::none: return "none";
    case PaymentRule::critical_farsighted: return "critical_farsighted";
    case PaymentRule::critical_myopic: return "critical_myopic";
    case PaymentRule::posted_price_x: return "posted_price_x";
    case PaymentRule::corollary33: return "corollary33";
    case PaymentRule::corollary43_farsighted: return "corollary43_farsighted";
    case PaymentRule::corollary43_myopic: return "corollary43_myopic";
  }
  return "?";
}

PaymentRule parse_payment_rule(std::string_view s) {
  for (auto p : {PaymentRule::none, PaymentRule::critical_farsighted, PaymentRule::critical_myopic,
                 PaymentRule::posted_price_x, PaymentRule::corollary33,
                 PaymentRule::corollary43_farsighted, PaymentRule::corollary43_myopic}) {
    if (to_string(p) == s) return p;
  }
  throw InvalidInput("unknown payment rule: " + std::string(s));
}

bool is_prompt(PaymentRule p) {
  return p == PaymentRule::critical_myopic || p == PaymentRule::corollary33 ||
         p == PaymentRule::corollary43_myopic || p == PaymentRule::posted_price_x;
}

namespace {

bool is_critical(PaymentRule p) {
  return p != PaymentRule::none && p != PaymentRule::posted_price_x;
}

// Signals the payment may read: the whole profile for tardy kinds, the
// arrivals strictly before the winner for prompt kinds.
std::vector<double> payment_context(const SignalProfile& s, const ArrivalOrder& order,
                                    std::size_t winner, PaymentRule kind) {
  std::vector<double> ctx(s.values().begin(), s.values().end());
  if (is_prompt(kind)) {
    const std::size_t t = order.time_of(winner);
    std::fill(ctx.begin(), ctx.end(), 0.0);
    for (std::size_t k = 0; k < t; ++k) ctx[order[k]] = s[order[k]];
  }
  return ctx;
}

double true_value(const Instance& inst, const SignalProfile& truth, const ArrivalOrder& order,
                  std::size_t agent) {
  if (inst.temporality() == Temporality::farsighted) return inst.valuation(agent)(truth);
  std::vector<double> prefix(truth.size(), 0.0);
  const std::size_t t = order.time_of(agent);
  for (std::size_t k = 0; k <= t; ++k) prefix[order[k]] = truth[order[k]];
  return inst.valuation(agent).evaluate(prefix);
}

double utility(const std::vector<WeightedOutcome>& outcomes, const Instance& inst,
               const SignalProfile& truth, const ArrivalOrder& order, std::size_t agent) {
  double u = 0.0;
  for (const auto& w : outcomes) {
    if (w.outcome.winner != agent) continue;
    u += w.weight * (true_value(inst, truth, order, agent) - w.outcome.payment);
  }
  return u;
}

double allocation(const std::vector<WeightedOutcome>& outcomes, std::size_t agent) {
  double x = 0.0;
  for (const auto& w : outcomes) {
    if (w.outcome.winner == agent) x += w.weight;
  }
  return x;
}

ArrivalOrder order_for(const Policy& policy, std::size_t n, const ArrivalOrder& order) {
  return is_prophet_rule(policy.rule) ? ArrivalOrder::identity(n) : order;
}

}  // namespace

std::string Mechanism::name() const {
  return policy.name() + "+" + std::string(to_string(payment));
}

double critical_payment(const WinsFn& wins, const Instance& inst, const SignalProfile& realized,
                        std::size_t winner, const ArrivalOrder& order, PaymentRule kind,
                        std::optional<Threshold> threshold, const CriticalOptions& options) {
  if (winner >= inst.size() || realized.size() != inst.size()) {
    throw InvalidInput("critical_payment: winner or profile out of range");
  }
  if (kind == PaymentRule::none) return 0.0;
  if (kind == PaymentRule::posted_price_x || kind == PaymentRule::corollary33) {
    if (!threshold) throw InvalidInput("critical_payment: this payment rule needs a threshold");
    if (kind == PaymentRule::posted_price_x) return threshold->value();
  }

  double lowest_win = std::numeric_limits<double>::infinity();
  double highest_loss = -1.0;
  auto probe = [&](double s) {
    const bool w = wins(s);
    if (w) lowest_win = std::min(lowest_win, s);
    else highest_loss = std::max(highest_loss, s);
    return w;
  };

  const double own = realized[winner];
  if (!probe(own)) throw PreconditionError("critical_payment: winner does not win at its report");
  for (double p : options.probes) probe(p);

  double critical = own;
  if (options.grid) {
    for (double g : *options.grid) {
      if (probe(g)) critical = std::min(critical, g);
    }
  } else if (auto c = critical_signal(probe)) {
    critical = std::min(critical, *c);
  }
  critical = std::min(critical, lowest_win);
  if (highest_loss > lowest_win) {
    if (options.strict) {
      throw MonotonicityViolation("critical_payment: agent " + std::to_string(winner) +
                                  " wins at signal " + std::to_string(lowest_win) +
                                  " but loses at " + std::to_string(highest_loss));
    }
  }

  auto ctx = payment_context(realized, order, winner, kind);
  ctx[winner] = critical;
  double pay = inst.valuation(winner).evaluate(ctx);
  if (kind == PaymentRule::corollary33) pay = std::max(pay, threshold->value());
  return pay;
}

std::vector<WeightedOutcome> run_mechanism(const Mechanism& mech, const Instance& inst,
                                           const SignalProfile& reported,
                                           const ArrivalOrder& order,
                                           const CriticalOptions& options) {
  auto outcomes = run_policy(mech.policy, inst, reported, order, CoinMode::exact);
  apply_payments(mech, inst, reported, order, outcomes, options);
  return outcomes;
}

void apply_payments(const Mechanism& mech, const Instance& inst, const SignalProfile& reported,
                    const ArrivalOrder& order, std::vector<WeightedOutcome>& outcomes,
                    const CriticalOptions& options) {
  if (is_critical(mech.payment) && mech.policy.rule == RuleId::mech2) {
    throw Unsupported("run_mechanism: critical payments need a deterministic rule");
  }
  const auto eff_order = order_for(mech.policy, inst.size(), order);
  for (auto& w : outcomes) {
    Outcome& o = w.outcome;
    if (!o.winner) {
      o.payment = 0.0;
      continue;
    }
    const std::size_t i = *o.winner;
    switch (mech.payment) {
      case PaymentRule::none: o.payment = 0.0; break;
      case PaymentRule::posted_price_x:
        // The wait branch is free of charge.
        if (!mech.policy.threshold) throw InvalidInput("run_mechanism: posted price needs X");
        o.payment = o.coin == Coin::wait ? 0.0 : mech.policy.threshold->value();
        break;
      default: {
        auto wins = [&](double s) {
          const auto res = run_policy(mech.policy, inst, reported.with(i, s), order);
          return res.front().outcome.winner == i;
        };
        o.payment = critical_payment(wins, inst, reported, i, eff_order, mech.payment,
                                     mech.policy.threshold, options);
      }
    }
  }
}

std::vector<ArrivalOrder> all_orders(std::size_t n) {
  if (n > kMaxEnumeratedOrderArity) {
    throw CapacityError("all_orders: n = " + std::to_string(n) + " exceeds " +
                        std::to_string(kMaxEnumeratedOrderArity));
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<ArrivalOrder> out;
  do {
    out.emplace_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

namespace {

struct Scenario {
  SignalProfile truth;
  ArrivalOrder order;
};

std::vector<Scenario> epic_scenarios(const Instance& inst) {
  std::vector<Scenario> out;
  const std::size_t n = inst.size();
  if (inst.is_secretary()) {
    const auto s = inst.fixed_signals();
    for (auto& o : all_orders(n)) out.push_back({s, std::move(o)});
    return out;
  }
  if (!inst.all_supports_finite()) {
    throw Unsupported("epic_check: every signal support must be finite");
  }
  std::vector<std::vector<double>> axes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto atoms = inst.agent(i).signal.enumerate_support();
    for (const auto& a : *atoms) axes[i].push_back(a.value);
  }
  const SignalGrid support(std::move(axes));
  if (support.point_count() > 10'000'000) throw CapacityError("epic_check: support too large");
  const auto id = ArrivalOrder::identity(n);
  support.for_each_point([&](const auto&, const SignalProfile& s) { out.push_back({s, id}); });
  return out;
}

SignalGrid default_reporting_grid(const Instance& inst) {
  std::vector<double> axis{0.0};
  for (const auto& agent : inst.agents()) {
    if (auto atoms = agent.signal.enumerate_support()) {
      for (const auto& a : *atoms) axis.push_back(a.value);
    }
  }
  return SignalGrid::uniform(inst.size(), axis);
}

}  // namespace

EpicReport epic_check(const Mechanism& mech, const Instance& inst, const EpicOptions& options) {
  EpicReport report;
  report.mechanism = mech.name();
  report.instance_hash = instance_hash(inst);
  const std::size_t n = inst.size();
  const auto scenarios = epic_scenarios(inst);
  const SignalGrid grid = options.reporting_grid.value_or(default_reporting_grid(inst));
  if (grid.arity() != n) throw InvalidInput("epic_check: reporting grid arity mismatch");

  CriticalOptions crit;
  crit.strict = false;
  report.min_truthful_utility = std::numeric_limits<double>::infinity();

  // Truthful outcomes per scenario, shared by every agent.
  std::vector<std::vector<WeightedOutcome>> truthful;
  truthful.reserve(scenarios.size());
  for (const auto& sc : scenarios) truthful.push_back(run_mechanism(mech, inst, sc.truth, sc.order, crit));

  for (std::size_t i = 0; i < n; ++i) {
    crit.probes = grid.axis(i);
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
      const auto& sc = scenarios[k];
      const auto eff_order = order_for(mech.policy, n, sc.order);
      const double u_truth = utility(truthful[k], inst, sc.truth, eff_order, i);
      report.min_truthful_utility = std::min(report.min_truthful_utility, u_truth);

      std::vector<double> reports = grid.axis(i);
      if (options.refine) {
        auto gets_item = [&](double s) {
          return allocation(run_mechanism(mech, inst, sc.truth.with(i, s), sc.order, crit), i) > 0;
        };
        if (auto c = critical_signal(gets_item)) {
          for (double d : {-1e-7, 1e-7}) {
            if (*c + d >= 0.0) reports.push_back(*c + d);
          }
        }
      }
      for (double r : reports) {
        if (r == sc.truth[i]) continue;
        ++report.triples;
        const auto dev = run_mechanism(mech, inst, sc.truth.with(i, r), sc.order, crit);
        const double u_dev = utility(dev, inst, sc.truth, eff_order, i);
        if (u_dev - u_truth > kEpicTolerance) {
          report.passed = false;
          report.witness = DeviationReport{i,
                                           sc.truth[i],
                                           r,
                                           u_truth,
                                           u_dev,
                                           u_dev - u_truth,
                                           sc.truth,
                                           eff_order.agents()};
          return report;
        }
      }
    }
  }
  if (scenarios.empty()) report.min_truthful_utility = 0.0;
  return report;
}

Json to_json(const EpicReport& report) {
  Json j{{"mechanism", report.mechanism},
         {"instance_hash", report.instance_hash},
         {"triples", report.triples},
         {"result", report.passed ? "pass" : "fail"},
         {"min_truthful_utility", report.min_truthful_utility}};
  if (report.witness) {
    const auto& w = *report.witness;
    std::vector<double> profile(w.true_profile.values().begin(), w.true_profile.values().end());
    j["witness"] = {{"agent", w.agent},
                    {"true_signal", w.true_signal},
                    {"reported_signal", w.reported_signal},
                    {"utility_truth", w.utility_truth},
                    {"utility_deviation", w.utility_deviation},
                    {"gap", w.gap},
                    {"profile", profile},
                    {"order", w.order}};
  }
  return j;
}

CheckResult<AllocationWitness> allocation_monotonicity_check(const Policy& policy,
                                                             const Instance& inst,
                                                             std::size_t agent,
                                                             const SignalGrid& grid) {
  const std::size_t n = inst.size();
  if (agent >= n) throw InvalidInput("allocation_monotonicity_check: agent out of range");
  if (grid.arity() != n) throw InvalidInput("allocation_monotonicity_check: grid arity mismatch");
  CheckResult<AllocationWitness> result;
  result.passed = true;
  if (grid.empty()) return result;

  const auto orders = is_prophet_rule(policy.rule) ? std::vector<ArrivalOrder>{ArrivalOrder::identity(n)}
                                                   : all_orders(n);
  const auto& axis = grid.axis(agent);
  // Contexts: grid points whose own coordinate sits at the axis start.
  std::vector<std::vector<double>> ctx_axes = grid.axes();
  ctx_axes[agent] = {axis.front()};
  const SignalGrid contexts(std::move(ctx_axes));

  contexts.for_each_point([&](const auto&, const SignalProfile& ctx) {
    if (!result.passed) return;
    for (const auto& order : orders) {
      double prev = -1.0;
      double prev_signal = 0.0;
      for (double s : axis) {
        const auto profile = ctx.with(agent, s);
        const double x = allocation(run_policy(policy, inst, profile, order), agent);
        ++result.comparisons;
        if (prev > x + kValueTolerance) {
          result.passed = false;
          result.witness = AllocationWitness{ctx.with(agent, prev_signal), order.agents(),
                                             prev_signal, s, prev, x};
          return;
        }
        prev = x;
        prev_signal = s;
      }
    }
  });
  return result;
}

}  // namespace idv
