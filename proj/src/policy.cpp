#include "idv/policy.hpp"

#include "idv/error.hpp"
#include "idv/random.hpp"

namespace idv {

std::string_view to_string(RuleId r) {
  switch (r) {
    case RuleId::algo1: return "algo1";
    case RuleId::mech2: return "mech2";
    case RuleId::algo3: return "algo3";
    case RuleId::mech4: return "mech4";
    case RuleId::algo5: return "algo5";
    case RuleId::naive: return "naive";
    case RuleId::fixed: return "fixed";
  }
  return "?";
}

RuleId parse_rule(std::string_view s) {
  for (RuleId r : {RuleId::algo1, RuleId::mech2, RuleId::algo3, RuleId::mech4, RuleId::algo5,
                   RuleId::naive, RuleId::fixed}) {
    if (s == to_string(r)) return r;
  }
  throw InvalidInput("unknown rule '" + std::string(s) + "'");
}

bool is_prophet_rule(RuleId r) {
  return r == RuleId::algo1 || r == RuleId::mech2 || r == RuleId::naive;
}

bool needs_threshold(RuleId r) { return is_prophet_rule(r); }

std::string Policy::name() const {
  std::string out(to_string(rule));
  if (rule == RuleId::fixed) out += "@" + std::to_string(fixed_index);
  return out;
}

std::vector<WeightedOutcome> run_policy(const Policy& policy, const Instance& inst,
                                        const SignalProfile& signals, const ArrivalOrder& order,
                                        CoinMode mode, RandomSource* coin_src,
                                        const TraceSink& trace) {
  auto threshold = [&] {
    if (!policy.threshold) {
      throw InvalidInput("rule " + std::string(to_string(policy.rule)) + " needs a threshold");
    }
    return *policy.threshold;
  };
  std::optional<Instance> replaced;
  auto secretary_view = [&]() -> const Instance& {
    if (!inst.is_secretary()) {
      throw InvalidInput("rule " + std::string(to_string(policy.rule)) +
                         " requires a secretary instance");
    }
    if (inst.fixed_signals() == signals) return inst;
    replaced.emplace(inst.with_signals(signals));
    return *replaced;
  };

  switch (policy.rule) {
    case RuleId::algo1: return {{1.0, prophet_algo1(inst, threshold(), signals, trace)}};
    case RuleId::naive: return {{1.0, naive_threshold_baseline(inst, threshold(), signals, trace)}};
    case RuleId::mech2:
      if (mode == CoinMode::exact) {
        return {{0.5, prophet_mech2_branch(inst, threshold(), signals, Coin::stop, trace)},
                {0.5, prophet_mech2_branch(inst, threshold(), signals, Coin::wait, trace)}};
      }
      if (!coin_src) throw InvalidInput("run_policy: sampled coin mode needs a coin stream");
      return {{1.0, prophet_mech2(inst, threshold(), signals, *coin_src, trace)}};
    case RuleId::algo3: return {{1.0, secretary_algo3(secretary_view(), order, trace)}};
    case RuleId::mech4: return {{1.0, secretary_mech4(secretary_view(), order, trace)}};
    case RuleId::algo5: {
      Algo5Options options;
      options.check = policy.algo5_check;
      return {{1.0, secretary_algo5_submodular(secretary_view(), order, options, trace)}};
    }
    case RuleId::fixed: {
      const auto used = inst.is_prophet() ? ArrivalOrder::identity(inst.size()) : order;
      return {{1.0, fixed_index_policy(inst, policy.fixed_index, signals, used)}};
    }
  }
  throw InvalidInput("run_policy: unknown rule");
}

ExpectedOutcome expectation(const std::vector<WeightedOutcome>& outcomes) {
  ExpectedOutcome e;
  for (const auto& [w, o] : outcomes) {
    e.myopic_welfare += w * o.myopic_welfare;
    e.farsighted_welfare += w * o.farsighted_welfare;
    e.payment += w * o.payment;
  }
  return e;
}

}  // namespace idv
