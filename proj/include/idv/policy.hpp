#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idv/instance.hpp"
#include "idv/rules.hpp"

namespace idv {

class RandomSource;

/// The stopping rules by name, for configs, oracles and mechanisms.
enum class RuleId { algo1, mech2, algo3, mech4, algo5, naive, fixed };

std::string_view to_string(RuleId r);
RuleId parse_rule(std::string_view s);

bool is_prophet_rule(RuleId r);
/// Rules that read the threshold X.
bool needs_threshold(RuleId r);

/// A rule plus its parameters, runnable on any compatible instance.
struct Policy {
  RuleId rule = RuleId::algo1;
  std::optional<Threshold> threshold;
  std::size_t fixed_index = 0;  // arrival time for RuleId::fixed
  /// Campaigns certify submodularity once up front and switch the per-call
  /// check off.
  SubmodularCheck algo5_check = SubmodularCheck::off;

  std::string name() const;
};

/// exact: evaluate both coin branches of the posted-price mechanism with
/// weight 1/2 each. sampled: draw the coin from the supplied stream.
enum class CoinMode { exact, sampled };

struct WeightedOutcome {
  double weight = 1.0;
  Outcome outcome;
};

/// Run a policy on one realisation. Prophet rules ignore `order` (arrival is
/// list order). Secretary rules use `signals` as the fixed signals. The
/// weights of the returned outcomes sum to one.
std::vector<WeightedOutcome> run_policy(const Policy& policy, const Instance& inst,
                                        const SignalProfile& signals, const ArrivalOrder& order,
                                        CoinMode mode = CoinMode::exact,
                                        RandomSource* coin_src = nullptr,
                                        const TraceSink& trace = {});

/// Probability-weighted average of the outcomes' welfare and payment.
struct ExpectedOutcome {
  double myopic_welfare = 0.0;
  double farsighted_welfare = 0.0;
  double payment = 0.0;
};
ExpectedOutcome expectation(const std::vector<WeightedOutcome>& outcomes);

}  // namespace idv
