#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idv/instance.hpp"
#include "idv/policy.hpp"
#include "idv/property_checks.hpp"
#include "idv/rules.hpp"
#include "idv/serialization.hpp"

namespace idv {

/// How the selected agent is charged.
///
/// critical_*: the infimum value at which the winner still wins, with the
///   other reports fixed (tardy/farsighted reads the full profile, prompt/
///   myopic only signals that arrived before the winner).
/// posted_price_x: the randomised mechanism's own charge (X or 0).
/// corollary33: max(X, critical_myopic) for the look-ahead threshold rule.
/// corollary43_*: critical value for the sample-then-compare mechanism.
enum class PaymentRule {
  none,
  critical_farsighted,
  critical_myopic,
  posted_price_x,
  corollary33,
  corollary43_farsighted,
  corollary43_myopic,
};

std::string_view to_string(PaymentRule p);
PaymentRule parse_payment_rule(std::string_view s);
bool is_prompt(PaymentRule p);

struct Mechanism {
  Policy policy;
  PaymentRule payment = PaymentRule::none;

  std::string name() const;
};

/// Does the winner still win when it reports `own_signal` (others fixed)?
using WinsFn = std::function<bool(double own_signal)>;

struct CriticalOptions {
  /// Throw MonotonicityViolation when a probe shows the winner losing above a
  /// signal at which it wins. When false, the search brackets the lowest
  /// winning probe and reports the infimum over that window.
  bool strict = true;
  /// When set, the infimum is taken over these signal values only.
  std::optional<std::vector<double>> grid;
  /// Extra signals probed for the monotonicity test (never for bracketing).
  std::vector<double> probes;
};

/// Infimum over winning reports s' of the winner's value, with the value read
/// per the payment kind. corollary33 also takes the max with `threshold`.
double critical_payment(const WinsFn& wins, const Instance& inst, const SignalProfile& realized,
                        std::size_t winner, const ArrivalOrder& order, PaymentRule kind,
                        std::optional<Threshold> threshold = std::nullopt,
                        const CriticalOptions& options = {});

/// Replace the payments of `outcomes` (a run of mech.policy on `reported`)
/// with the mechanism's payment rule.
void apply_payments(const Mechanism& mech, const Instance& inst, const SignalProfile& reported,
                    const ArrivalOrder& order, std::vector<WeightedOutcome>& outcomes,
                    const CriticalOptions& options = {});

/// Run the mechanism on reported signals (exact coin averaging) and apply its
/// payment rule to every outcome.
std::vector<WeightedOutcome> run_mechanism(const Mechanism& mech, const Instance& inst,
                                           const SignalProfile& reported,
                                           const ArrivalOrder& order,
                                           const CriticalOptions& options = {});

struct DeviationReport {
  std::size_t agent = 0;
  double true_signal = 0.0;
  double reported_signal = 0.0;
  double utility_truth = 0.0;
  double utility_deviation = 0.0;
  double gap = 0.0;  // utility_deviation - utility_truth
  SignalProfile true_profile;
  std::vector<std::size_t> order;
};

struct EpicReport {
  std::string mechanism;
  std::string instance_hash;
  std::size_t triples = 0;
  bool passed = true;
  std::optional<DeviationReport> witness;
  /// Lowest truthful utility seen across profiles (ex-post IR check).
  double min_truthful_utility = 0.0;
};

inline constexpr double kEpicTolerance = 1e-9;
inline constexpr std::size_t kMaxEnumeratedOrderArity = 8;

struct EpicOptions {
  /// Reports tried per agent. Default: union of all supports plus {0}.
  std::optional<SignalGrid> reporting_grid;
  /// Also try reports just below and above each critical signal.
  bool refine = false;
};

/// Exhaustive ex-post IC check. Prophet: every true profile in the support
/// product. Secretary: the fixed profile under every arrival order (n <= 8).
/// Opponents' signals stay at their true values; the only expectation taken
/// is over the posted-price mechanism's coin. Returns the lexicographically
/// first violation (agent, profile, order, report).
EpicReport epic_check(const Mechanism& mech, const Instance& inst, const EpicOptions& options = {});

Json to_json(const EpicReport& report);

struct AllocationWitness {
  SignalProfile context;  // agent's own coordinate holds the lower report
  std::vector<std::size_t> order;
  double lower_signal = 0.0;
  double upper_signal = 0.0;
  double allocation_lower = 0.0;
  double allocation_upper = 0.0;
};

/// Sweep `agent`'s report along its grid axis for every context of the other
/// coordinates (and every arrival order for secretary rules) and require the
/// allocation probability to be non-decreasing.
CheckResult<AllocationWitness> allocation_monotonicity_check(const Policy& policy,
                                                             const Instance& inst,
                                                             std::size_t agent,
                                                             const SignalGrid& grid);

/// Every arrival order of n agents in lexicographic order; n <= 8.
std::vector<ArrivalOrder> all_orders(std::size_t n);

}  // namespace idv
