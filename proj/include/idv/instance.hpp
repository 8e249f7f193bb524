#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "idv/distribution.hpp"
#include "idv/signals.hpp"
#include "idv/valuation.hpp"

namespace idv {

class RandomSource;

/// prophet: the list order is the (adversarial) arrival order and signals are
/// drawn from independent priors. secretary: signals are fixed and the order
/// is a uniformly random permutation per trial.
enum class ArrivalModel { prophet, secretary };

/// Whether the selected agent is paid value on the signals seen up to its
/// arrival (myopic) or on the full profile (farsighted).
enum class Temporality { myopic, farsighted };

std::string_view to_string(ArrivalModel m);
std::string_view to_string(Temporality t);
ArrivalModel parse_arrival_model(std::string_view s);
Temporality parse_temporality(std::string_view s);

struct Agent {
  ValuationFunction valuation;
  /// Prior in the prophet model; a PointMass holding the fixed signal in the
  /// secretary model.
  SignalDistribution signal;
};

class Instance {
 public:
  Instance(std::vector<Agent> agents, ArrivalModel model, Temporality temporality);

  std::size_t size() const { return agents_.size(); }
  const Agent& agent(std::size_t i) const { return agents_[i]; }
  const std::vector<Agent>& agents() const { return agents_; }
  const ValuationFunction& valuation(std::size_t i) const { return agents_[i].valuation; }
  std::vector<ValuationFunction> valuations() const;

  ArrivalModel model() const { return model_; }
  Temporality temporality() const { return temporality_; }
  bool is_prophet() const { return model_ == ArrivalModel::prophet; }
  bool is_secretary() const { return model_ == ArrivalModel::secretary; }

  /// Secretary only: the fixed signal profile.
  SignalProfile fixed_signals() const;

  /// One independent draw from every agent's prior.
  SignalProfile draw_signals(RandomSource& src) const;

  bool all_supports_finite() const;

  /// True when every agent's value reads only its own signal.
  bool own_signal_values() const { return own_signal_values_; }

  /// Copies with one attribute replaced.
  Instance with_temporality(Temporality t) const;
  Instance with_signals(const SignalProfile& fixed) const;  // secretary, fixed signals

 private:
  std::vector<Agent> agents_;
  ArrivalModel model_;
  Temporality temporality_;
  bool own_signal_values_ = true;
};

/// order[t] is the agent arriving at (0-based) time t.
class ArrivalOrder {
 public:
  explicit ArrivalOrder(std::vector<std::size_t> order);

  static ArrivalOrder identity(std::size_t n);
  static ArrivalOrder random(std::size_t n, RandomSource& src);

  std::size_t size() const { return order_.size(); }
  std::size_t operator[](std::size_t t) const { return order_[t]; }
  std::size_t time_of(std::size_t agent) const { return time_of_[agent]; }
  const std::vector<std::size_t>& agents() const { return order_; }

  bool operator==(const ArrivalOrder& other) const { return order_ == other.order_; }

 private:
  std::vector<std::size_t> order_;
  std::vector<std::size_t> time_of_;
};

// ---- named constructions -------------------------------------------------

/// Farsighted prophet instance whose last signal is Uniform(0,1); agent i
/// (0-based) values 2^(i+1) * 1[s_last >= 1 - 2^-(i+1)]. n >= 2.
Instance thm31_instance(std::size_t n);

/// Myopic prophet instance with i.i.d. signals uniform on {0, 2}; agent i
/// values the product of signals 0..i. n >= 2.
Instance prop32_instance(std::size_t n);

/// Myopic prophet instance that defeats the plain half-of-optimum threshold:
/// s_0 = 1/eps with probability eps (else 0), agents 0..n-2 value s_0 + 1 and
/// the last agent values n * s_0.
Instance threshold_counterexample_instance(std::size_t n, double eps);

/// Secretary instance with OwnSignalOnly valuations and the given signals.
Instance own_signal_secretary(const std::vector<double>& signals,
                              Temporality temporality = Temporality::myopic);

enum class SuiteFamily { subadditive, submodular, own_signal };

std::string_view to_string(SuiteFamily f);
SuiteFamily parse_suite_family(std::string_view s);

/// Random benchmark instances with FiniteSupport priors. In the secretary
/// model each instance's fixed signals are one draw from those priors.
/// Instances with n > kSuiteExactArity are only usable by Monte Carlo.
std::vector<Instance> random_suite(std::size_t n, SuiteFamily family, std::size_t count,
                                   RandomSource& src,
                                   ArrivalModel model = ArrivalModel::prophet);

inline constexpr std::size_t kSuiteExactArity = 12;

/// Suite prior: 2 or 3 distinct atoms from {0, 0.5, ..., 4}.
SignalDistribution random_prior(RandomSource& src);
/// Own coordinate weighted in [1, 2]; each other coordinate present with
/// probability 1/2 and weighted in [1/8, 1]. Multiples of 1/8.
std::vector<double> interdependent_weights(std::size_t n, std::size_t own, RandomSource& src);

/// Append `extra` zero-valued agents with zero signals (secretary only).
Instance pad_with_dummies(const Instance& inst, std::size_t extra);

/// Per-coordinate checking grid: the finite support of each prior plus 0,
/// or `quantiles` evenly spaced quantiles plus 0 for continuous priors.
SignalGrid default_check_grid(const Instance& inst, std::size_t quantiles = 4);

}  // namespace idv
