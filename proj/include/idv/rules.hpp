#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idv/instance.hpp"
#include "idv/signals.hpp"

namespace idv {

class RandomSource;

/// Internal randomisation of the posted-price mechanism: which branch ran.
enum class Coin { none, stop, wait };

std::string_view to_string(Coin c);

struct Outcome {
  std::optional<std::size_t> stopping_time;  // 0-based arrival time
  std::optional<std::size_t> winner;         // agent id in the instance
  double myopic_welfare = 0.0;
  double farsighted_welfare = 0.0;
  double payment = 0.0;
  Coin coin = Coin::none;

  bool stopped() const { return winner.has_value(); }
  /// Welfare the given temporality pays against.
  double welfare(Temporality t) const {
    return t == Temporality::myopic ? myopic_welfare : farsighted_welfare;
  }

  bool operator==(const Outcome&) const = default;
};

/// The X of the threshold rules: half the expected myopic optimum.
class Threshold {
 public:
  explicit Threshold(double value);
  double value() const { return value_; }

 private:
  double value_;
};

/// One line of a rule trace. Time is 0-based here and 1-based in JSON.
struct TraceStep {
  std::size_t t = 0;
  std::size_t agent = 0;
  double observed_signal = 0.0;
  std::vector<double> arrived_values;  // myopic values of agents arrived so far
  std::vector<double> future_values;   // prophet rules: future agents on observed signals
  bool stop = false;
  std::string reason;
};

using TraceSink = std::function<void(const TraceStep&)>;

/// Skip horizons. A rule with skip k may stop only at 1-based times t > k.
std::size_t algo3_skip(std::size_t n);        // floor(n/e)
std::size_t algo5_skip(std::size_t n);        // floor(n/2)
std::size_t mech4_sample_size(std::size_t n); // t0 = floor(n/2)
std::size_t mech4_skip(std::size_t n);        // t0 + floor(n/(2e))

/// Outcome for the agent arriving at `time`, welfare on `signals`.
Outcome outcome_at(const Instance& inst, const SignalProfile& signals, const ArrivalOrder& order,
                   std::size_t time);

/// Threshold rule with look-ahead: stop at the first t with
/// v_t(s_[t]) >= X and v_t(s_[t]) >= v_i(s_[t]) for every later agent i.
/// Prophet model with myopic agents only.
Outcome prophet_algo1(const Instance& inst, Threshold x, const SignalProfile& realized,
                      const TraceSink& trace = {});

/// Randomised posted-price mechanism. T is the first t with v_t(s_[t]) >= X.
/// The coin comes from `coin_src`; see prophet_mech2_branch for a fixed branch.
Outcome prophet_mech2(const Instance& inst, Threshold x, const SignalProfile& realized,
                      RandomSource& coin_src, const TraceSink& trace = {});

/// stop: select T and charge X. wait: select argmax_{i > T} v_i(s_[T])
/// (lowest index on ties) free of charge.
Outcome prophet_mech2_branch(const Instance& inst, Threshold x, const SignalProfile& realized,
                             Coin branch, const TraceSink& trace = {});

/// Random-order rule: after skipping floor(n/e) arrivals, stop at the first
/// agent strictly better than every earlier arrival on the signals seen so far.
Outcome secretary_algo3(const Instance& inst, const ArrivalOrder& order,
                        const TraceSink& trace = {});

/// The shared template of the random-order rules with an explicit skip.
Outcome secretary_skip_best(const Instance& inst, const ArrivalOrder& order, std::size_t skip,
                            const TraceSink& trace = {});

/// Sample-then-compare mechanism. The first t0 = floor(n/2) arrivals are a
/// signal sample; afterwards agents are valued on the sample plus their own
/// signal. The winner pays the critical value for the instance's
/// temporality. Throws DegenerateInstance for n < 4.
Outcome secretary_mech4(const Instance& inst, const ArrivalOrder& order,
                        const TraceSink& trace = {});

enum class SubmodularCheck { enforce, warn, off };

struct Algo5Options {
  SubmodularCheck check = SubmodularCheck::enforce;
  /// Receives the warning text in warn mode (stderr when empty).
  std::function<void(const std::string&)> warn;
};

/// secretary_algo3 with a floor(n/2) skip, for submodular-over-signals
/// valuations. The check runs on the grid {0, s_j} per coordinate, which
/// contains every profile the rule evaluates.
Outcome secretary_algo5_submodular(const Instance& inst, const ArrivalOrder& order,
                                   const Algo5Options& options = {},
                                   const TraceSink& trace = {});

/// Stop at the first t with v_t(s_[t]) >= X; the foil for the look-ahead rule.
Outcome naive_threshold_baseline(const Instance& inst, Threshold x, const SignalProfile& realized,
                                 const TraceSink& trace = {});

/// Always stop at 0-based arrival time `time`.
Outcome fixed_index_policy(const Instance& inst, std::size_t time, const SignalProfile& signals,
                           const ArrivalOrder& order);

/// True when every valuation is submodular on the {0, s_j} grid.
bool certify_submodular(const Instance& inst, std::string* reason = nullptr);

inline constexpr double kCriticalSignalTolerance = 1e-9;

/// Smallest s' >= 0 with qualifies(s') for an up-closed predicate, to within
/// kCriticalSignalTolerance. The bracket grows from a fixed start, so the
/// result depends only on the predicate. Returns a qualifying point, or
/// nullopt when none is found below 2^64.
std::optional<double> critical_signal(const std::function<bool(double)>& qualifies);

}  // namespace idv
