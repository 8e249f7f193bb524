#include "idv/rules.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include "idv/error.hpp"
#include "idv/property_checks.hpp"
#include "idv/random.hpp"

namespace idv {

std::string_view to_string(Coin c) {
  switch (c) {
    case Coin::none: return "none";
    case Coin::stop: return "stop";
    case Coin::wait: return "wait";
  }
  return "?";
}

Threshold::Threshold(double value) : value_(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw InvalidInput("threshold must be finite and non-negative");
  }
}

std::size_t algo3_skip(std::size_t n) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) / std::numbers::e));
}

std::size_t algo5_skip(std::size_t n) { return n / 2; }

std::size_t mech4_sample_size(std::size_t n) { return n / 2; }

std::size_t mech4_skip(std::size_t n) {
  return mech4_sample_size(n) +
         static_cast<std::size_t>(std::floor(static_cast<double>(n) / (2.0 * std::numbers::e)));
}

namespace {

// Signals of the first `count` arrivals, zero elsewhere, indexed by agent.
std::vector<double> visible_prefix(const SignalProfile& s, const ArrivalOrder& order,
                                   std::size_t count) {
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t t = 0; t < count; ++t) out[order[t]] = s[order[t]];
  return out;
}

void require_prophet_input(const Instance& inst, const SignalProfile& realized, const char* who,
                           bool need_myopic) {
  if (!inst.is_prophet()) throw InvalidInput(std::string(who) + ": requires a prophet instance");
  if (need_myopic && inst.temporality() != Temporality::myopic) {
    throw InvalidInput(std::string(who) + ": requires myopic agents");
  }
  if (realized.size() != inst.size()) {
    throw InvalidInput(std::string(who) + ": realized profile has the wrong length");
  }
}

void require_secretary_input(const Instance& inst, const ArrivalOrder& order, const char* who) {
  if (!inst.is_secretary()) {
    throw InvalidInput(std::string(who) + ": requires a secretary instance");
  }
  if (order.size() != inst.size()) {
    throw InvalidInput(std::string(who) + ": arrival order has the wrong length");
  }
}

std::vector<double> values_on(const Instance& inst, const ArrivalOrder& order,
                              const std::vector<double>& obs, std::size_t first,
                              std::size_t last) {
  std::vector<double> out;
  for (std::size_t i = first; i < last; ++i) out.push_back(inst.valuation(order[i]).evaluate(obs));
  return out;
}

void emit(const TraceSink& trace, const Instance& inst, const SignalProfile& s,
          const ArrivalOrder& order, const std::vector<double>& obs, std::size_t t,
          bool with_future, bool stop, std::string reason) {
  if (!trace) return;
  TraceStep step;
  step.t = t;
  step.agent = order[t];
  step.observed_signal = s[order[t]];
  step.arrived_values = values_on(inst, order, obs, 0, t + 1);
  if (with_future) step.future_values = values_on(inst, order, obs, t + 1, inst.size());
  step.stop = stop;
  step.reason = std::move(reason);
  trace(step);
}

// Shared body of the random-order rules: skip `skip` arrivals, then stop on
// the first agent strictly better than all earlier arrivals.
Outcome best_so_far_rule(const Instance& inst, const ArrivalOrder& order, std::size_t skip,
                         const TraceSink& trace) {
  const SignalProfile s = inst.fixed_signals();
  const std::size_t n = inst.size();
  // When every agent reads only its own signal, arrived values never change.
  const bool own_only = inst.own_signal_values();
  std::vector<double> obs(n, 0.0);
  double earlier_max = -1.0;
  for (std::size_t t = 0; t < n; ++t) {
    obs[order[t]] = s[order[t]];
    const double vt = inst.valuation(order[t]).evaluate(obs);
    if (t < skip) {
      emit(trace, inst, s, order, obs, t, false, false, "sampling phase");
      earlier_max = std::max(earlier_max, vt);
      continue;
    }
    bool best = true;
    if (own_only) {
      best = t == 0 || vt > earlier_max;
    } else {
      for (std::size_t i = 0; i < t && best; ++i) {
        best = vt > inst.valuation(order[i]).evaluate(obs);
      }
    }
    if (best) {
      emit(trace, inst, s, order, obs, t, false, true, "strictly best among arrived agents");
      return outcome_at(inst, s, order, t);
    }
    emit(trace, inst, s, order, obs, t, false, false, "an earlier agent is at least as good");
    earlier_max = std::max(earlier_max, vt);
  }
  return {};
}

}  // namespace

Outcome outcome_at(const Instance& inst, const SignalProfile& signals, const ArrivalOrder& order,
                   std::size_t time) {
  Outcome out;
  out.stopping_time = time;
  out.winner = order[time];
  const auto& v = inst.valuation(order[time]);
  out.myopic_welfare = v.evaluate(visible_prefix(signals, order, time + 1));
  out.farsighted_welfare = v(signals);
  return out;
}

Outcome prophet_algo1(const Instance& inst, Threshold x, const SignalProfile& realized,
                      const TraceSink& trace) {
  require_prophet_input(inst, realized, "prophet_algo1", true);
  const std::size_t n = inst.size();
  const auto order = ArrivalOrder::identity(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto obs = visible_prefix(realized, order, t + 1);
    const double vt = inst.valuation(t).evaluate(obs);
    if (vt < x.value()) {
      emit(trace, inst, realized, order, obs, t, true, false, "below threshold");
      continue;
    }
    std::optional<std::size_t> rival;
    for (std::size_t i = t + 1; i < n && !rival; ++i) {
      if (inst.valuation(i).evaluate(obs) > vt) rival = i;
    }
    if (rival) {
      emit(trace, inst, realized, order, obs, t, true, false,
           "future agent " + std::to_string(*rival) + " is worth more on observed signals");
      continue;
    }
    emit(trace, inst, realized, order, obs, t, true, true,
         "meets threshold and dominates every future agent");
    return outcome_at(inst, realized, order, t);
  }
  return {};
}

Outcome prophet_mech2(const Instance& inst, Threshold x, const SignalProfile& realized,
                      RandomSource& coin_src, const TraceSink& trace) {
  const Coin branch = coin_src.bernoulli(0.5) ? Coin::stop : Coin::wait;
  return prophet_mech2_branch(inst, x, realized, branch, trace);
}

Outcome prophet_mech2_branch(const Instance& inst, Threshold x, const SignalProfile& realized,
                             Coin branch, const TraceSink& trace) {
  require_prophet_input(inst, realized, "prophet_mech2", true);
  if (branch == Coin::none) throw InvalidInput("prophet_mech2_branch: branch must be stop or wait");
  const std::size_t n = inst.size();
  const auto order = ArrivalOrder::identity(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto obs = visible_prefix(realized, order, t + 1);
    if (inst.valuation(t).evaluate(obs) < x.value()) {
      emit(trace, inst, realized, order, obs, t, true, false, "below threshold");
      continue;
    }
    if (branch == Coin::stop) {
      emit(trace, inst, realized, order, obs, t, true, true, "meets threshold; coin says stop");
      Outcome out = outcome_at(inst, realized, order, t);
      out.payment = x.value();
      out.coin = branch;
      return out;
    }
    // Wait branch: pick the best future agent on the signals observed at T.
    std::optional<std::size_t> pick;
    double best = 0.0;
    for (std::size_t i = t + 1; i < n; ++i) {
      const double vi = inst.valuation(i).evaluate(obs);
      if (!pick || vi > best) {
        pick = i;
        best = vi;
      }
    }
    emit(trace, inst, realized, order, obs, t, true, false,
         pick ? "meets threshold; coin says wait for agent " + std::to_string(*pick)
              : std::string("meets threshold; coin says wait but no agent remains"));
    Outcome out = pick ? outcome_at(inst, realized, order, *pick) : Outcome{};
    out.coin = branch;
    return out;
  }
  Outcome out;
  out.coin = branch;
  return out;
}

Outcome secretary_skip_best(const Instance& inst, const ArrivalOrder& order, std::size_t skip,
                            const TraceSink& trace) {
  require_secretary_input(inst, order, "secretary_skip_best");
  if (skip > inst.size()) throw InvalidInput("secretary_skip_best: skip exceeds n");
  return best_so_far_rule(inst, order, skip, trace);
}

Outcome secretary_algo3(const Instance& inst, const ArrivalOrder& order, const TraceSink& trace) {
  require_secretary_input(inst, order, "secretary_algo3");
  return best_so_far_rule(inst, order, algo3_skip(inst.size()), trace);
}

bool certify_submodular(const Instance& inst, std::string* reason) {
  const SignalProfile s = inst.is_secretary() ? inst.fixed_signals() : SignalProfile::zeros(0);
  SignalGrid grid = inst.is_secretary() ? SignalGrid([&] {
    std::vector<std::vector<double>> axes;
    for (std::size_t j = 0; j < s.size(); ++j) {
      axes.push_back(s[j] > 0.0 ? std::vector<double>{0.0, s[j]} : std::vector<double>{0.0});
    }
    return axes;
  }())
                                        : default_check_grid(inst);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto result = check_submodular(inst.valuation(i), grid);
    if (!result.passed) {
      if (reason) {
        *reason = "agent " + std::to_string(i) + " (" +
                  std::string(inst.valuation(i).form_name()) +
                  ") is not submodular over signals on coordinate " +
                  std::to_string(result.witness->coordinate);
      }
      return false;
    }
  }
  return true;
}

Outcome secretary_algo5_submodular(const Instance& inst, const ArrivalOrder& order,
                                   const Algo5Options& options, const TraceSink& trace) {
  require_secretary_input(inst, order, "secretary_algo5_submodular");
  if (options.check != SubmodularCheck::off) {
    std::string reason;
    bool ok = false;
    try {
      ok = certify_submodular(inst, &reason);
    } catch (const PreconditionError& e) {
      reason = e.what();
    }
    if (!ok) {
      if (options.check == SubmodularCheck::enforce) {
        throw PreconditionError("secretary_algo5_submodular: " + reason);
      }
      if (options.warn) {
        options.warn(reason);
      } else {
        std::cerr << "warning: secretary_algo5_submodular: " << reason << '\n';
      }
    }
  }
  return best_so_far_rule(inst, order, algo5_skip(inst.size()), trace);
}

Outcome secretary_mech4(const Instance& inst, const ArrivalOrder& order, const TraceSink& trace) {
  require_secretary_input(inst, order, "secretary_mech4");
  const std::size_t n = inst.size();
  if (n < 4) throw DegenerateInstance("secretary_mech4: needs n >= 4");
  const std::size_t t0 = mech4_sample_size(n);
  const std::size_t t1 = mech4_skip(n);
  const SignalProfile s = inst.fixed_signals();
  const auto sample = visible_prefix(s, order, t0);

  auto estimate = [&](std::size_t time, double own_signal) {
    auto obs = sample;
    obs[order[time]] = own_signal;
    return inst.valuation(order[time]).evaluate(obs);
  };

  std::optional<double> rival_best;  // max estimate over t0 <= i < t
  for (std::size_t t = 0; t < n; ++t) {
    if (t < t0) {
      if (trace) emit(trace, inst, s, order, visible_prefix(s, order, t + 1), t, false, false,
                      "signal sample");
      continue;
    }
    const double est = estimate(t, s[order[t]]);
    const bool eligible = t >= t1;
    const bool beats = !rival_best || est > *rival_best;
    if (eligible && beats) {
      if (trace) emit(trace, inst, s, order, visible_prefix(s, order, t + 1), t, false, true,
                      "estimate beats every post-sample rival");
      Outcome out = outcome_at(inst, s, order, t);
      const std::size_t agent = order[t];
      double critical = 0.0;
      if (rival_best) {
        const double bar = *rival_best;
        const auto c = critical_signal([&](double own) { return estimate(t, own) > bar; });
        critical = c.value_or(s[agent]);
      }
      std::vector<double> at_critical =
          inst.temporality() == Temporality::farsighted
              ? std::vector<double>(s.values().begin(), s.values().end())
              : visible_prefix(s, order, t);
      at_critical[agent] = critical;
      out.payment = inst.valuation(agent).evaluate(at_critical);
      return out;
    }
    if (trace) emit(trace, inst, s, order, visible_prefix(s, order, t + 1), t, false, false,
                    eligible ? "an earlier post-sample agent is at least as good"
                             : "inside the skip horizon");
    rival_best = rival_best ? std::max(*rival_best, est) : est;
  }
  return {};
}

Outcome naive_threshold_baseline(const Instance& inst, Threshold x, const SignalProfile& realized,
                                 const TraceSink& trace) {
  require_prophet_input(inst, realized, "naive_threshold_baseline", false);
  const std::size_t n = inst.size();
  const auto order = ArrivalOrder::identity(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto obs = visible_prefix(realized, order, t + 1);
    if (inst.valuation(t).evaluate(obs) >= x.value()) {
      emit(trace, inst, realized, order, obs, t, true, true, "meets threshold");
      return outcome_at(inst, realized, order, t);
    }
    emit(trace, inst, realized, order, obs, t, true, false, "below threshold");
  }
  return {};
}

Outcome fixed_index_policy(const Instance& inst, std::size_t time, const SignalProfile& signals,
                           const ArrivalOrder& order) {
  if (time >= inst.size()) throw InvalidInput("fixed_index_policy: index out of range");
  if (signals.size() != inst.size() || order.size() != inst.size()) {
    throw InvalidInput("fixed_index_policy: size mismatch");
  }
  return outcome_at(inst, signals, order, time);
}

std::optional<double> critical_signal(const std::function<bool(double)>& qualifies) {
  if (qualifies(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (!qualifies(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0x1.0p64) return std::nullopt;
  }
  for (int iter = 0; iter < 256 && hi - lo > kCriticalSignalTolerance; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (qualifies(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace idv
