#include "idv/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <type_traits>

#include "idv/error.hpp"
#include "idv/property_checks.hpp"
#include "idv/random.hpp"

namespace idv {

namespace {

constexpr std::size_t kBlock = 4096;

// Sum fn(index) over [0, count) in fixed blocks; blocks are merged in index
// order so the result does not depend on the worker count.
template <typename Acc, typename Fn>
Acc blocked_sum(std::size_t count, std::size_t workers, Fn fn) {
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<Acc> partial(blocks);
  auto run = [&](std::size_t first_block, std::size_t stride) {
    for (std::size_t b = first_block; b < blocks; b += stride) {
      Acc acc{};
      const std::size_t end = std::min(count, (b + 1) * kBlock);
      for (std::size_t i = b * kBlock; i < end; ++i) acc += fn(i);
      partial[b] = acc;
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, blocks));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& t : pool) t.join();
  }
  Acc total{};
  for (const auto& p : partial) total += p;
  return total;
}

struct Triple {
  double myopic = 0.0;
  double farsighted = 0.0;
  double payment = 0.0;
  Triple& operator+=(const Triple& o) {
    myopic += o.myopic;
    farsighted += o.farsighted;
    payment += o.payment;
    return *this;
  }
};

std::size_t factorial(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

ArrivalOrder nth_order(std::size_t n, std::size_t index) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> out;
  std::size_t f = factorial(n);
  for (std::size_t left = n; left > 0; --left) {
    f /= left;
    const std::size_t pick = index / f;
    index %= f;
    out.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return ArrivalOrder(std::move(out));
}

double max_value(const Instance& inst, const SignalProfile& s) {
  const std::size_t n = inst.size();
  double best = 0.0;
  if (inst.temporality() == Temporality::farsighted || inst.is_secretary()) {
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, inst.valuation(i)(s));
    return best;
  }
  std::vector<double> prefix(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i] = s[i];
    best = std::max(best, inst.valuation(i).evaluate(prefix));
  }
  return best;
}

}  // namespace

ProfileSpace::ProfileSpace(const Instance& inst) {
  if (!inst.is_prophet()) throw InvalidInput("ProfileSpace: requires a prophet instance");
  const std::size_t n = inst.size();
  values_.resize(n);
  probs_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& dist = inst.agent(j).signal;
    if (auto atoms = dist.enumerate_support()) {
      for (const auto& a : *atoms) {
        values_[j].push_back(a.value);
        probs_[j].push_back(a.probability);
      }
    } else {
      const auto& u = std::get<dists::Uniform>(dist.kind());
      std::vector<double> cuts{u.lo};
      for (std::size_t i = 0; i < n; ++i) {
        const auto& v = inst.valuation(i);
        if (!v.depends_on(j)) continue;
        const auto* ind = std::get_if<forms::IndicatorPower>(&v.form());
        if (ind == nullptr) {
          throw Unsupported("ProfileSpace: coordinate " + std::to_string(j) +
                            " is continuous and read by a " + std::string(v.form_name()) +
                            " valuation");
        }
        const double cut = 1.0 - std::ldexp(1.0, -ind->exponent);
        if (cut > u.lo && cut < u.hi) cuts.push_back(cut);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      for (std::size_t c = 0; c < cuts.size(); ++c) {
        const double right = c + 1 < cuts.size() ? cuts[c + 1] : u.hi;
        values_[j].push_back(cuts[c]);
        probs_[j].push_back((right - cuts[c]) / (u.hi - u.lo));
      }
    }
    const std::size_t len = values_[j].size();
    if (len != 0 && size_ > kMaxEnumeratedProfiles / len) {
      throw CapacityError("ProfileSpace: more than " + std::to_string(kMaxEnumeratedProfiles) +
                          " signal profiles");
    }
    size_ *= len;
  }
}

SignalProfile ProfileSpace::profile(std::size_t index) const {
  std::vector<double> s(values_.size());
  for (std::size_t j = 0; j < values_.size(); ++j) {
    s[j] = values_[j][index % values_[j].size()];
    index /= values_[j].size();
  }
  return SignalProfile(std::move(s));
}

double ProfileSpace::probability(std::size_t index) const {
  double p = 1.0;
  for (std::size_t j = 0; j < probs_.size(); ++j) {
    p *= probs_[j][index % probs_[j].size()];
    index /= probs_[j].size();
  }
  return p;
}

ExactExpectation exact_opt(const Instance& inst, std::size_t workers) {
  if (inst.is_secretary()) return {max_value(inst, inst.fixed_signals()), 1, true};
  const ProfileSpace space(inst);
  const double v = blocked_sum<double>(space.size(), workers, [&](std::size_t i) {
    return space.probability(i) * max_value(inst, space.profile(i));
  });
  return {v, space.size(), true};
}

ExactAlg exact_alg(const Policy& policy, const Instance& inst, std::size_t workers) {
  Triple total;
  std::size_t atoms = 0;
  auto weigh = [](const std::vector<WeightedOutcome>& outs, double p) {
    Triple t;
    for (const auto& w : outs) {
      t.myopic += p * w.weight * w.outcome.myopic_welfare;
      t.farsighted += p * w.weight * w.outcome.farsighted_welfare;
      t.payment += p * w.weight * w.outcome.payment;
    }
    return t;
  };
  if (inst.is_secretary()) {
    const std::size_t n = inst.size();
    if (n > 8) throw CapacityError("exact_alg: secretary enumeration is limited to n <= 8");
    const auto s = inst.fixed_signals();
    atoms = factorial(n);
    const double p = 1.0 / static_cast<double>(atoms);
    total = blocked_sum<Triple>(atoms, workers, [&](std::size_t i) {
      return weigh(run_policy(policy, inst, s, nth_order(n, i)), p);
    });
  } else {
    const ProfileSpace space(inst);
    const auto id = ArrivalOrder::identity(inst.size());
    atoms = space.size();
    total = blocked_sum<Triple>(atoms, workers, [&](std::size_t i) {
      return weigh(run_policy(policy, inst, space.profile(i), id), space.probability(i));
    });
  }
  ExactAlg out;
  out.myopic_welfare = total.myopic;
  out.farsighted_welfare = total.farsighted;
  out.payment = total.payment;
  out.value = inst.temporality() == Temporality::myopic ? total.myopic : total.farsighted;
  out.atoms = atoms;
  out.is_exact = true;
  return out;
}

double thm31_expected_opt(std::size_t n) { return (static_cast<double>(n) + 1.0) / 2.0; }

double classic_secretary_success(std::size_t n, std::size_t k) {
  if (n == 0) throw InvalidInput("classic_secretary_success: n must be positive");
  if (k >= n) return 0.0;
  if (k == 0) return 1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t t = k + 1; t <= n; ++t) sum += 1.0 / static_cast<double>(t - 1);
  return static_cast<double>(k) / static_cast<double>(n) * sum;
}

double padded_secretary_success(std::size_t m, std::size_t big_n, std::size_t k) {
  if (m == 0 || m > big_n) throw InvalidInput("padded_secretary_success: need 1 <= m <= N");
  if (k >= big_n) return 0.0;
  if (k == 0) return 1.0 / static_cast<double>(big_n);
  double sum = 0.0;
  for (std::size_t p = k + 1; p <= big_n; ++p) {
    // Probability that the other m-1 positives all arrive after position p.
    double q = 1.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
      q *= p + j > big_n - 1 ? 0.0
                             : static_cast<double>(big_n - p - j) /
                                   static_cast<double>(big_n - 1 - j);
    }
    sum += q + (1.0 - q) * static_cast<double>(k) / static_cast<double>(p - 1);
  }
  return sum / static_cast<double>(big_n);
}

Fraction operator+(Fraction a, Fraction b) {
  const std::int64_t g = std::gcd(a.den, b.den);
  Fraction r{a.num * (b.den / g) + b.num * (a.den / g), a.den / g * b.den};
  const std::int64_t h = std::gcd(r.num, r.den);
  if (h > 1) {
    r.num /= h;
    r.den /= h;
  }
  return r;
}

Fraction stopping_time_mass(std::size_t n, std::size_t k) {
  if (k < 1 || k > n || n > 100'000) throw InvalidInput("stopping_time_mass: need 1 <= k <= n");
  const auto kk = static_cast<std::int64_t>(k);
  Fraction sum{0, 1};
  sum = sum + Fraction{kk, static_cast<std::int64_t>(n)};
  for (std::size_t t = k + 1; t <= n; ++t) {
    const auto tt = static_cast<std::int64_t>(t);
    sum = sum + Fraction{kk, tt * (tt - 1)};
  }
  return sum;
}

double StoppingTimePmf::stderr_of(double p) const {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

StoppingTimePmf stopping_time_pmf(const Instance& inst, std::size_t k, std::size_t trials,
                                  RandomSource& src) {
  if (!inst.is_secretary()) throw InvalidInput("stopping_time_pmf: requires a secretary instance");
  const std::size_t n = inst.size();
  if (k < 1 || k > n) throw InvalidInput("stopping_time_pmf: need 1 <= k <= n");
  if (trials == 0) throw InvalidInput("stopping_time_pmf: trials must be positive");
  const auto s = inst.fixed_signals();

  StoppingTimePmf pmf;
  pmf.n = n;
  pmf.k = k;
  pmf.trials = trials;
  pmf.empirical.assign(n + 1, 0.0);
  pmf.theoretical.assign(n + 1, 0.0);
  for (std::size_t t = k + 1; t <= n; ++t) {
    pmf.theoretical[t] = static_cast<double>(k) / static_cast<double>(t * (t - 1));
  }
  pmf.theoretical_none = static_cast<double>(k) / static_cast<double>(n);

  std::vector<std::size_t> counts(n + 1, 0);
  std::size_t none = 0;
  std::vector<double> obs(n);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto order = ArrivalOrder::random(n, src);
    std::fill(obs.begin(), obs.end(), 0.0);
    bool stopped = false;
    for (std::size_t t = 0; t < n && !stopped; ++t) {
      obs[order[t]] = s[order[t]];
      // Best of the arrived set, which must be unique.
      double best = -1.0;
      std::size_t best_time = 0;
      std::size_t ties = 0;
      for (std::size_t i = 0; i <= t; ++i) {
        const double v = inst.valuation(order[i]).evaluate(obs);
        if (v > best) {
          best = v;
          best_time = i;
          ties = 1;
        } else if (v == best) {
          ++ties;
        }
      }
      if (ties > 1) {
        throw PreconditionError("stopping_time_pmf: the arrived set at time " +
                                std::to_string(t + 1) + " has no unique best");
      }
      if (t >= k && best_time == t) {
        ++counts[t + 1];
        stopped = true;
      }
    }
    if (!stopped) ++none;
  }
  for (std::size_t t = 1; t <= n; ++t) {
    pmf.empirical[t] = static_cast<double>(counts[t]) / static_cast<double>(trials);
  }
  pmf.empirical_none = static_cast<double>(none) / static_cast<double>(trials);
  return pmf;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    const std::size_t g = std::gcd(r, i);
    const std::size_t a = r / g;
    const std::size_t b = num / (i / g);
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
      return std::numeric_limits<std::size_t>::max();
    }
    r = a * b;
  }
  return r;
}

SamplingBoundResult sampling_bound_check(const ValuationFunction& v, const SignalProfile& s,
                                         std::size_t k, std::size_t trials, RandomSource& src) {
  const std::size_t n = s.size();
  if (v.arity() != n) throw InvalidInput("sampling_bound_check: arity mismatch");
  if (k < 1 || k > n) throw InvalidInput("sampling_bound_check: need 1 <= k <= n");
  SamplingBoundResult r;
  r.bound = static_cast<double>(k) / static_cast<double>(n) * v(s);
  std::vector<double> masked(n);
  auto value_on = [&](const std::vector<std::size_t>& subset) {
    std::fill(masked.begin(), masked.end(), 0.0);
    for (std::size_t j : subset) masked[j] = s[j];
    return v.evaluate(masked);
  };

  const std::size_t total = binomial(n, k);
  if (total <= kMaxExhaustiveSubsets) {
    r.exhaustive = true;
    std::vector<std::size_t> subset(k);
    std::iota(subset.begin(), subset.end(), std::size_t{0});
    double sum = 0.0;
    while (true) {
      sum += value_on(subset);
      ++r.subsets;
      std::size_t i = k;
      while (i > 0 && subset[i - 1] == n - k + (i - 1)) --i;
      if (i == 0) break;
      ++subset[i - 1];
      for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
    r.mean = sum / static_cast<double>(r.subsets);
    r.passed = r.mean >= r.bound - kValueTolerance * std::max(1.0, r.bound);
    return r;
  }

  if (trials < 2) throw InvalidInput("sampling_bound_check: need at least two trials");
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    auto perm = src.permutation(n);
    perm.resize(k);
    const double x = value_on(perm);
    sum += x;
    sq += x * x;
  }
  r.subsets = trials;
  const double tn = static_cast<double>(trials);
  r.mean = sum / tn;
  const double var = std::max(0.0, (sq - tn * r.mean * r.mean) / (tn - 1.0));
  r.standard_error = std::sqrt(var / tn);
  r.passed = r.mean >= r.bound - 3.0 * r.standard_error;
  return r;
}

}  // namespace idv
