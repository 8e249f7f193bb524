#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "idv/instance.hpp"
#include "idv/policy.hpp"
#include "idv/valuation.hpp"

namespace idv {

class RandomSource;

struct ExactExpectation {
  double value = 0.0;
  std::size_t atoms = 0;  // enumerated outcomes
  bool is_exact = false;
};

inline constexpr std::size_t kMaxEnumeratedProfiles = 10'000'000;

/// The signal space of a prophet instance as a finite list of weighted
/// atoms. Finite supports enumerate directly. A Uniform coordinate is
/// accepted when every valuation reading it is an IndicatorPower: the
/// coordinate splits into the intervals between the indicator cuts, each
/// represented by its left end and weighted by its length.
class ProfileSpace {
 public:
  /// Throws Unsupported for a continuous coordinate outside that pattern and
  /// CapacityError above kMaxEnumeratedProfiles atoms.
  explicit ProfileSpace(const Instance& inst);

  std::size_t size() const { return size_; }
  /// Atom `index` in odometer order (first coordinate fastest).
  SignalProfile profile(std::size_t index) const;
  double probability(std::size_t index) const;

 private:
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<double>> probs_;
  std::size_t size_ = 1;
};

/// E[max_i v_i] with v_i on s_[i] (myopic) or s (farsighted). Secretary
/// instances: max_i v_i(s) on the fixed signals.
ExactExpectation exact_opt(const Instance& inst, std::size_t workers = 1);

struct ExactAlg : ExactExpectation {
  double myopic_welfare = 0.0;
  double farsighted_welfare = 0.0;
  double payment = 0.0;
};

/// Exact expected welfare of a policy: every signal atom (prophet) or every
/// arrival order (secretary, n <= 8), with both coins of the posted-price
/// mechanism. `value` holds the welfare of the instance's temporality.
ExactAlg exact_alg(const Policy& policy, const Instance& inst, std::size_t workers = 1);

/// Closed forms.
double thm31_expected_opt(std::size_t n);  // (n+1)/2
/// Classic best-of-skip success probability with n distinct values:
/// (k/n) sum_{t=k+1..n} 1/(t-1); 1/n for k = 0.
double classic_secretary_success(std::size_t n, std::size_t k);
/// Success probability of the strict best-so-far rule with skip k when m
/// distinct positive values are padded with zero agents to N. The zeros
/// never beat an earlier arrival, so the rule also stops on the first
/// positive agent after the skip when the sample held only zeros.
double padded_secretary_success(std::size_t m, std::size_t big_n, std::size_t k);

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool operator==(const Fraction&) const = default;
};
Fraction operator+(Fraction a, Fraction b);

/// sum_{t=k+1..n} k/(t(t-1)) + k/n in exact arithmetic; equals 1 for 1 <= k <= n.
Fraction stopping_time_mass(std::size_t n, std::size_t k);

struct StoppingTimePmf {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t trials = 0;
  std::vector<double> empirical;    // index t = 1..n (entry 0 unused)
  std::vector<double> theoretical;  // k/(t(t-1)) for t > k, else 0
  double empirical_none = 0.0;
  double theoretical_none = 0.0;    // k/n

  /// Binomial standard error of an empirical mass with reference p.
  double stderr_of(double p) const;
};

/// Empirical distribution of the stopping time of the skip-k best-so-far
/// rule over uniformly random orders. Throws PreconditionError when an
/// arrived set has no unique best.
StoppingTimePmf stopping_time_pmf(const Instance& inst, std::size_t k, std::size_t trials,
                                  RandomSource& src);

struct SamplingBoundResult {
  bool passed = false;
  bool exhaustive = false;
  std::size_t subsets = 0;
  double mean = 0.0;    // E_A[v(s_A)]
  double standard_error = 0.0;  // 0 when exhaustive
  double bound = 0.0;   // (k/n) v(s)
};

inline constexpr std::size_t kMaxExhaustiveSubsets = 1'000'000;

/// E over uniform size-k subsets A of v(s_A) against (k/n) v(s), with
/// signals outside A zeroed. Exhaustive when C(n,k) <= 10^6.
SamplingBoundResult sampling_bound_check(const ValuationFunction& v, const SignalProfile& s,
                                         std::size_t k, std::size_t trials, RandomSource& src);

/// C(n,k), saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace idv
