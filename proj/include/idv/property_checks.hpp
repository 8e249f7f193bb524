#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "idv/signals.hpp"
#include "idv/valuation.hpp"

namespace idv {

class RandomSource;

/// Absolute tolerance on values used by every property checker.
inline constexpr double kValueTolerance = 1e-9;

/// Largest grid the checkers tabulate.
inline constexpr std::size_t kMaxCheckedGridPoints = 1u << 23;

template <class Witness>
struct CheckResult {
  bool passed = true;
  std::optional<Witness> witness;
  std::size_t comparisons = 0;

  explicit operator bool() const { return passed; }
};

/// lower <= upper coordinatewise but v(lower) > v(upper).
struct MonotoneWitness {
  SignalProfile lower;
  SignalProfile upper;
  double value_lower = 0.0;
  double value_upper = 0.0;
};

/// v(s) > v(s_X) + v(s_{[n] \ X}).
struct SubadditiveWitness {
  SignalMask subset;
  double whole = 0.0;
  double part = 0.0;
  double rest = 0.0;
};

/// Raising `coordinate` from low to high gains more when the other
/// coordinates sit at `high` than at `low`: lhs > rhs.
struct SubmodularWitness {
  std::size_t coordinate = 0;
  SignalProfile high;
  SignalProfile low;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Raising agent i's signal from point[i] to raised_signal moves v_j by more
/// than it moves v_i.
struct SingleCrossingWitness {
  std::size_t i = 0;
  std::size_t j = 0;
  SignalProfile point;
  double raised_signal = 0.0;
  double own_increase = 0.0;
  double other_increase = 0.0;
};

enum class SubsetMode { exhaustive, sampled };

inline constexpr std::size_t kSampledSubsets = 10'000;
inline constexpr std::size_t kMaxExhaustiveSubsetArity = 20;

/// Compares every grid point with its successor along each axis; by
/// transitivity that covers every comparable pair. Empty grid -> InvalidInput.
CheckResult<MonotoneWitness> check_monotone(const ValuationFunction& v, const SignalGrid& grid);

/// Exhaustive mode needs n <= 20. Sampled mode draws kSampledSubsets uniform
/// subsets from `src` (a fixed checker stream when null).
CheckResult<SubadditiveWitness> check_subadditive(const ValuationFunction& v,
                                                  const SignalProfile& profile, SubsetMode mode,
                                                  RandomSource* src = nullptr);

/// Decreasing differences between every pair of coordinates at adjacent grid
/// steps, which on a product grid is equivalent to the condition for all
/// pairs s >= s'.
CheckResult<SubmodularWitness> check_submodular(const ValuationFunction& v,
                                                const SignalGrid& grid);

/// vs[i] is agent i's valuation; agent i owns coordinate i.
CheckResult<SingleCrossingWitness> check_single_crossing(std::span<const ValuationFunction> vs,
                                                         const SignalGrid& grid);

/// All values of v on the grid, first coordinate varying fastest.
std::vector<double> tabulate(const ValuationFunction& v, const SignalGrid& grid);

}  // namespace idv
