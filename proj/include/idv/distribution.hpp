#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace idv {

class RandomSource;

struct Atom {
  double value = 0.0;
  double probability = 0.0;

  bool operator==(const Atom&) const = default;
};

namespace dists {

struct PointMass {
  double value = 0.0;
};

/// Probabilities are renormalised on construction so that they sum to one in
/// floating point: the last atom absorbs the rounding residue.
struct FiniteSupport {
  std::vector<Atom> atoms;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

/// `high` with probability p_high, otherwise `low`.
struct TwoPoint {
  double low = 0.0;
  double high = 0.0;
  double p_high = 0.0;
};

}  // namespace dists

using DistributionKind = std::variant<dists::PointMass, dists::FiniteSupport, dists::Uniform,
                                      dists::TwoPoint>;

/// Independent prior over one agent's non-negative signal.
class SignalDistribution {
 public:
  explicit SignalDistribution(DistributionKind kind);

  static SignalDistribution point_mass(double value);
  static SignalDistribution finite(std::vector<Atom> atoms);
  static SignalDistribution uniform(double lo, double hi);
  static SignalDistribution two_point(double low, double high, double p_high);

  const DistributionKind& kind() const { return kind_; }
  std::string_view kind_name() const;

  bool is_point_mass() const { return std::holds_alternative<dists::PointMass>(kind_); }
  bool has_finite_support() const { return !std::holds_alternative<dists::Uniform>(kind_); }

  double sample(RandomSource& src) const;

  /// Exact atoms with positive probability, or nullopt for Uniform.
  std::optional<std::vector<Atom>> enumerate_support() const;

  double mean() const;

  /// p-quantile with p in [0, 1].
  double quantile(double p) const;

 private:
  DistributionKind kind_;
};

double sample(const SignalDistribution& d, RandomSource& src);
std::optional<std::vector<Atom>> enumerate_support(const SignalDistribution& d);

}  // namespace idv
