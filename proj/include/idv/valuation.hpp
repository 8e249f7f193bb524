#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "idv/signals.hpp"

namespace idv {

// Parametric valuation forms. All indices are 0-based agent ids.
namespace forms {

/// sum_j w_j s_j
struct Additive {
  std::vector<double> weights;
};

/// max_j w_j s_j
struct WeightedMax {
  std::vector<double> weights;
};

/// s_agent
struct OwnSignalOnly {
  std::size_t agent = 0;
};

/// base + sum_j w_j s_j
struct SumPlusConstant {
  double base = 0.0;
  std::vector<double> weights;
};

/// 2^exponent * 1[s_watched >= 1 - 2^-exponent]
struct IndicatorPower {
  int exponent = 0;
  std::size_t watched = 0;
};

/// prod_{j in indices} s_j
struct Product {
  std::vector<std::size_t> indices;
};

/// Values tabulated on a product grid. Every axis is sorted and starts at 0;
/// off-grid profiles read the entry at the coordinatewise floor. Entries are
/// stored with the first coordinate varying fastest.
struct LookupTable {
  std::vector<std::vector<double>> axes;
  std::vector<double> values;
};

/// sum_e w_e * max_{j covering e} s_j: weighted coverage where each ground
/// element is covered at the level of its strongest covering signal.
struct CoverageSubmodular {
  std::vector<double> element_weights;
  std::vector<std::vector<std::size_t>> covered_by;
};

}  // namespace forms

using ValuationForm =
    std::variant<forms::Additive, forms::WeightedMax, forms::OwnSignalOnly, forms::SumPlusConstant,
                 forms::IndicatorPower, forms::Product, forms::LookupTable, forms::CoverageSubmodular>;

/// Public, monotone, non-negative valuation of one agent over the signal
/// profile of all n agents. Immutable once constructed.
class ValuationFunction {
 public:
  ValuationFunction(std::size_t arity, ValuationForm form);

  static ValuationFunction additive(std::vector<double> weights);
  static ValuationFunction weighted_max(std::vector<double> weights);
  static ValuationFunction own_signal(std::size_t agent, std::size_t arity);
  static ValuationFunction sum_plus_constant(double base, std::vector<double> weights);
  /// Watches the last coordinate, as in the farsighted hardness instance.
  static ValuationFunction indicator_power(int exponent, std::size_t arity);
  static ValuationFunction product(std::vector<std::size_t> indices, std::size_t arity);
  static ValuationFunction lookup_table(std::vector<std::vector<double>> axes,
                                        std::vector<double> values);
  static ValuationFunction coverage(std::size_t arity, std::vector<double> element_weights,
                                    std::vector<std::vector<std::size_t>> covered_by);
  static ValuationFunction zero(std::size_t arity);

  std::size_t arity() const { return arity_; }
  const ValuationForm& form() const { return form_; }
  std::string_view form_name() const;

  /// Throws InvalidInput on arity mismatch.
  double operator()(const SignalProfile& profile) const { return evaluate(profile.values()); }
  double evaluate(std::span<const double> signals) const;

  /// True when the value can change with coordinate j.
  bool depends_on(std::size_t j) const;

  /// Same function over a longer profile; extra coordinates have no effect.
  ValuationFunction extended_to(std::size_t arity) const;

 private:
  std::size_t arity_;
  ValuationForm form_;
};

double evaluate(const ValuationFunction& v, const SignalProfile& profile);

std::string_view form_name(const ValuationForm& form);

}  // namespace idv
