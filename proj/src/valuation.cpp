#include "idv/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "idv/error.hpp"

namespace idv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_weights(const std::vector<double>& w, std::string_view what) {
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidInput(std::string(what) + ": weights must be finite and non-negative");
    }
  }
}

void require_index(std::size_t i, std::size_t arity, std::string_view what) {
  if (i >= arity) {
    throw InvalidInput(std::string(what) + ": index " + std::to_string(i) +
                       " out of range for arity " + std::to_string(arity));
  }
}

std::size_t table_size(const forms::LookupTable& t) {
  std::size_t size = 1;
  for (const auto& axis : t.axes) size *= axis.size();
  return size;
}

void validate(std::size_t arity, const ValuationForm& form) {
  std::visit(
      overloaded{
          [&](const forms::Additive& f) {
            if (f.weights.size() != arity) throw InvalidInput("Additive: weight count != arity");
            require_weights(f.weights, "Additive");
          },
          [&](const forms::WeightedMax& f) {
            if (f.weights.size() != arity) throw InvalidInput("WeightedMax: weight count != arity");
            require_weights(f.weights, "WeightedMax");
          },
          [&](const forms::OwnSignalOnly& f) { require_index(f.agent, arity, "OwnSignalOnly"); },
          [&](const forms::SumPlusConstant& f) {
            if (f.weights.size() != arity) {
              throw InvalidInput("SumPlusConstant: weight count != arity");
            }
            require_weights(f.weights, "SumPlusConstant");
            require_weights({f.base}, "SumPlusConstant base");
          },
          [&](const forms::IndicatorPower& f) {
            if (f.exponent < 0 || f.exponent > 1000) {
              throw InvalidInput("IndicatorPower: exponent must lie in [0, 1000]");
            }
            require_index(f.watched, arity, "IndicatorPower");
          },
          [&](const forms::Product& f) {
            for (std::size_t i : f.indices) require_index(i, arity, "Product");
          },
          [&](const forms::LookupTable& f) {
            if (f.axes.size() != arity) throw InvalidInput("LookupTable: axis count != arity");
            for (const auto& axis : f.axes) {
              if (axis.empty() || axis.front() != 0.0) {
                throw InvalidInput("LookupTable: every axis must start at 0");
              }
              if (!std::is_sorted(axis.begin(), axis.end()) ||
                  std::adjacent_find(axis.begin(), axis.end()) != axis.end()) {
                throw InvalidInput("LookupTable: axes must be strictly increasing");
              }
            }
            if (f.values.size() != table_size(f)) {
              throw InvalidInput("LookupTable: value count does not match the grid");
            }
            require_weights(f.values, "LookupTable");
          },
          [&](const forms::CoverageSubmodular& f) {
            if (f.element_weights.size() != f.covered_by.size()) {
              throw InvalidInput("CoverageSubmodular: one cover list per element required");
            }
            require_weights(f.element_weights, "CoverageSubmodular");
            for (const auto& cover : f.covered_by) {
              for (std::size_t j : cover) require_index(j, arity, "CoverageSubmodular");
            }
          },
      },
      form);
}

}  // namespace

ValuationFunction::ValuationFunction(std::size_t arity, ValuationForm form)
    : arity_(arity), form_(std::move(form)) {
  validate(arity_, form_);
}

ValuationFunction ValuationFunction::additive(std::vector<double> weights) {
  const auto n = weights.size();
  return {n, forms::Additive{std::move(weights)}};
}

ValuationFunction ValuationFunction::weighted_max(std::vector<double> weights) {
  const auto n = weights.size();
  return {n, forms::WeightedMax{std::move(weights)}};
}

ValuationFunction ValuationFunction::own_signal(std::size_t agent, std::size_t arity) {
  return {arity, forms::OwnSignalOnly{agent}};
}

ValuationFunction ValuationFunction::sum_plus_constant(double base, std::vector<double> weights) {
  const auto n = weights.size();
  return {n, forms::SumPlusConstant{base, std::move(weights)}};
}

ValuationFunction ValuationFunction::indicator_power(int exponent, std::size_t arity) {
  if (arity == 0) throw InvalidInput("IndicatorPower: arity must be positive");
  return {arity, forms::IndicatorPower{exponent, arity - 1}};
}

ValuationFunction ValuationFunction::product(std::vector<std::size_t> indices, std::size_t arity) {
  return {arity, forms::Product{std::move(indices)}};
}

ValuationFunction ValuationFunction::lookup_table(std::vector<std::vector<double>> axes,
                                                  std::vector<double> values) {
  const auto n = axes.size();
  return {n, forms::LookupTable{std::move(axes), std::move(values)}};
}

ValuationFunction ValuationFunction::coverage(std::size_t arity,
                                              std::vector<double> element_weights,
                                              std::vector<std::vector<std::size_t>> covered_by) {
  return {arity, forms::CoverageSubmodular{std::move(element_weights), std::move(covered_by)}};
}

ValuationFunction ValuationFunction::zero(std::size_t arity) {
  return additive(std::vector<double>(arity, 0.0));
}

std::string_view form_name(const ValuationForm& form) {
  return std::visit(overloaded{
                        [](const forms::Additive&) { return std::string_view("Additive"); },
                        [](const forms::WeightedMax&) { return std::string_view("WeightedMax"); },
                        [](const forms::OwnSignalOnly&) { return std::string_view("OwnSignalOnly"); },
                        [](const forms::SumPlusConstant&) {
                          return std::string_view("SumPlusConstant");
                        },
                        [](const forms::IndicatorPower&) {
                          return std::string_view("IndicatorPower");
                        },
                        [](const forms::Product&) { return std::string_view("Product"); },
                        [](const forms::LookupTable&) { return std::string_view("LookupTable"); },
                        [](const forms::CoverageSubmodular&) {
                          return std::string_view("CoverageSubmodular");
                        },
                    },
                    form);
}

std::string_view ValuationFunction::form_name() const { return idv::form_name(form_); }

double ValuationFunction::evaluate(std::span<const double> s) const {
  if (s.size() != arity_) {
    throw InvalidInput("valuation of arity " + std::to_string(arity_) +
                       " evaluated on a profile of length " + std::to_string(s.size()));
  }
  return std::visit(
      overloaded{
          [&](const forms::Additive& f) {
            double total = 0.0;
            for (std::size_t j = 0; j < s.size(); ++j) total += f.weights[j] * s[j];
            return total;
          },
          [&](const forms::WeightedMax& f) {
            double best = 0.0;
            for (std::size_t j = 0; j < s.size(); ++j) best = std::max(best, f.weights[j] * s[j]);
            return best;
          },
          [&](const forms::OwnSignalOnly& f) { return s[f.agent]; },
          [&](const forms::SumPlusConstant& f) {
            double total = f.base;
            for (std::size_t j = 0; j < s.size(); ++j) total += f.weights[j] * s[j];
            return total;
          },
          [&](const forms::IndicatorPower& f) {
            const double cut = 1.0 - std::ldexp(1.0, -f.exponent);
            return s[f.watched] >= cut ? std::ldexp(1.0, f.exponent) : 0.0;
          },
          [&](const forms::Product& f) {
            double p = 1.0;
            for (std::size_t j : f.indices) p *= s[j];
            return p;
          },
          [&](const forms::LookupTable& f) {
            std::size_t offset = 0;
            std::size_t stride = 1;
            for (std::size_t j = 0; j < s.size(); ++j) {
              const auto& axis = f.axes[j];
              const auto it = std::upper_bound(axis.begin(), axis.end(), s[j]);
              offset += static_cast<std::size_t>(it - axis.begin() - 1) * stride;
              stride *= axis.size();
            }
            return f.values[offset];
          },
          [&](const forms::CoverageSubmodular& f) {
            double total = 0.0;
            for (std::size_t e = 0; e < f.element_weights.size(); ++e) {
              double level = 0.0;
              for (std::size_t j : f.covered_by[e]) level = std::max(level, s[j]);
              total += f.element_weights[e] * level;
            }
            return total;
          },
      },
      form_);
}

bool ValuationFunction::depends_on(std::size_t j) const {
  if (j >= arity_) return false;
  return std::visit(
      overloaded{
          [&](const forms::Additive& f) { return f.weights[j] != 0.0; },
          [&](const forms::WeightedMax& f) { return f.weights[j] != 0.0; },
          [&](const forms::OwnSignalOnly& f) { return f.agent == j; },
          [&](const forms::SumPlusConstant& f) { return f.weights[j] != 0.0; },
          [&](const forms::IndicatorPower& f) { return f.watched == j; },
          [&](const forms::Product& f) {
            return std::find(f.indices.begin(), f.indices.end(), j) != f.indices.end();
          },
          [&](const forms::LookupTable& f) { return f.axes[j].size() > 1; },
          [&](const forms::CoverageSubmodular& f) {
            for (std::size_t e = 0; e < f.covered_by.size(); ++e) {
              if (f.element_weights[e] == 0.0) continue;
              const auto& c = f.covered_by[e];
              if (std::find(c.begin(), c.end(), j) != c.end()) return true;
            }
            return false;
          },
      },
      form_);
}

ValuationFunction ValuationFunction::extended_to(std::size_t arity) const {
  if (arity < arity_) throw InvalidInput("extended_to: cannot shrink a valuation");
  const std::size_t extra = arity - arity_;
  ValuationForm form = std::visit(
      overloaded{
          [&](forms::Additive f) -> ValuationForm {
            f.weights.resize(arity, 0.0);
            return f;
          },
          [&](forms::WeightedMax f) -> ValuationForm {
            f.weights.resize(arity, 0.0);
            return f;
          },
          [&](forms::SumPlusConstant f) -> ValuationForm {
            f.weights.resize(arity, 0.0);
            return f;
          },
          [&](forms::LookupTable f) -> ValuationForm {
            for (std::size_t k = 0; k < extra; ++k) f.axes.push_back({0.0});
            return f;
          },
          [&](auto f) -> ValuationForm { return f; },
      },
      form_);
  return {arity, std::move(form)};
}

double evaluate(const ValuationFunction& v, const SignalProfile& profile) { return v(profile); }

}  // namespace idv
