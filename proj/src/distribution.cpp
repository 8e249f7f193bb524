#include "idv/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "idv/error.hpp"
#include "idv/random.hpp"

namespace idv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kProbabilitySumTolerance = 1e-12;

void require_value(double v, const char* who) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string(who) + ": support values must be finite and non-negative");
  }
}

void require_probability(double p, const char* who) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInput(std::string(who) + ": probabilities must lie in [0, 1]");
  }
}

}  // namespace

SignalDistribution::SignalDistribution(DistributionKind kind) : kind_(std::move(kind)) {
  std::visit(overloaded{
                 [](const dists::PointMass& d) { require_value(d.value, "PointMass"); },
                 [](dists::FiniteSupport& d) {
                   if (d.atoms.empty()) throw InvalidInput("FiniteSupport: no atoms");
                   double total = 0.0;
                   for (const auto& a : d.atoms) {
                     require_value(a.value, "FiniteSupport");
                     require_probability(a.probability, "FiniteSupport");
                     total += a.probability;
                   }
                   if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
                     throw InvalidInput("FiniteSupport: probabilities must sum to 1");
                   }
                   double head = 0.0;
                   for (std::size_t k = 0; k + 1 < d.atoms.size(); ++k) {
                     head += d.atoms[k].probability;
                   }
                   d.atoms.back().probability = std::max(0.0, 1.0 - head);
                 },
                 [](const dists::Uniform& d) {
                   require_value(d.lo, "Uniform");
                   require_value(d.hi, "Uniform");
                   if (d.lo > d.hi) throw InvalidInput("Uniform: lo must not exceed hi");
                 },
                 [](const dists::TwoPoint& d) {
                   require_value(d.low, "TwoPoint");
                   require_value(d.high, "TwoPoint");
                   require_probability(d.p_high, "TwoPoint");
                 },
             },
             kind_);
}

SignalDistribution SignalDistribution::point_mass(double value) {
  return SignalDistribution(dists::PointMass{value});
}

SignalDistribution SignalDistribution::finite(std::vector<Atom> atoms) {
  return SignalDistribution(dists::FiniteSupport{std::move(atoms)});
}

SignalDistribution SignalDistribution::uniform(double lo, double hi) {
  return SignalDistribution(dists::Uniform{lo, hi});
}

SignalDistribution SignalDistribution::two_point(double low, double high, double p_high) {
  return SignalDistribution(dists::TwoPoint{low, high, p_high});
}

std::string_view SignalDistribution::kind_name() const {
  return std::visit(overloaded{
                        [](const dists::PointMass&) { return std::string_view("PointMass"); },
                        [](const dists::FiniteSupport&) {
                          return std::string_view("FiniteSupport");
                        },
                        [](const dists::Uniform&) { return std::string_view("Uniform"); },
                        [](const dists::TwoPoint&) { return std::string_view("TwoPoint"); },
                    },
                    kind_);
}

double SignalDistribution::sample(RandomSource& src) const {
  return std::visit(overloaded{
                        [](const dists::PointMass& d) { return d.value; },
                        [&](const dists::FiniteSupport& d) {
                          const double u = src.uniform01();
                          double acc = 0.0;
                          for (const auto& a : d.atoms) {
                            acc += a.probability;
                            if (u < acc) return a.value;
                          }
                          // u landed in the rounding gap above the cumulative sum.
                          for (auto it = d.atoms.rbegin(); it != d.atoms.rend(); ++it) {
                            if (it->probability > 0.0) return it->value;
                          }
                          return d.atoms.back().value;
                        },
                        [&](const dists::Uniform& d) {
                          return d.lo + (d.hi - d.lo) * src.uniform01();
                        },
                        [&](const dists::TwoPoint& d) {
                          return src.uniform01() < d.p_high ? d.high : d.low;
                        },
                    },
                    kind_);
}

std::optional<std::vector<Atom>> SignalDistribution::enumerate_support() const {
  return std::visit(
      overloaded{
          [](const dists::PointMass& d) -> std::optional<std::vector<Atom>> {
            return std::vector<Atom>{{d.value, 1.0}};
          },
          [](const dists::FiniteSupport& d) -> std::optional<std::vector<Atom>> {
            std::vector<Atom> out;
            for (const auto& a : d.atoms) {
              if (a.probability > 0.0) out.push_back(a);
            }
            return out;
          },
          [](const dists::Uniform&) -> std::optional<std::vector<Atom>> { return std::nullopt; },
          [](const dists::TwoPoint& d) -> std::optional<std::vector<Atom>> {
            std::vector<Atom> out;
            if (d.p_high < 1.0) out.push_back({d.low, 1.0 - d.p_high});
            if (d.p_high > 0.0) out.push_back({d.high, d.p_high});
            return out;
          },
      },
      kind_);
}

double SignalDistribution::mean() const {
  if (const auto* u = std::get_if<dists::Uniform>(&kind_)) return 0.5 * (u->lo + u->hi);
  double m = 0.0;
  const auto support = enumerate_support();
  for (const auto& a : *support) m += a.value * a.probability;
  return m;
}

double SignalDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("quantile: p must lie in [0, 1]");
  if (const auto* u = std::get_if<dists::Uniform>(&kind_)) return u->lo + p * (u->hi - u->lo);
  auto atoms = *enumerate_support();
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  double acc = 0.0;
  for (const auto& a : atoms) {
    acc += a.probability;
    if (acc >= p) return a.value;
  }
  return atoms.back().value;
}

double sample(const SignalDistribution& d, RandomSource& src) { return d.sample(src); }

std::optional<std::vector<Atom>> enumerate_support(const SignalDistribution& d) {
  return d.enumerate_support();
}

}  // namespace idv
