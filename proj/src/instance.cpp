#include "idv/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "idv/error.hpp"
#include "idv/random.hpp"

namespace idv {

std::string_view to_string(ArrivalModel m) {
  return m == ArrivalModel::prophet ? "prophet" : "secretary";
}

std::string_view to_string(Temporality t) {
  return t == Temporality::myopic ? "myopic" : "farsighted";
}

ArrivalModel parse_arrival_model(std::string_view s) {
  if (s == "prophet") return ArrivalModel::prophet;
  if (s == "secretary") return ArrivalModel::secretary;
  throw InvalidInput("unknown arrival model '" + std::string(s) + "'");
}

Temporality parse_temporality(std::string_view s) {
  if (s == "myopic") return Temporality::myopic;
  if (s == "farsighted") return Temporality::farsighted;
  throw InvalidInput("unknown temporality '" + std::string(s) + "'");
}

Instance::Instance(std::vector<Agent> agents, ArrivalModel model, Temporality temporality)
    : agents_(std::move(agents)), model_(model), temporality_(temporality) {
  if (agents_.empty()) throw InvalidInput("instance needs at least one agent");
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i].valuation.arity() != agents_.size()) {
      throw InvalidInput("agent " + std::to_string(i) + ": valuation arity " +
                         std::to_string(agents_[i].valuation.arity()) + " != instance size " +
                         std::to_string(agents_.size()));
    }
    if (model_ == ArrivalModel::secretary && !agents_[i].signal.is_point_mass()) {
      throw InvalidInput("secretary instances carry fixed signals (PointMass); agent " +
                         std::to_string(i) + " has " + std::string(agents_[i].signal.kind_name()));
    }
    for (std::size_t j = 0; j < agents_.size() && own_signal_values_; ++j) {
      own_signal_values_ = j == i || !agents_[i].valuation.depends_on(j);
    }
  }
}

std::vector<ValuationFunction> Instance::valuations() const {
  std::vector<ValuationFunction> out;
  out.reserve(agents_.size());
  for (const auto& a : agents_) out.push_back(a.valuation);
  return out;
}

SignalProfile Instance::fixed_signals() const {
  if (!is_secretary()) throw InvalidInput("fixed_signals: not a secretary instance");
  std::vector<double> s;
  s.reserve(agents_.size());
  for (const auto& a : agents_) s.push_back(std::get<dists::PointMass>(a.signal.kind()).value);
  return SignalProfile(std::move(s));
}

SignalProfile Instance::draw_signals(RandomSource& src) const {
  std::vector<double> s;
  s.reserve(agents_.size());
  for (const auto& a : agents_) s.push_back(a.signal.sample(src));
  return SignalProfile(std::move(s));
}

bool Instance::all_supports_finite() const {
  return std::all_of(agents_.begin(), agents_.end(),
                     [](const Agent& a) { return a.signal.has_finite_support(); });
}

Instance Instance::with_temporality(Temporality t) const { return {agents_, model_, t}; }

Instance Instance::with_signals(const SignalProfile& fixed) const {
  if (fixed.size() != agents_.size()) throw InvalidInput("with_signals: length mismatch");
  auto agents = agents_;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    agents[i].signal = SignalDistribution::point_mass(fixed[i]);
  }
  return {std::move(agents), ArrivalModel::secretary, temporality_};
}

ArrivalOrder::ArrivalOrder(std::vector<std::size_t> order) : order_(std::move(order)) {
  time_of_.assign(order_.size(), order_.size());
  for (std::size_t t = 0; t < order_.size(); ++t) {
    const std::size_t a = order_[t];
    if (a >= order_.size() || time_of_[a] != order_.size()) {
      throw InvalidInput("arrival order is not a permutation of 0..n-1");
    }
    time_of_[a] = t;
  }
}

ArrivalOrder ArrivalOrder::identity(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return ArrivalOrder(std::move(p));
}

ArrivalOrder ArrivalOrder::random(std::size_t n, RandomSource& src) {
  return ArrivalOrder(src.permutation(n));
}

Instance thm31_instance(std::size_t n) {
  if (n < 2) throw InvalidInput("thm31_instance: n must be at least 2");
  std::vector<Agent> agents;
  for (std::size_t i = 0; i < n; ++i) {
    auto signal = i + 1 == n ? SignalDistribution::uniform(0.0, 1.0)
                             : SignalDistribution::point_mass(0.0);
    agents.push_back({ValuationFunction::indicator_power(static_cast<int>(i + 1), n), signal});
  }
  return {std::move(agents), ArrivalModel::prophet, Temporality::farsighted};
}

Instance prop32_instance(std::size_t n) {
  if (n < 2) throw InvalidInput("prop32_instance: n must be at least 2");
  std::vector<Agent> agents;
  std::vector<std::size_t> prefix;
  for (std::size_t i = 0; i < n; ++i) {
    prefix.push_back(i);
    agents.push_back({ValuationFunction::product(prefix, n),
                      SignalDistribution::two_point(0.0, 2.0, 0.5)});
  }
  return {std::move(agents), ArrivalModel::prophet, Temporality::myopic};
}

Instance threshold_counterexample_instance(std::size_t n, double eps) {
  if (n < 2) throw InvalidInput("threshold_counterexample_instance: n must be at least 2");
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InvalidInput("threshold_counterexample_instance: eps must lie in (0, 1)");
  }
  std::vector<double> unit(n, 0.0);
  unit[0] = 1.0;
  std::vector<double> scaled(n, 0.0);
  scaled[0] = static_cast<double>(n);
  std::vector<Agent> agents;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = i + 1 < n ? ValuationFunction::sum_plus_constant(1.0, unit)
                       : ValuationFunction::additive(scaled);
    auto signal = i == 0 ? SignalDistribution::two_point(0.0, 1.0 / eps, eps)
                         : SignalDistribution::point_mass(0.0);
    agents.push_back({std::move(v), signal});
  }
  return {std::move(agents), ArrivalModel::prophet, Temporality::myopic};
}

Instance own_signal_secretary(const std::vector<double>& signals, Temporality temporality) {
  const std::size_t n = signals.size();
  std::vector<Agent> agents;
  for (std::size_t i = 0; i < n; ++i) {
    agents.push_back({ValuationFunction::own_signal(i, n),
                      SignalDistribution::point_mass(signals[i])});
  }
  return {std::move(agents), ArrivalModel::secretary, temporality};
}

std::string_view to_string(SuiteFamily f) {
  switch (f) {
    case SuiteFamily::subadditive: return "subadditive";
    case SuiteFamily::submodular: return "submodular";
    case SuiteFamily::own_signal: return "own-signal";
  }
  return "?";
}

SuiteFamily parse_suite_family(std::string_view s) {
  if (s == "subadditive") return SuiteFamily::subadditive;
  if (s == "submodular") return SuiteFamily::submodular;
  if (s == "own-signal" || s == "own_signal") return SuiteFamily::own_signal;
  throw InvalidInput("unknown suite family '" + std::string(s) + "'");
}

namespace {

double eighths(RandomSource& src, int lo, int hi) {
  return static_cast<double>(lo + static_cast<int>(src.uniform_index(hi - lo + 1))) / 8.0;
}

}  // namespace

SignalDistribution random_prior(RandomSource& src) {
  const std::size_t atoms = 2 + src.uniform_index(2);
  std::vector<double> values;
  while (values.size() < atoms) {
    const double v = static_cast<double>(src.uniform_index(9)) / 2.0;  // {0, 0.5, ..., 4}
    if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
  }
  std::sort(values.begin(), values.end());
  std::vector<double> weights(atoms);
  double total = 0.0;
  for (auto& w : weights) total += (w = 1.0 + static_cast<double>(src.uniform_index(4)));
  std::vector<Atom> out;
  for (std::size_t k = 0; k < atoms; ++k) out.push_back({values[k], weights[k] / total});
  return SignalDistribution::finite(std::move(out));
}

// Own coordinate weighted in [1, 2], each other coordinate present with
// probability 1/2 and weighted in [1/8, 1].
std::vector<double> interdependent_weights(std::size_t n, std::size_t own, RandomSource& src) {
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == own) {
      w[j] = eighths(src, 8, 16);
    } else if (src.bernoulli(0.5)) {
      w[j] = eighths(src, 1, 8);
    }
  }
  return w;
}

namespace {

// Multiples of 1/8 keep most sums exact in binary floating point.
ValuationFunction random_coverage(std::size_t n, std::size_t own, RandomSource& src) {
  const std::size_t elements = n + 2;
  std::vector<double> weights;
  std::vector<std::vector<std::size_t>> covers;
  for (std::size_t e = 0; e < elements; ++e) {
    weights.push_back(eighths(src, 2, 12));
    std::vector<std::size_t> cover;
    for (std::size_t j = 0; j < n; ++j) {
      if (src.bernoulli(j == own ? 0.6 : 0.3)) cover.push_back(j);
    }
    covers.push_back(std::move(cover));
  }
  return ValuationFunction::coverage(n, std::move(weights), std::move(covers));
}

// Max of two additive clauses tabulated on the prior supports: subadditive
// (XOS) but in general not submodular.
ValuationFunction random_xos_table(std::size_t n, std::size_t own,
                                   const std::vector<SignalDistribution>& priors,
                                   RandomSource& src) {
  std::vector<std::vector<double>> axes;
  for (const auto& d : priors) {
    std::vector<double> axis{0.0};
    const auto support = d.enumerate_support();
    for (const auto& a : *support) axis.push_back(a.value);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    axes.push_back(std::move(axis));
  }
  const auto c1 = interdependent_weights(n, own, src);
  const auto c2 = interdependent_weights(n, own, src);
  const SignalGrid grid(axes);
  std::vector<double> values;
  grid.for_each_point([&](const auto&, const SignalProfile& p) {
    double a = 0.0;
    double b = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      a += c1[j] * p[j];
      b += c2[j] * p[j];
    }
    values.push_back(std::max(a, b));
  });
  return ValuationFunction::lookup_table(std::move(axes), std::move(values));
}

constexpr std::size_t kMaxTableArity = 6;

}  // namespace

std::vector<Instance> random_suite(std::size_t n, SuiteFamily family, std::size_t count,
                                   RandomSource& src, ArrivalModel model) {
  if (n < 1) throw InvalidInput("random_suite: n must be positive");
  if (count < 1) throw InvalidInput("random_suite: count must be positive");
  std::vector<Instance> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<SignalDistribution> priors;
    for (std::size_t i = 0; i < n; ++i) priors.push_back(random_prior(src));
    std::vector<Agent> agents;
    for (std::size_t i = 0; i < n; ++i) {
      ValuationFunction v = ValuationFunction::own_signal(i, n);
      if (family == SuiteFamily::submodular) {
        switch (src.uniform_index(3)) {
          case 0: v = ValuationFunction::additive(interdependent_weights(n, i, src)); break;
          case 1: v = ValuationFunction::weighted_max(interdependent_weights(n, i, src)); break;
          default: v = random_coverage(n, i, src); break;
        }
      } else if (family == SuiteFamily::subadditive) {
        const std::uint64_t kinds = n <= kMaxTableArity ? 5 : 4;
        switch (src.uniform_index(kinds)) {
          case 0: v = ValuationFunction::additive(interdependent_weights(n, i, src)); break;
          case 1: v = ValuationFunction::weighted_max(interdependent_weights(n, i, src)); break;
          case 2:
            v = ValuationFunction::sum_plus_constant(eighths(src, 0, 8),
                                                     interdependent_weights(n, i, src));
            break;
          case 3: v = random_coverage(n, i, src); break;
          default: v = random_xos_table(n, i, priors, src); break;
        }
      }
      agents.push_back({std::move(v), priors[i]});
    }
    Instance inst(std::move(agents), ArrivalModel::prophet, Temporality::myopic);
    if (model == ArrivalModel::secretary) inst = inst.with_signals(inst.draw_signals(src));
    out.push_back(std::move(inst));
  }
  return out;
}

Instance pad_with_dummies(const Instance& inst, std::size_t extra) {
  if (!inst.is_secretary()) {
    throw Unsupported("pad_with_dummies: dummy padding applies to secretary instances only");
  }
  if (extra == 0) return inst;
  const std::size_t n = inst.size() + extra;
  std::vector<Agent> agents;
  agents.reserve(n);
  for (const auto& a : inst.agents()) agents.push_back({a.valuation.extended_to(n), a.signal});
  for (std::size_t k = 0; k < extra; ++k) {
    agents.push_back({ValuationFunction::zero(n), SignalDistribution::point_mass(0.0)});
  }
  return {std::move(agents), inst.model(), inst.temporality()};
}

SignalGrid default_check_grid(const Instance& inst, std::size_t quantiles) {
  std::vector<std::vector<double>> axes;
  for (const auto& a : inst.agents()) {
    std::vector<double> axis{0.0};
    if (auto support = a.signal.enumerate_support()) {
      for (const auto& atom : *support) axis.push_back(atom.value);
    } else {
      for (std::size_t q = 1; q <= quantiles; ++q) {
        axis.push_back(a.signal.quantile(static_cast<double>(q) / static_cast<double>(quantiles)));
      }
    }
    axes.push_back(std::move(axis));
  }
  return SignalGrid(std::move(axes));
}

}  // namespace idv
