#include "idv/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "idv/error.hpp"
#include "idv/harness.hpp"
#include "idv/mechanisms.hpp"
#include "idv/oracles.hpp"
#include "idv/random.hpp"

namespace idv {

bool SuiteReport::passed() const {
  for (const auto& c : criteria) {
    if (!c.passed) return false;
  }
  return !criteria.empty();
}

Instance single_crossing_additive(std::size_t n, RandomSource& src) {
  std::vector<Agent> agents;
  for (std::size_t i = 0; i < n; ++i) {
    auto prior = random_prior(src);
    agents.push_back({ValuationFunction::additive(interdependent_weights(n, i, src)), prior});
  }
  return {std::move(agents), ArrivalModel::prophet, Temporality::myopic};
}

Instance crossing_violation_instance() {
  const auto coin = SignalDistribution::finite({{0.0, 0.5}, {1.0, 0.5}});
  std::vector<Agent> agents{
      {ValuationFunction::sum_plus_constant(2.0, {1.0, 0.0}), coin},
      {ValuationFunction::additive({4.0, 1.0}), coin},
  };
  return {std::move(agents), ArrivalModel::prophet, Temporality::myopic};
}

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Policy make_policy(RuleId rule, std::optional<Threshold> x = std::nullopt, std::size_t index = 0) {
  Policy p;
  p.rule = rule;
  p.threshold = x;
  p.fixed_index = index;
  return p;
}

Threshold exact_threshold(const Instance& inst) { return Threshold(exact_opt(inst).value / 2.0); }

// Exact E[f(s)] over the instance's signal atoms.
double exact_moment(const Instance& inst, const std::function<double(const SignalProfile&)>& f) {
  const ProfileSpace space(inst);
  double m = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) m += space.probability(i) * f(space.profile(i));
  return m;
}

struct Check {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

CriterionResult farsighted_gap(const SuiteOptions& opt) {
  Check c;
  const std::size_t n = 16;
  const std::size_t trials = 100'000;
  const auto inst = thm31_instance(n);
  const double e_opt = exact_opt(inst, opt.workers).value;
  c.require(std::abs(e_opt - 8.5) <= 1e-12 && thm31_expected_opt(n) == 8.5, "E[OPT] = 8.5");

  // One Monte Carlo pass scores every fixed index and the benchmark on the
  // same draws (trial t uses the evaluation stream derived with child t).
  std::vector<MeanAccumulator> acc(n + 1);
  const auto order = ArrivalOrder::identity(n);
  for (std::size_t t = 0; t < trials; ++t) {
    RandomSource src = RandomSource(opt.seed, streams::kEvaluation).derive(t);
    const auto s = inst.draw_signals(src);
    for (std::size_t i = 0; i < n; ++i) {
      acc[i].add(fixed_index_policy(inst, i, s, order).farsighted_welfare);
    }
    acc[n].add(benchmark_value(inst, s));
  }

  // Payoffs are 2^(i+1) with probability 2^-(i+1): sample variances of rare
  // large payoffs are unreliable, so the z-scores use the exact variance.
  auto z_score = [&](const MeanAccumulator& a, double mean,
                     const std::function<double(const SignalProfile&)>& f) {
    const double second = exact_moment(inst, [&](const SignalProfile& s) {
      const double x = f(s);
      return x * x;
    });
    const double se = std::sqrt((second - mean * mean) / static_cast<double>(trials));
    return std::abs(a.mean() - mean) / se;
  };

  double worst_exact = 0.0;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = exact_alg(make_policy(RuleId::fixed, std::nullopt, i), inst, opt.workers).value;
    worst_exact = std::max(worst_exact, std::abs(v - 1.0));
    const double z = z_score(acc[i], v, [&](const SignalProfile& s) { return inst.valuation(i)(s); });
    worst_z = std::max(worst_z, z);
    c.require(z <= 3.0, "Monte Carlo agrees for index " + std::to_string(i));
  }
  const double oz = z_score(acc[n], e_opt, [&](const SignalProfile& s) { return benchmark_value(inst, s); });
  c.require(oz <= 3.0, "Monte Carlo E[OPT] agrees");
  c.require(worst_exact <= 1e-12, "every fixed index has exact value 1");
  c.detail << "E[OPT]=" << num(e_opt) << " max|fixed-1|=" << num(worst_exact)
           << " max MC z=" << num(worst_z) << " MC E[OPT]=" << num(acc[n].mean()) << " (z="
           << num(oz) << ")";
  return {1, "farsighted gap", c.ok, c.detail.str(), 0.0, 5.0};
}

CriterionResult product_instance(const SuiteOptions& opt) {
  Check c;
  const auto inst = prop32_instance(10);
  bool all_one = true;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto r = exact_alg(make_policy(RuleId::fixed, std::nullopt, i), inst, opt.workers);
    all_one = all_one && r.value == 1.0 && r.atoms == 1024;
  }
  c.require(all_one, "every fixed index has exact value 1 over 1024 profiles");
  const double opt10 = exact_opt(inst, opt.workers).value;
  const double opt5 = exact_opt(prop32_instance(5), opt.workers).value;
  c.require(opt10 > opt5, "E[OPT] grows with n");
  c.detail << "fixed values all 1: " << (all_one ? "yes" : "no") << " E[OPT](5)=" << num(opt5)
           << " E[OPT](10)=" << num(opt10);
  return {2, "myopic product instance", c.ok, c.detail.str(), 0.0, 5.0};
}

CriterionResult counterexample(const SuiteOptions& opt) {
  Check c;
  const auto inst = threshold_counterexample_instance(50, 0.01);
  const auto x = exact_threshold(inst);
  const double e_opt = exact_opt(inst, opt.workers).value;
  const double naive = exact_alg(make_policy(RuleId::naive, x), inst, opt.workers).value;
  const double algo1 = exact_alg(make_policy(RuleId::algo1, x), inst, opt.workers).value;
  const double r_naive = e_opt / naive;
  const double r_algo1 = e_opt / algo1;
  c.require(r_naive >= 10.0, "naive ratio >= 10");
  c.require(r_algo1 <= 4.0, "look-ahead ratio <= 4");
  c.detail << "X=" << num(x.value()) << " E[OPT]=" << num(e_opt) << " naive ratio=" << num(r_naive)
           << " algo1 ratio=" << num(r_algo1);
  return {3, "plain threshold counterexample", c.ok, c.detail.str(), 0.0, 1.0};
}

CriterionResult stopping_time(const SuiteOptions& opt) {
  Check c;
  std::vector<double> s;
  for (int i = 1; i <= 10; ++i) s.push_back(i);
  const auto inst = own_signal_secretary(s);
  RandomSource src(opt.seed, streams::kEvaluation);
  const auto pmf = stopping_time_pmf(inst, 3, 100'000, src);
  double worst_z = 0.0;
  double mass = pmf.empirical_none;
  for (std::size_t t = 1; t <= 10; ++t) mass += pmf.empirical[t];
  for (std::size_t t = 4; t <= 10; ++t) {
    const double z = std::abs(pmf.empirical[t] - pmf.theoretical[t]) / pmf.stderr_of(pmf.theoretical[t]);
    worst_z = std::max(worst_z, z);
    c.require(z <= 3.0, "Pr[T=" + std::to_string(t) + "]");
  }
  const double zn = std::abs(pmf.empirical_none - 0.3) / pmf.stderr_of(0.3);
  worst_z = std::max(worst_z, zn);
  c.require(zn <= 3.0, "Pr[none]");
  const Fraction total = stopping_time_mass(10, 3);
  c.require(total == Fraction{1, 1}, "telescoping identity");
  c.require(std::abs(mass - 1.0) <= 1e-12, "empirical mass sums to 1");
  c.detail << "max z=" << num(worst_z) << " Pr[none]=" << num(pmf.empirical_none)
           << " identity=" << total.num << "/" << total.den;
  return {4, "stopping-time distribution", c.ok, c.detail.str(), 0.0, 10.0};
}

CriterionResult bounds(const SuiteOptions& opt) {
  Check c;
  constexpr double kE = 2.718281828459045;
  RandomSource src(opt.seed, streams::kSuite);
  std::map<std::string, double> worst;
  std::map<std::string, std::size_t> count;
  TrialOptions to;
  to.trials = 10'000;
  to.seed = opt.seed;
  to.workers = opt.workers;
  auto record = [&](const std::string& name, const RatioEstimate& r, double bound) {
    worst[name] = std::max(worst[name], r.ratio_of_means);
    ++count[name];
    c.require(r.within_bound(bound), name + " ratio " + num(r.ratio_of_means) + " > " + num(bound));
  };
  for (std::size_t n = 4; n <= 10; ++n) {
    for (const auto& inst : random_suite(n, SuiteFamily::subadditive, 5, src)) {
      const auto x = exact_threshold(inst);
      record("algo1", run_trials(make_policy(RuleId::algo1, x), inst, to).estimate, 4.0);
      auto exact_coin = to;
      exact_coin.coin = CoinMode::exact;
      record("mech2", run_trials(make_policy(RuleId::mech2, x), inst, exact_coin).estimate, 8.0);
    }
    for (const auto& inst :
         random_suite(n, SuiteFamily::subadditive, 5, src, ArrivalModel::secretary)) {
      record("algo3", run_trials(make_policy(RuleId::algo3), inst, to).estimate, 2.0 * kE);
      record("mech4", run_trials(make_policy(RuleId::mech4), inst, to).estimate, 4.0 * kE);
    }
    for (const auto& inst :
         random_suite(n, SuiteFamily::submodular, 5, src, ArrivalModel::secretary)) {
      c.require(certify_submodular(inst), "submodular suite member certifies");
      record("algo5", run_trials(make_policy(RuleId::algo5), inst, to).estimate, 4.0);
    }
  }
  for (const auto& [name, w] : worst) {
    c.detail << name << " max ratio=" << num(w) << " over " << count[name] << "; ";
  }
  return {5, "approximation bounds", c.ok, c.detail.str(), 0.0, 120.0};
}

CriterionResult recovery(const SuiteOptions& opt) {
  Check c;
  const std::size_t big_n = 200;
  const std::size_t k = algo3_skip(big_n);
  for (std::size_t m : {std::size_t{1}, std::size_t{10}, big_n}) {
    GeneratorSpec g;
    g.name = "single_max";
    g.n = big_n;
    g.distinct = m;
    const auto inst = generate_instance(g);
    TrialOptions to;
    to.trials = 100'000;
    to.seed = opt.seed;
    to.workers = opt.workers;
    to.keep_records = true;
    const auto run = run_trials(make_policy(RuleId::algo3), inst, to);
    std::size_t hits = 0;
    for (const auto& r : run.records) hits += r.outcome.winner == m - 1 ? 1 : 0;
    const double p = static_cast<double>(hits) / static_cast<double>(to.trials);
    const double ref = padded_secretary_success(m, big_n, k);
    c.require(std::abs(p - ref) <= 0.01, "success with " + std::to_string(m) + " positive agents");
    c.detail << "m=" << m << " success=" << num(p) << " oracle=" << num(ref) << "; ";
  }
  c.detail << "classic 1/e reference=" << num(classic_secretary_success(big_n, k)) << "; ";

  RandomSource src(opt.seed, streams::kSuite);
  double worst = 0.0;
  for (std::size_t n = 4; n <= 10; ++n) {
    for (const auto& inst : random_suite(n, SuiteFamily::own_signal, 3, src)) {
      TrialOptions to;
      to.trials = 10'000;
      to.seed = opt.seed;
      to.workers = opt.workers;
      const auto r = run_trials(make_policy(RuleId::algo1, exact_threshold(inst)), inst, to).estimate;
      worst = std::max(worst, r.ratio_of_means);
      c.require(r.within_bound(2.0), "own-signal prophet ratio <= 2");
    }
  }
  c.detail << "own-signal algo1 max ratio=" << num(worst);
  return {6, "classic ratio recovery", c.ok, c.detail.str(), 0.0, 30.0};
}

CriterionResult epic(const SuiteOptions& opt) {
  Check c;
  RandomSource src(opt.seed, streams::kSuite);
  std::size_t triples = 0;
  std::size_t checks = 0;
  auto run = [&](const Mechanism& m, const Instance& inst, bool expect_pass) {
    const auto rep = epic_check(m, inst);
    triples += rep.triples;
    ++checks;
    c.require(rep.passed == expect_pass, m.name() + (expect_pass ? " passes" : " fails"));
    if (rep.passed) c.require(rep.min_truthful_utility >= -kEpicTolerance, "ex-post IR");
    return rep;
  };
  for (std::size_t n : {3, 4}) {
    for (const auto& inst : random_suite(n, SuiteFamily::subadditive, 3, src)) {
      run({make_policy(RuleId::mech2, exact_threshold(inst)), PaymentRule::posted_price_x}, inst,
          true);
    }
    for (int rep = 0; rep < 3; ++rep) {
      const auto inst = single_crossing_additive(n, src);
      run({make_policy(RuleId::algo1, exact_threshold(inst)), PaymentRule::corollary33}, inst, true);
    }
    for (const auto& inst : random_suite(n, SuiteFamily::own_signal, 2, src)) {
      run({make_policy(RuleId::algo1, exact_threshold(inst)), PaymentRule::corollary33}, inst, true);
    }
  }
  std::vector<Instance> secretary = random_suite(4, SuiteFamily::subadditive, 3, src,
                                                 ArrivalModel::secretary);
  secretary.push_back(own_signal_secretary({1.0, 3.0, 2.0, 0.0}));
  secretary.push_back(own_signal_secretary({2.0, 2.0, 1.0, 3.0}));
  for (const auto& inst : secretary) {
    run({make_policy(RuleId::mech4), PaymentRule::corollary43_myopic}, inst, true);
    run({make_policy(RuleId::mech4), PaymentRule::corollary43_farsighted},
        inst.with_temporality(Temporality::farsighted), true);
  }

  const auto bad = crossing_violation_instance();
  const auto x = exact_threshold(bad);
  const auto mono =
      allocation_monotonicity_check(make_policy(RuleId::algo1, x), bad, 0, default_check_grid(bad));
  c.require(!mono.passed, "allocation check fails without single crossing");
  const auto rep = run({make_policy(RuleId::algo1, x), PaymentRule::corollary33}, bad, false);
  c.detail << checks << " checks, " << triples << " deviations; crossing violation: allocation "
           << (mono.passed ? "monotone" : "non-monotone");
  if (rep.witness) {
    c.detail << ", agent " << rep.witness->agent << " gains " << num(rep.witness->gap)
             << " reporting " << num(rep.witness->reported_signal) << " for "
             << num(rep.witness->true_signal);
  }
  return {7, "ex-post incentive compatibility", c.ok, c.detail.str(), 0.0, 60.0};
}

CriterionResult sampling_bound(const SuiteOptions& opt) {
  Check c;
  RandomSource src(opt.seed, streams::kChecker);
  const std::size_t n = 8;
  const SignalProfile s({1.0, 2.0, 0.5, 3.0, 1.5, 2.5, 1.0, 4.0});
  double min_slack = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<double> weights;
    std::vector<std::vector<std::size_t>> covers;
    for (std::size_t e = 0; e < 12; ++e) {
      weights.push_back(1.0 + static_cast<double>(src.uniform_index(8)) / 4.0);
      std::vector<std::size_t> cover;
      for (std::size_t j = 0; j < n; ++j) {
        if (src.bernoulli(0.35)) cover.push_back(j);
      }
      covers.push_back(cover);
    }
    const auto v = ValuationFunction::coverage(n, weights, covers);
    for (std::size_t k = 1; k <= n; ++k) {
      const auto r = sampling_bound_check(v, s, k, 0, src);
      c.require(r.exhaustive && r.passed, "coverage bound at k=" + std::to_string(k));
      min_slack = std::min(min_slack, r.mean - r.bound);
    }
  }
  const auto add = ValuationFunction::additive({1, 2, 3, 4, 5, 6, 7, 8});
  double worst_gap = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto r = sampling_bound_check(add, s, k, 0, src);
    worst_gap = std::max(worst_gap, std::abs(r.mean - r.bound));
    c.require(r.exhaustive && r.passed, "additive bound at k=" + std::to_string(k));
  }
  c.require(worst_gap <= 1e-12 * add(s), "additive equality");
  c.detail << "coverage min slack=" << num(min_slack) << " additive max gap=" << num(worst_gap);
  return {8, "sampling bound", c.ok, c.detail.str(), 0.0, 5.0};
}

CriterionResult oracle_equivalence(const SuiteOptions& opt) {
  Check c;
  RandomSource src(opt.seed, streams::kSuite);
  std::vector<Instance> prophet;
  std::vector<Instance> secretary;
  for (std::size_t n : {3, 4, 5, 6, 5}) prophet.push_back(random_suite(n, SuiteFamily::subadditive, 1, src).front());
  for (std::size_t n : {4, 5, 6}) {
    secretary.push_back(random_suite(n, SuiteFamily::subadditive, 1, src, ArrivalModel::secretary).front());
  }
  for (std::size_t n : {5, 6}) {
    secretary.push_back(random_suite(n, SuiteFamily::submodular, 1, src, ArrivalModel::secretary).front());
  }
  std::size_t compared = 0;
  double worst_z = 0.0;
  auto compare = [&](const Policy& p, const Instance& inst) {
    TrialOptions to;
    to.trials = 100'000;
    to.seed = opt.seed;
    to.workers = opt.workers;
    to.coin = CoinMode::sampled;
    const auto mc = run_trials(p, inst, to).estimate;
    const double exact = exact_alg(p, inst, opt.workers).value;
    const double diff = std::abs(mc.alg_mean - exact);
    ++compared;
    if (mc.alg_stderr == 0.0) {
      c.require(diff <= 1e-9, p.name() + " deterministic value");
      return;
    }
    worst_z = std::max(worst_z, diff / mc.alg_stderr);
    c.require(diff <= 3.0 * mc.alg_stderr, p.name() + " on n=" + std::to_string(inst.size()));
  };
  for (const auto& inst : prophet) {
    const auto x = exact_threshold(inst);
    for (RuleId r : {RuleId::algo1, RuleId::mech2, RuleId::naive}) compare(make_policy(r, x), inst);
    compare(make_policy(RuleId::fixed, std::nullopt, inst.size() / 2), inst);
  }
  for (const auto& inst : secretary) {
    for (RuleId r : {RuleId::algo3, RuleId::mech4}) compare(make_policy(r), inst);
    compare(make_policy(RuleId::fixed, std::nullopt, 1), inst);
    if (certify_submodular(inst)) compare(make_policy(RuleId::algo5), inst);
  }
  c.detail << compared << " comparisons, max z=" << num(worst_z);
  return {9, "oracle equivalence", c.ok, c.detail.str(), 0.0, 60.0};
}

using CriterionFn = CriterionResult (*)(const SuiteOptions&);

const std::vector<std::pair<std::string, CriterionFn>>& registry() {
  static const std::vector<std::pair<std::string, CriterionFn>> r{
      {"farsighted-gap", farsighted_gap},
      {"product-instance", product_instance},
      {"counterexample", counterexample},
      {"stopping-time", stopping_time},
      {"bounds", bounds},
      {"recovery", recovery},
      {"epic", epic},
      {"sampling-bound", sampling_bound},
      {"oracle-equivalence", oracle_equivalence},
  };
  return r;
}

CriterionResult timed(const std::string& name, CriterionFn fn, const SuiteOptions& opt,
                      int id) {
  const auto start = Clock::now();
  CriterionResult r;
  try {
    r = fn(opt);
  } catch (const std::exception& e) {
    r.id = id;
    r.name = name;
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (r.limit_seconds > 0.0 && r.seconds >= r.limit_seconds) {
    r.passed = false;
    r.detail += " [over time limit " + num(r.limit_seconds) + "s]";
  }
  return r;
}

}  // namespace

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    v.push_back("all");
    return v;
  }();
  return ids;
}

SuiteReport acceptance_suite(std::string_view id, const SuiteOptions& options) {
  SuiteReport report;
  report.suite = std::string(id);
  const auto& reg = registry();
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (id == "all" || id == reg[i].first) {
      report.criteria.push_back(timed(reg[i].first, reg[i].second, options, static_cast<int>(i + 1)));
    }
  }
  if (report.criteria.empty()) throw InvalidInput("unknown suite: " + std::string(id));
  return report;
}

std::string format_line(const CriterionResult& c) {
  std::ostringstream os;
  os << (c.passed ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << " (" << num(c.seconds)
     << "s): " << c.detail;
  return os.str();
}

Json to_json(const SuiteReport& report) {
  Json rows = Json::array();
  for (const auto& c : report.criteria) {
    rows.push_back({{"id", c.id},
                    {"name", c.name},
                    {"passed", c.passed},
                    {"detail", c.detail},
                    {"seconds", c.seconds},
                    {"limit_seconds", c.limit_seconds}});
  }
  return {{"suite", report.suite}, {"passed", report.passed()}, {"criteria", rows}};
}

}  // namespace idv
