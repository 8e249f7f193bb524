#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "idv/error.hpp"
#include "idv/harness.hpp"
#include "idv/random.hpp"

using namespace idv;

namespace {

Policy with_x(RuleId r, double x) { return Policy{r, Threshold(x), 0, SubmodularCheck::off}; }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "idv_harness_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Json base_config() {
  return Json{{"instance", {{"generator", {{"name", "prop32"}, {"n", 4}}}}},
              {"rule", "fixed"},
              {"fixed_index", 1},
              {"trials", 100}};
}

}  // namespace

TEST(MeanAccumulator, MergeIsAssociativeAndStderrMatchesDirectFormula) {
  RandomSource src(51, 1);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = src.uniform01() * 10;
  MeanAccumulator all, a, b;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.add(xs[i]);
    (i < 300 ? a : b).add(xs[i]);
  }
  a += b;
  EXPECT_EQ(a.count, all.count);
  EXPECT_NEAR(a.mean(), all.mean(), 1e-12);
  double m = 0;
  for (double x : xs) m += x;
  m /= xs.size();
  double var = 0;
  for (double x : xs) var += (x - m) * (x - m);
  var /= xs.size() - 1;
  EXPECT_NEAR(all.standard_error(), std::sqrt(var / xs.size()), 1e-10);
  MeanAccumulator one;
  one.add(3);
  EXPECT_EQ(one.standard_error(), 0.0);
}

TEST(RatioEstimate, WithinBoundUsesThreeStandardErrors) {
  RatioEstimate r;
  r.alg_mean = 1.0;
  r.alg_stderr = 0.1;
  r.opt_mean = 4.0;
  r.opt_stderr = 0.1;
  EXPECT_TRUE(r.within_bound(2.9));   // 3.7 <= 2.9 * 1.3
  EXPECT_FALSE(r.within_bound(2.8));  // 3.7 >  3.64
  const auto j = to_json(r);
  EXPECT_EQ(j["alg_mean"], 1.0);
  EXPECT_TRUE(j.contains("ratio_of_means"));
}

TEST(Generators, NamedInstances) {
  GeneratorSpec g;
  g.name = "single_max";
  g.n = 6;
  g.distinct = 2;
  const auto inst = generate_instance(g);
  EXPECT_EQ(inst.fixed_signals(), (SignalProfile{1, 2, 0, 0, 0, 0}));
  g.distinct = 7;
  EXPECT_THROW(generate_instance(g), InvalidInput);
  g.name = "quantum";
  EXPECT_THROW(generate_instance(g), InvalidInput);
  const auto from_json = generator_from_json(
      Json{{"name", "random"}, {"n", 3}, {"seed", 9}, {"index", 2}, {"model", "secretary"},
           {"temporality", "farsighted"}});
  const auto r = generate_instance(from_json);
  EXPECT_TRUE(r.is_secretary());
  EXPECT_EQ(r.temporality(), Temporality::farsighted);
  EXPECT_EQ(instance_hash(r), instance_hash(generate_instance(from_json)));
}

TEST(Config, ParsesAndResolvesRelativePaths) {
  auto j = base_config();
  j["output"] = {{"csv", "out/a.csv"}};
  const auto cfg = config_from_json(j, "/tmp/base");
  EXPECT_EQ(cfg.rule, RuleId::fixed);
  EXPECT_EQ(cfg.fixed_index, 1u);
  EXPECT_EQ(*cfg.csv_out, std::filesystem::path("/tmp/base/out/a.csv"));
  EXPECT_EQ(cfg.coin, CoinMode::sampled);
}

TEST(Config, RejectsInvalidConfigs) {
  auto both = base_config();
  both["instance"]["file"] = "x.json";
  EXPECT_THROW(config_from_json(both), InvalidInput);
  auto none = base_config();
  none["instance"] = Json::object();
  EXPECT_THROW(config_from_json(none), InvalidInput);
  auto zero = base_config();
  zero["trials"] = 0;
  EXPECT_THROW(config_from_json(zero), InvalidInput);
  auto rule = base_config();
  rule["rule"] = "oracle";
  EXPECT_THROW(config_from_json(rule), InvalidInput);
  auto coin = base_config();
  coin["coin"] = "fair";
  EXPECT_THROW(config_from_json(coin), InvalidInput);
  auto cal = base_config();
  cal["rule"] = "algo1";
  cal["calibration_trials"] = 0;
  EXPECT_THROW(config_from_json(cal), InvalidInput);
  auto type = base_config();
  type["trials"] = "many";
  EXPECT_THROW(config_from_json(type), InvalidInput);
  EXPECT_THROW(config_from_json(Json::object()), InvalidInput);
}

TEST(Calibration, HardnessInstanceIsExact) {
  RandomSource src(52, streams::kCalibration);
  for (std::size_t n : {2, 4, 9}) {
    const auto c = calibrate_threshold(thm31_instance(n), 10, src);
    EXPECT_TRUE(c.is_exact);
    EXPECT_DOUBLE_EQ(c.threshold.value(), (n + 1) / 4.0);
  }
}

TEST(Calibration, UniformOwnSignalMatchesOrderStatistic) {
  // E[max of n Uniform(0,1)] = n / (n + 1)
  const std::size_t n = 5;
  std::vector<Agent> agents;
  for (std::size_t i = 0; i < n; ++i) {
    agents.push_back({ValuationFunction::own_signal(i, n), SignalDistribution::uniform(0, 1)});
  }
  const Instance inst(agents, ArrivalModel::prophet, Temporality::myopic);
  RandomSource src(53, streams::kCalibration);
  const auto c = calibrate_threshold(inst, 50000, src);
  EXPECT_FALSE(c.is_exact);
  EXPECT_EQ(c.trials, 50000u);
  EXPECT_NEAR(c.expected_opt, n / (n + 1.0), 4 * c.standard_error);
  EXPECT_DOUBLE_EQ(c.threshold.value(), c.expected_opt / 2);
}

TEST(Benchmark, TemporalityAndModel) {
  const auto inst = prop32_instance(3);
  const SignalProfile s{2, 2, 0};
  EXPECT_EQ(benchmark_value(inst, s), 4.0);
  EXPECT_EQ(benchmark_value(inst.with_temporality(Temporality::farsighted), s), 4.0);
  EXPECT_EQ(benchmark_value(thm31_instance(3), SignalProfile{0, 0, 0.9}), 8.0);
  EXPECT_EQ(benchmark_value(own_signal_secretary({1, 5, 2}), SignalProfile{1, 5, 2}), 5.0);
}

TEST(Trials, FixedIndexOnProductInstanceAveragesOne) {
  // E[prod_{j<=i} s_j] = 2^(i+1) * 2^-(i+1) = 1 for every i.
  Policy p{RuleId::fixed, std::nullopt, 3, SubmodularCheck::off};
  TrialOptions o;
  o.trials = 100000;
  o.seed = 7;
  const auto r = run_trials(p, prop32_instance(8), o).estimate;
  EXPECT_NEAR(r.alg_mean, 1.0, 4 * r.alg_stderr);
  EXPECT_NEAR(r.opt_mean, 9.0 / 2, 4 * r.opt_stderr);
}

TEST(Trials, ResultsDoNotDependOnWorkerCount) {
  RandomSource src(54, streams::kSuite);
  const auto prophet = random_suite(4, SuiteFamily::subadditive, 1, src).front();
  const auto secretary = random_suite(6, SuiteFamily::subadditive, 1, src, ArrivalModel::secretary).front();
  struct Case {
    Policy policy;
    const Instance* inst;
    CoinMode coin;
  };
  const std::vector<Case> cases{{with_x(RuleId::algo1, 1.0), &prophet, CoinMode::sampled},
                                {with_x(RuleId::mech2, 1.0), &prophet, CoinMode::sampled},
                                {with_x(RuleId::mech2, 1.0), &prophet, CoinMode::exact},
                                {Policy{RuleId::algo3, std::nullopt, 0, SubmodularCheck::off}, &secretary, CoinMode::sampled}};
  for (const auto& c : cases) {
    TrialOptions o;
    o.trials = 5000;
    o.seed = 99;
    o.coin = c.coin;
    o.keep_records = true;
    o.workers = 1;
    const auto one = run_trials(c.policy, *c.inst, o);
    o.workers = 4;
    const auto four = run_trials(c.policy, *c.inst, o);
    EXPECT_EQ(one.estimate.alg_mean, four.estimate.alg_mean);
    EXPECT_EQ(one.estimate.alg_stderr, four.estimate.alg_stderr);
    EXPECT_EQ(one.estimate.opt_mean, four.estimate.opt_mean);
    ASSERT_EQ(one.records.size(), four.records.size());
    for (std::size_t i = 0; i < one.records.size(); ++i) {
      EXPECT_EQ(one.records[i].trial, four.records[i].trial);
      EXPECT_EQ(one.records[i].outcome, four.records[i].outcome);
    }
    o.seed = 100;
    EXPECT_NE(run_trials(c.policy, *c.inst, o).estimate.opt_mean + run_trials(c.policy, *c.inst, o).estimate.alg_mean,
              one.estimate.opt_mean + one.estimate.alg_mean);
  }
}

TEST(Trials, ExactCoinRecordsBothBranches) {
  TrialOptions o;
  o.trials = 10;
  o.coin = CoinMode::exact;
  o.keep_records = true;
  const auto run = run_trials(with_x(RuleId::mech2, 0.0), prop32_instance(3), o);
  ASSERT_EQ(run.records.size(), 20u);
  EXPECT_EQ(run.records[0].weight, 0.5);
  EXPECT_EQ(run.records[0].trial, run.records[1].trial);
}

TEST(Csv, HeaderAndOneBasedStoppingTime) {
  TrialRecord r;
  r.trial = 4;
  r.outcome.stopping_time = 0;
  r.outcome.winner = 2;
  r.outcome.myopic_welfare = 0.1;
  r.opt = 1;
  TrialRecord none;
  none.trial = 5;
  std::ostringstream os;
  write_csv(os, {r, none});
  EXPECT_EQ(os.str(),
            "trial,stop_t,winner,myopic_welfare,farsighted_welfare,payment,opt,coin\n"
            "4,1,2,0.10000000000000001,0,0,1,none\n"
            "5,,,0,0,0,0,none\n");
}

TEST(Campaign, WritesOutputsAndOracle) {
  auto j = base_config();
  j["trials"] = 2000;
  j["rule"] = "algo1";
  j.erase("fixed_index");
  j["trace_trials"] = 2;
  j["output"] = {{"csv", scratch("c.csv").string()},
                 {"json", scratch("c.json").string()},
                 {"trace", scratch("c.jsonl").string()}};
  const auto result = run_campaign(config_from_json(j));
  ASSERT_TRUE(result.calibration.has_value());
  EXPECT_TRUE(result.calibration->is_exact);
  EXPECT_DOUBLE_EQ(result.calibration->threshold.value(), 5.0 / 4);
  ASSERT_TRUE(result.oracle_alg.has_value());
  EXPECT_NEAR(result.estimate.alg_mean, result.oracle_alg->value, 4 * result.estimate.alg_stderr);
  const auto csv = slurp(scratch("c.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2001);
  const auto summary = Json::parse(slurp(scratch("c.json")));
  EXPECT_TRUE(summary.contains("oracle"));
  EXPECT_EQ(summary["estimate"]["trials"], 2000);
  std::istringstream trace(slurp(scratch("c.jsonl")));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(trace, line)) {
    const auto step = Json::parse(line);
    EXPECT_LT(step["trial"].get<int>(), 2);
    ++lines;
  }
  EXPECT_GT(lines, 0u);
}

TEST(Campaign, OracleSkippedWithWarningWhenUnsupported) {
  Json j{{"instance", {{"generator", {{"name", "thm31"}, {"n", 4}}}}},
         {"rule", "fixed"},
         {"fixed_index", 0},
         {"trials", 100},
         {"temporality", "farsighted"}};
  const auto ok = run_campaign(config_from_json(j));
  EXPECT_TRUE(ok.oracle_opt.has_value());
  std::vector<Agent> agents{{ValuationFunction::own_signal(0, 1), SignalDistribution::uniform(0, 1)}};
  save_instance(Instance(agents, ArrivalModel::prophet, Temporality::myopic), scratch("u.json"));
  Json k{{"instance", {{"file", scratch("u.json").string()}}}, {"rule", "fixed"}, {"trials", 100}};
  const auto skipped = run_campaign(config_from_json(k));
  EXPECT_FALSE(skipped.oracle_opt.has_value());
  EXPECT_FALSE(skipped.warnings.empty());
}
