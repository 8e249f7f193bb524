#include "idv/harness.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include "idv/error.hpp"
#include "idv/random.hpp"

namespace idv {

bool RatioEstimate::within_bound(double bound) const {
  return opt_mean - 3.0 * opt_stderr <= bound * (alg_mean + 3.0 * alg_stderr);
}

Json to_json(const RatioEstimate& r) {
  return {{"alg_mean", r.alg_mean},       {"alg_stderr", r.alg_stderr},
          {"opt_mean", r.opt_mean},       {"opt_stderr", r.opt_stderr},
          {"ratio_of_means", std::isfinite(r.ratio_of_means) ? Json(r.ratio_of_means) : Json()},
          {"trials", r.trials},           {"seed", r.seed},
          {"payment_mean", r.payment_mean}};
}

void MeanAccumulator::add(double x) {
  sum += x;
  sum_sq += x * x;
  ++count;
}

MeanAccumulator& MeanAccumulator::operator+=(const MeanAccumulator& other) {
  sum += other.sum;
  sum_sq += other.sum_sq;
  count += other.count;
  return *this;
}

double MeanAccumulator::mean() const {
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double MeanAccumulator::standard_error() const {
  if (count < 2) return 0.0;
  const double c = static_cast<double>(count);
  const double m = sum / c;
  const double var = std::max(0.0, (sum_sq - c * m * m) / (c - 1.0));
  return std::sqrt(var / c);
}

// ---- instances -------------------------------------------------------------

Instance generate_instance(const GeneratorSpec& spec) {
  const auto temporality = [&](Temporality fallback) {
    return spec.temporality.value_or(fallback);
  };
  Instance inst = [&]() -> Instance {
    if (spec.name == "thm31") return thm31_instance(spec.n);
    if (spec.name == "prop32") return prop32_instance(spec.n);
    if (spec.name == "counterexample") return threshold_counterexample_instance(spec.n, spec.eps);
    if (spec.name == "own_signal") {
      return own_signal_secretary(spec.signals, temporality(Temporality::myopic));
    }
    if (spec.name == "single_max") {
      if (spec.distinct == 0 || spec.distinct > spec.n) {
        throw InvalidInput("single_max: need 1 <= distinct <= n");
      }
      std::vector<double> s(spec.n, 0.0);
      for (std::size_t i = 0; i < spec.distinct; ++i) s[i] = static_cast<double>(i + 1);
      return own_signal_secretary(s, temporality(Temporality::myopic));
    }
    if (spec.name == "random") {
      RandomSource src(spec.seed, streams::kSuite);
      auto suite = random_suite(spec.n, parse_suite_family(spec.family), spec.index + 1, src,
                                parse_arrival_model(spec.model));
      return suite.back();
    }
    throw InvalidInput("unknown generator: " + spec.name);
  }();
  if (spec.temporality && inst.temporality() != *spec.temporality) {
    inst = inst.with_temporality(*spec.temporality);
  }
  return inst;
}

GeneratorSpec generator_from_json(const Json& j) {
  GeneratorSpec g;
  g.name = j.at("name").get<std::string>();
  g.n = j.value("n", std::size_t{0});
  g.eps = j.value("eps", 0.01);
  if (j.contains("signals")) g.signals = j.at("signals").get<std::vector<double>>();
  if (g.name == "own_signal") g.n = g.signals.size();
  g.distinct = j.value("distinct", std::size_t{0});
  g.family = j.value("family", std::string("subadditive"));
  g.model = j.value("model", std::string("prophet"));
  g.seed = j.value("seed", std::uint64_t{0});
  g.index = j.value("index", std::size_t{0});
  if (j.contains("temporality")) {
    g.temporality = parse_temporality(j.at("temporality").get<std::string>());
  }
  return g;
}

// ---- config ----------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (instance_file.has_value() == generator.has_value()) {
    throw InvalidInput("config: give exactly one of instance.file or instance.generator");
  }
  if (trials < 1) throw InvalidInput("config: trials must be at least 1");
  if (needs_threshold(rule) && !threshold && calibration_trials < 1) {
    throw InvalidInput("config: calibration_trials must be at least 1 for threshold rules");
  }
  if (workers < 1) throw InvalidInput("config: workers must be at least 1");
}

ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  try {
    ExperimentConfig cfg;
    auto path_of = [&](const Json& v) {
      std::filesystem::path p = v.get<std::string>();
      return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    const Json& src = j.at("instance");
    if (src.contains("file")) cfg.instance_file = path_of(src.at("file"));
    if (src.contains("generator")) cfg.generator = generator_from_json(src.at("generator"));
    cfg.rule = parse_rule(j.at("rule").get<std::string>());
    if (j.contains("payment")) cfg.payment = parse_payment_rule(j.at("payment").get<std::string>());
    if (j.contains("temporality")) {
      cfg.temporality = parse_temporality(j.at("temporality").get<std::string>());
    }
    cfg.fixed_index = j.value("fixed_index", std::size_t{0});
    if (j.contains("threshold")) cfg.threshold = j.at("threshold").get<double>();
    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.calibration_trials = j.value("calibration_trials", cfg.calibration_trials);
    cfg.workers = j.value("workers", cfg.workers);
    const std::string coin = j.value("coin", std::string("sampled"));
    if (coin == "exact") cfg.coin = CoinMode::exact;
    else if (coin == "sampled") cfg.coin = CoinMode::sampled;
    else throw InvalidInput("config: coin must be exact or sampled");
    cfg.oracle = j.value("oracle", true);
    cfg.trace_trials = j.value("trace_trials", std::size_t{0});
    if (j.contains("output")) {
      const Json& out = j.at("output");
      if (out.contains("csv")) cfg.csv_out = path_of(out.at("csv"));
      if (out.contains("json")) cfg.json_out = path_of(out.at("json"));
      if (out.contains("trace")) cfg.trace_out = path_of(out.at("trace"));
    }
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return config_from_json(j, path.parent_path());
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

// ---- calibration and trials ------------------------------------------------

double benchmark_value(const Instance& inst, const SignalProfile& s) {
  const std::size_t n = inst.size();
  double best = 0.0;
  if (inst.is_secretary() || inst.temporality() == Temporality::farsighted) {
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

Calibration calibrate_threshold(const Instance& inst, std::size_t calibration_trials,
                                RandomSource& src) {
  if (!inst.is_prophet()) throw InvalidInput("calibrate_threshold: requires a prophet instance");
  Calibration c;
  try {
    const auto opt = exact_opt(inst);
    c.expected_opt = opt.value;
    c.is_exact = true;
    c.trials = 0;
  } catch (const CapacityError&) {
  } catch (const Unsupported&) {
  }
  if (!c.is_exact) {
    if (calibration_trials < 1) throw InvalidInput("calibrate_threshold: no calibration trials");
    MeanAccumulator acc;
    for (std::size_t t = 0; t < calibration_trials; ++t) {
      acc.add(benchmark_value(inst, inst.draw_signals(src)));
    }
    c.expected_opt = acc.mean();
    c.standard_error = acc.standard_error();
    c.trials = calibration_trials;
  }
  c.threshold = Threshold(c.expected_opt / 2.0);
  return c;
}

namespace {

struct TrialSlot {
  MeanAccumulator alg;
  MeanAccumulator opt;
  MeanAccumulator pay;
  std::vector<TrialRecord> records;
  std::vector<TraceStep> trace;
  std::vector<std::size_t> trace_ids;
};

void run_one(const Policy& policy, const Instance& inst, const TrialOptions& options,
             std::size_t trial, TrialSlot& slot, const std::optional<SignalProfile>& fixed) {
  const std::size_t n = inst.size();
  RandomSource eval = RandomSource(options.seed, streams::kEvaluation).derive(trial);
  std::optional<RandomSource> coin;
  if (policy.rule == RuleId::mech2 && options.coin == CoinMode::sampled) {
    coin = RandomSource(options.seed, streams::kCoin).derive(trial);
  }
  SignalProfile signals = fixed ? *fixed : inst.draw_signals(eval);
  const ArrivalOrder order =
      inst.is_secretary() ? ArrivalOrder::random(n, eval) : ArrivalOrder::identity(n);
  TraceSink sink;
  if (trial < options.trace_trials) {
    sink = [&slot, trial](const TraceStep& step) {
      slot.trace.push_back(step);
      slot.trace_ids.push_back(trial);
    };
  }
  auto outcomes = run_policy(policy, inst, signals, order, options.coin, coin ? &*coin : nullptr, sink);
  if (options.payment) {
    apply_payments(Mechanism{policy, *options.payment}, inst, signals, order, outcomes);
  }
  const double opt = benchmark_value(inst, signals);
  double alg = 0.0;
  double pay = 0.0;
  for (const auto& w : outcomes) {
    alg += w.weight * w.outcome.welfare(inst.temporality());
    pay += w.weight * w.outcome.payment;
    if (options.keep_records) slot.records.push_back({trial, w.weight, w.outcome, opt});
  }
  slot.alg.add(alg);
  slot.opt.add(opt);
  slot.pay.add(pay);
}

}  // namespace

TrialRun run_trials(const Policy& policy, const Instance& inst, const TrialOptions& options) {
  if (options.trials < 1) throw InvalidInput("run_trials: trials must be at least 1");
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, options.trials));
  std::optional<SignalProfile> fixed;
  if (inst.is_secretary()) fixed = inst.fixed_signals();

  // Fixed-size chunks merged in trial order keep sums independent of workers.
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (options.trials + kChunk - 1) / kChunk;
  std::vector<TrialSlot> slots(chunks);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t c = w; c < chunks; c += workers) {
        const std::size_t end = std::min(options.trials, (c + 1) * kChunk);
        for (std::size_t t = c * kChunk; t < end; ++t) run_one(policy, inst, options, t, slots[c], fixed);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  TrialRun run;
  MeanAccumulator alg, opt, pay;
  for (auto& s : slots) {
    alg += s.alg;
    opt += s.opt;
    pay += s.pay;
    for (auto& r : s.records) run.records.push_back(std::move(r));
    for (auto& step : s.trace) run.trace.push_back(std::move(step));
    run.trace_trial_ids.insert(run.trace_trial_ids.end(), s.trace_ids.begin(), s.trace_ids.end());
  }
  auto& e = run.estimate;
  e.alg_mean = alg.mean();
  e.alg_stderr = alg.standard_error();
  e.opt_mean = opt.mean();
  e.opt_stderr = opt.standard_error();
  e.ratio_of_means = e.alg_mean > 0.0 ? e.opt_mean / e.alg_mean
                                      : std::numeric_limits<double>::infinity();
  e.trials = options.trials;
  e.seed = options.seed;
  e.payment_mean = pay.mean();
  return run;
}

// ---- output ----------------------------------------------------------------

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << "trial,stop_t,winner,myopic_welfare,farsighted_welfare,payment,opt,coin\n";
  for (const auto& r : records) {
    const auto& o = r.outcome;
    os << r.trial << ',' << (o.stopping_time ? std::to_string(*o.stopping_time + 1) : "") << ','
       << (o.winner ? std::to_string(*o.winner) : "") << ',' << fmt(o.myopic_welfare) << ','
       << fmt(o.farsighted_welfare) << ',' << fmt(o.payment) << ',' << fmt(r.opt) << ','
       << to_string(o.coin) << '\n';
  }
}

Json to_json(const CampaignResult& r) {
  Json j{{"instance_hash", r.instance_hash},
         {"policy", r.policy},
         {"estimate", to_json(r.estimate)},
         {"warnings", r.warnings}};
  if (r.payment) j["payment"] = std::string(to_string(*r.payment));
  if (r.calibration) {
    j["calibration"] = {{"threshold", r.calibration->threshold.value()},
                        {"expected_opt", r.calibration->expected_opt},
                        {"standard_error", r.calibration->standard_error},
                        {"trials", r.calibration->trials},
                        {"is_exact", r.calibration->is_exact}};
  }
  Json oracle = Json::object();
  if (r.oracle_opt) {
    oracle["opt"] = {{"value", r.oracle_opt->value},
                     {"atoms", r.oracle_opt->atoms},
                     {"is_exact", r.oracle_opt->is_exact}};
  }
  if (r.oracle_alg) {
    oracle["alg"] = {{"value", r.oracle_alg->value},
                     {"myopic_welfare", r.oracle_alg->myopic_welfare},
                     {"farsighted_welfare", r.oracle_alg->farsighted_welfare},
                     {"payment", r.oracle_alg->payment},
                     {"atoms", r.oracle_alg->atoms},
                     {"is_exact", r.oracle_alg->is_exact}};
  }
  if (!oracle.empty()) j["oracle"] = oracle;
  return j;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
  return os;
}

}  // namespace

CampaignResult run_campaign(const ExperimentConfig& cfg) {
  cfg.validate();
  Instance inst = cfg.instance_file ? load_instance(*cfg.instance_file)
                                    : generate_instance(*cfg.generator);
  if (cfg.temporality && *cfg.temporality != inst.temporality()) {
    inst = inst.with_temporality(*cfg.temporality);
  }

  CampaignResult result;
  result.instance_hash = instance_hash(inst);
  result.payment = cfg.payment;

  Policy policy;
  policy.rule = cfg.rule;
  policy.fixed_index = cfg.fixed_index;
  if (cfg.threshold) {
    policy.threshold = Threshold(*cfg.threshold);
  } else if (needs_threshold(cfg.rule)) {
    RandomSource cal(cfg.seed, streams::kCalibration);
    result.calibration = calibrate_threshold(inst, cfg.calibration_trials, cal);
    policy.threshold = result.calibration->threshold;
  }
  if (cfg.rule == RuleId::algo5) {
    std::string reason;
    if (!certify_submodular(inst, &reason)) {
      throw InvalidInput("algo5 needs submodular valuations: " + reason);
    }
  }
  result.policy = policy.name();

  TrialOptions opts;
  opts.trials = cfg.trials;
  opts.seed = cfg.seed;
  opts.workers = cfg.workers;
  opts.coin = cfg.coin;
  opts.payment = cfg.payment;
  opts.keep_records = cfg.csv_out.has_value() || cfg.keep_records;
  opts.trace_trials = cfg.trace_out ? cfg.trace_trials : 0;
  TrialRun run = run_trials(policy, inst, opts);
  result.estimate = run.estimate;
  result.records = std::move(run.records);

  if (cfg.oracle) {
    auto attempt = [&](auto&& compute) {
      try {
        compute();
      } catch (const CapacityError& e) {
        result.warnings.push_back(std::string("oracle skipped, Monte Carlo only: ") + e.what());
      } catch (const Unsupported& e) {
        result.warnings.push_back(std::string("oracle skipped, Monte Carlo only: ") + e.what());
      }
    };
    attempt([&] { result.oracle_opt = exact_opt(inst, cfg.workers); });
    attempt([&] { result.oracle_alg = exact_alg(policy, inst, cfg.workers); });
  }

  if (cfg.csv_out) {
    auto os = open_output(*cfg.csv_out);
    write_csv(os, result.records);
  }
  if (cfg.json_out) {
    auto os = open_output(*cfg.json_out);
    os << to_json(result).dump(2) << '\n';
  }
  if (cfg.trace_out) {
    auto os = open_output(*cfg.trace_out);
    for (std::size_t i = 0; i < run.trace.size(); ++i) {
      Json line = to_json(run.trace[i]);
      line["trial"] = run.trace_trial_ids[i];
      os << line.dump() << '\n';
    }
  }
  return result;
}

}  // namespace idv
