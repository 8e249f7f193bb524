#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "idv/instance.hpp"
#include "idv/mechanisms.hpp"
#include "idv/oracles.hpp"
#include "idv/policy.hpp"
#include "idv/serialization.hpp"

namespace idv {

class RandomSource;

struct RatioEstimate {
  double alg_mean = 0.0;
  double alg_stderr = 0.0;
  double opt_mean = 0.0;
  double opt_stderr = 0.0;
  double ratio_of_means = 0.0;  // opt_mean / alg_mean (+inf when alg_mean is 0)
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double payment_mean = 0.0;

  /// opt_mean - 3 opt_stderr <= bound * (alg_mean + 3 alg_stderr).
  bool within_bound(double bound) const;
};

Json to_json(const RatioEstimate& r);

/// Running (sum, sum of squares, count); merges are associative.
struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double x);
  MeanAccumulator& operator+=(const MeanAccumulator& other);
  double mean() const;
  /// Sample standard deviation over sqrt(count); 0 below two samples.
  double standard_error() const;
};

/// A named instance generator with its parameters.
struct GeneratorSpec {
  std::string name;  // thm31 | prop32 | counterexample | own_signal | single_max | random
  std::size_t n = 0;
  double eps = 0.01;
  std::vector<double> signals;          // own_signal
  std::size_t distinct = 0;             // single_max: positive agents before padding
  std::string family = "subadditive";   // random
  std::string model = "prophet";        // random
  std::uint64_t seed = 0;               // random
  std::size_t index = 0;                // random: which member of the suite
  std::optional<Temporality> temporality;
};

Instance generate_instance(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const Json& j);

struct ExperimentConfig {
  std::optional<std::filesystem::path> instance_file;
  std::optional<GeneratorSpec> generator;
  RuleId rule = RuleId::algo1;
  std::optional<PaymentRule> payment;
  std::optional<Temporality> temporality;  // overrides the instance's
  std::size_t fixed_index = 0;
  std::optional<double> threshold;         // skips calibration when set
  std::size_t trials = 10'000;
  std::uint64_t seed = 1;
  std::size_t calibration_trials = 100'000;
  std::size_t workers = 1;
  CoinMode coin = CoinMode::sampled;
  bool oracle = true;  // attach exact values when the oracles can compute them
  std::size_t trace_trials = 0;
  bool keep_records = false;  // per-trial rows in the result even without csv_out
  std::optional<std::filesystem::path> csv_out;
  std::optional<std::filesystem::path> json_out;
  std::optional<std::filesystem::path> trace_out;

  /// Throws InvalidInput on a config that violates its invariants.
  void validate() const;
};

/// Relative paths inside the file resolve against `base_dir`.
ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct Calibration {
  Threshold threshold{0.0};
  bool is_exact = false;
  double expected_opt = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
};

/// X = E[max_i v_i] / 2 on the instance's benchmark. Exact whenever
/// exact_opt can enumerate the instance, otherwise a Monte Carlo estimate
/// from `src` (use the calibration stream).
Calibration calibrate_threshold(const Instance& inst, std::size_t calibration_trials,
                                RandomSource& src);

/// Hindsight benchmark of one realisation: max_i v_i on s_[i] (myopic) or s.
/// Secretary instances always use max_i v_i(s).
double benchmark_value(const Instance& inst, const SignalProfile& s);

struct TrialRecord {
  std::size_t trial = 0;
  double weight = 1.0;  // < 1 for the rows of an exact coin average
  Outcome outcome;
  double opt = 0.0;
};

struct TrialOptions {
  std::size_t trials = 10'000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  CoinMode coin = CoinMode::sampled;
  std::optional<PaymentRule> payment;
  bool keep_records = false;
  std::size_t trace_trials = 0;
};

struct TrialRun {
  RatioEstimate estimate;
  std::vector<TrialRecord> records;
  std::vector<TraceStep> trace;
  std::vector<std::size_t> trace_trial_ids;  // parallel to trace
};

/// Monte Carlo over signals (prophet) or arrival orders (secretary). Trial i
/// draws from the evaluation stream derived with child i, and its coin from
/// the coin stream derived with child i, so results do not depend on the
/// worker count.
TrialRun run_trials(const Policy& policy, const Instance& inst, const TrialOptions& options);

struct CampaignResult {
  std::string instance_hash;
  std::string policy;
  std::optional<PaymentRule> payment;
  RatioEstimate estimate;
  std::optional<Calibration> calibration;
  std::optional<ExactExpectation> oracle_opt;
  std::optional<ExactAlg> oracle_alg;
  std::vector<std::string> warnings;
  std::vector<TrialRecord> records;
};

Json to_json(const CampaignResult& r);

/// Per-trial CSV with a fixed header; reals use %.17g.
void write_csv(std::ostream& os, const std::vector<TrialRecord>& records);

/// Build the instance, calibrate X when needed, run the trials, attach the
/// oracle values and write the configured outputs.
CampaignResult run_campaign(const ExperimentConfig& cfg);

}  // namespace idv
