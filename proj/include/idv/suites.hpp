#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "idv/instance.hpp"
#include "idv/serialization.hpp"

namespace idv {

class RandomSource;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // observed values
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

struct SuiteReport {
  std::string suite;
  std::vector<CriterionResult> criteria;

  bool passed() const;
};

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  std::size_t workers = 1;
};

/// farsighted-gap, product-instance, counterexample, stopping-time, bounds,
/// recovery, epic, sampling-bound,
/// oracle-equivalence, all.
const std::vector<std::string>& suite_ids();

/// Throws InvalidInput for an id outside the registry.
SuiteReport acceptance_suite(std::string_view id, const SuiteOptions& options = {});

Json to_json(const SuiteReport& report);
/// One "PASS|FAIL  <id>. <name> (<seconds>s): <detail>" line per criterion.
std::string format_line(const CriterionResult& c);

/// Prophet instance with additive valuations where each signal moves its
/// owner's value at least as much as anyone else's.
Instance single_crossing_additive(std::size_t n, RandomSource& src);

/// Two myopic agents: v_0 = 2 + s_0 and v_1 = 4 s_0 + s_1, signals uniform
/// on {0, 1}. Raising s_0 lifts agent 1 above agent 0.
Instance crossing_violation_instance();

}  // namespace idv
