#include "idv/property_checks.hpp"

#include <string>

#include "idv/error.hpp"
#include "idv/random.hpp"

namespace idv {

namespace {

std::vector<std::size_t> strides_of(const SignalGrid& grid) {
  std::vector<std::size_t> strides(grid.arity());
  std::size_t stride = 1;
  for (std::size_t j = 0; j < grid.arity(); ++j) {
    strides[j] = stride;
    stride *= grid.axis(j).size();
  }
  return strides;
}

void require_grid(const SignalGrid& grid, std::size_t arity, const char* who) {
  if (grid.empty()) throw InvalidInput(std::string(who) + ": empty grid");
  if (grid.arity() != arity) throw InvalidInput(std::string(who) + ": grid arity mismatch");
  if (grid.point_count() > kMaxCheckedGridPoints) {
    throw PreconditionError(std::string(who) + ": grid has too many points to check exhaustively");
  }
}

SignalProfile point_at(const SignalGrid& grid, const std::vector<std::size_t>& idx) {
  std::vector<double> values(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) values[j] = grid.axis(j)[idx[j]];
  return SignalProfile(std::move(values));
}

}  // namespace

std::vector<double> tabulate(const ValuationFunction& v, const SignalGrid& grid) {
  std::vector<double> table;
  table.reserve(grid.point_count());
  grid.for_each_point([&](const auto&, const SignalProfile& p) { table.push_back(v(p)); });
  return table;
}

CheckResult<MonotoneWitness> check_monotone(const ValuationFunction& v, const SignalGrid& grid) {
  require_grid(grid, v.arity(), "check_monotone");
  const auto table = tabulate(v, grid);
  const auto strides = strides_of(grid);
  CheckResult<MonotoneWitness> result;
  std::size_t flat = 0;
  grid.for_each_point([&](const std::vector<std::size_t>& idx, const SignalProfile& p) {
    const std::size_t here = flat++;
    if (!result.passed) return;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (idx[j] + 1 >= grid.axis(j).size()) continue;
      const std::size_t next = here + strides[j];
      ++result.comparisons;
      if (table[here] > table[next] + kValueTolerance) {
        result.passed = false;
        result.witness = MonotoneWitness{p, p.with(j, grid.axis(j)[idx[j] + 1]), table[here],
                                         table[next]};
        return;
      }
    }
  });
  return result;
}

CheckResult<SubadditiveWitness> check_subadditive(const ValuationFunction& v,
                                                  const SignalProfile& profile, SubsetMode mode,
                                                  RandomSource* src) {
  const std::size_t n = profile.size();
  if (n != v.arity()) throw InvalidInput("check_subadditive: arity mismatch");
  CheckResult<SubadditiveWitness> result;
  const double whole = v(profile);

  auto test_subset = [&](const std::vector<bool>& in) {
    std::vector<double> part(n, 0.0);
    std::vector<double> rest(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) (in[j] ? part : rest)[j] = profile[j];
    const double vp = v.evaluate(part);
    const double vr = v.evaluate(rest);
    ++result.comparisons;
    if (whole > vp + vr + kValueTolerance) {
      std::vector<std::size_t> ids;
      for (std::size_t j = 0; j < n; ++j) {
        if (in[j]) ids.push_back(j);
      }
      result.passed = false;
      result.witness = SubadditiveWitness{SignalMask(std::move(ids)), whole, vp, vr};
      return false;
    }
    return true;
  };

  std::vector<bool> in(n, false);
  if (mode == SubsetMode::exhaustive) {
    if (n > kMaxExhaustiveSubsetArity) {
      throw PreconditionError("check_subadditive: exhaustive mode requires n <= 20");
    }
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
      for (std::size_t j = 0; j < n; ++j) in[j] = (bits >> j) & 1u;
      if (!test_subset(in)) break;
    }
  } else {
    RandomSource fallback(0, streams::kChecker);
    RandomSource& rng = src ? *src : fallback;
    for (std::size_t k = 0; k < kSampledSubsets; ++k) {
      for (std::size_t j = 0; j < n; ++j) in[j] = rng.bernoulli(0.5);
      if (!test_subset(in)) break;
    }
  }
  return result;
}

CheckResult<SubmodularWitness> check_submodular(const ValuationFunction& v,
                                                const SignalGrid& grid) {
  require_grid(grid, v.arity(), "check_submodular");
  const auto table = tabulate(v, grid);
  const auto strides = strides_of(grid);
  const std::size_t n = grid.arity();
  CheckResult<SubmodularWitness> result;
  std::size_t flat = 0;
  grid.for_each_point([&](const std::vector<std::size_t>& idx, const SignalProfile&) {
    const std::size_t here = flat++;
    if (!result.passed) return;
    for (std::size_t i = 0; i < n; ++i) {
      if (idx[i] + 1 >= grid.axis(i).size()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || idx[j] + 1 >= grid.axis(j).size()) continue;
        const double gain_high = table[here + strides[i] + strides[j]] - table[here + strides[j]];
        const double gain_low = table[here + strides[i]] - table[here];
        ++result.comparisons;
        if (gain_high > gain_low + kValueTolerance) {
          auto hi_idx = idx;
          ++hi_idx[i];
          ++hi_idx[j];
          result.passed = false;
          result.witness = SubmodularWitness{i, point_at(grid, hi_idx), point_at(grid, idx),
                                             gain_high, gain_low};
          return;
        }
      }
    }
  });
  return result;
}

CheckResult<SingleCrossingWitness> check_single_crossing(std::span<const ValuationFunction> vs,
                                                         const SignalGrid& grid) {
  const std::size_t n = grid.arity();
  if (vs.size() != n) {
    throw InvalidInput("check_single_crossing: need one valuation per coordinate");
  }
  for (const auto& v : vs) require_grid(grid, v.arity(), "check_single_crossing");
  std::vector<std::vector<double>> tables;
  tables.reserve(n);
  for (const auto& v : vs) tables.push_back(tabulate(v, grid));
  const auto strides = strides_of(grid);

  CheckResult<SingleCrossingWitness> result;
  std::size_t flat = 0;
  grid.for_each_point([&](const std::vector<std::size_t>& idx, const SignalProfile& p) {
    const std::size_t here = flat++;
    if (!result.passed) return;
    for (std::size_t i = 0; i < n; ++i) {
      if (idx[i] + 1 >= grid.axis(i).size()) continue;
      const std::size_t next = here + strides[i];
      const double own = tables[i][next] - tables[i][here];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double other = tables[j][next] - tables[j][here];
        ++result.comparisons;
        if (other > own + kValueTolerance) {
          result.passed = false;
          result.witness =
              SingleCrossingWitness{i, j, p, grid.axis(i)[idx[i] + 1], own, other};
          return;
        }
      }
    }
  });
  return result;
}

}  // namespace idv
