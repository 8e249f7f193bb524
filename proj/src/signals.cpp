#include "idv/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "idv/error.hpp"

namespace idv {

namespace {

void require_signal(double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidInput("signal values must be finite and non-negative, got " + std::to_string(v));
  }
}

}  // namespace

SignalProfile::SignalProfile(std::vector<double> signals) : signals_(std::move(signals)) {
  for (double v : signals_) require_signal(v);
}

SignalProfile::SignalProfile(std::initializer_list<double> signals)
    : SignalProfile(std::vector<double>(signals)) {}

SignalProfile SignalProfile::with(std::size_t i, double value) const {
  if (i >= signals_.size()) throw InvalidInput("SignalProfile::with: index out of range");
  require_signal(value);
  SignalProfile copy = *this;
  copy.signals_[i] = value;
  return copy;
}

SignalMask::SignalMask(std::vector<std::size_t> included) : included_(std::move(included)) {
  std::sort(included_.begin(), included_.end());
  included_.erase(std::unique(included_.begin(), included_.end()), included_.end());
}

SignalMask SignalMask::full(std::size_t n) { return range(0, n); }

SignalMask SignalMask::prefix(std::size_t count) { return range(0, count); }

SignalMask SignalMask::range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> ids;
  for (std::size_t i = first; i < last; ++i) ids.push_back(i);
  return SignalMask(std::move(ids));
}

bool SignalMask::contains(std::size_t i) const {
  return std::binary_search(included_.begin(), included_.end(), i);
}

SignalProfile mask(const SignalProfile& profile, const SignalMask& m) {
  const std::size_t n = profile.size();
  if (!m.included().empty() && m.included().back() >= n) {
    throw InvalidMask("mask index " + std::to_string(m.included().back()) +
                      " out of range for profile of length " + std::to_string(n));
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i : m.included()) out[i] = profile[i];
  return SignalProfile(std::move(out));
}

SignalGrid::SignalGrid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
  for (auto& axis : axes_) {
    for (double v : axis) require_signal(v);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  }
}

SignalGrid SignalGrid::uniform(std::size_t n, std::vector<double> axis) {
  return SignalGrid(std::vector<std::vector<double>>(n, std::move(axis)));
}

std::size_t SignalGrid::point_count() const {
  if (axes_.empty()) return 0;
  std::size_t count = 1;
  for (const auto& axis : axes_) {
    if (axis.empty()) return 0;
    if (count > std::numeric_limits<std::size_t>::max() / axis.size()) {
      return std::numeric_limits<std::size_t>::max();
    }
    count *= axis.size();
  }
  return count;
}

bool SignalGrid::empty() const { return point_count() == 0; }

}  // namespace idv
