#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace idv {

/// Non-negative signal vector, one entry per agent (0-based agent ids).
class SignalProfile {
 public:
  SignalProfile() = default;
  explicit SignalProfile(std::vector<double> signals);
  SignalProfile(std::initializer_list<double> signals);

  static SignalProfile zeros(std::size_t n) { return SignalProfile(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return signals_.size(); }
  double operator[](std::size_t i) const { return signals_[i]; }
  std::span<const double> values() const { return signals_; }

  /// Copy with coordinate i replaced; value must be non-negative.
  SignalProfile with(std::size_t i, double value) const;

  bool operator==(const SignalProfile&) const = default;

 private:
  std::vector<double> signals_;
};

/// Subset of agent indices whose signals stay visible; the rest read as 0.
class SignalMask {
 public:
  SignalMask() = default;
  explicit SignalMask(std::vector<std::size_t> included);

  static SignalMask full(std::size_t n);
  static SignalMask prefix(std::size_t count);  // {0, ..., count-1}
  static SignalMask range(std::size_t first, std::size_t last);  // [first, last)

  const std::vector<std::size_t>& included() const { return included_; }
  bool contains(std::size_t i) const;

 private:
  std::vector<std::size_t> included_;  // sorted, unique
};

/// Zero every coordinate outside the mask. Throws InvalidMask on an
/// out-of-range index.
SignalProfile mask(const SignalProfile& profile, const SignalMask& m);

/// Finite product grid: one sorted list of candidate values per coordinate.
class SignalGrid {
 public:
  SignalGrid() = default;
  explicit SignalGrid(std::vector<std::vector<double>> axes);

  /// Same axis for every coordinate.
  static SignalGrid uniform(std::size_t n, std::vector<double> axis);

  std::size_t arity() const { return axes_.size(); }
  const std::vector<double>& axis(std::size_t i) const { return axes_[i]; }
  const std::vector<std::vector<double>>& axes() const { return axes_; }

  /// Number of points; saturates at SIZE_MAX.
  std::size_t point_count() const;
  bool empty() const;

  /// Visit every grid point in lexicographic (odometer) order. The visitor
  /// receives the index vector and the profile.
  template <typename Visitor>
  void for_each_point(Visitor&& visit) const {
    if (empty()) return;
    std::vector<std::size_t> idx(axes_.size(), 0);
    std::vector<double> values(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) values[i] = axes_[i][0];
    while (true) {
      visit(static_cast<const std::vector<std::size_t>&>(idx), SignalProfile(values));
      std::size_t c = 0;
      for (; c < axes_.size(); ++c) {
        if (++idx[c] < axes_[c].size()) {
          values[c] = axes_[c][idx[c]];
          break;
        }
        idx[c] = 0;
        values[c] = axes_[c][0];
      }
      if (c == axes_.size()) return;
    }
  }

 private:
  std::vector<std::vector<double>> axes_;
};

}  // namespace idv
