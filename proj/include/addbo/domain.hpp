#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace addbo {

// A point of the discrete domain, stored as one value index per variable.
using GridPoint = std::vector<int>;

// Variable indices of one additive component, sorted ascending, 0-based.
using Group = std::vector<int>;

// Product of finite per-variable value lists.
class Domain {
 public:
  explicit Domain(std::vector<std::vector<double>> per_variable_values);

  // `points_per_variable` evenly spaced values in [lo, hi] for each of `dim` variables.
  static Domain uniform_grid(int dim, int points_per_variable, double lo = 0.0, double hi = 1.0);

  int dim() const { return static_cast<int>(values_.size()); }
  int size(int var) const { return static_cast<int>(values_[var].size()); }
  double value(int var, int index) const { return values_[var][index]; }
  const std::vector<double>& values(int var) const { return values_[var]; }

  // Number of points in the full product, saturating at UINT64_MAX.
  std::uint64_t cardinality() const;

  // Number of configurations of the sub-product over `vars`, saturating.
  std::uint64_t cardinality(std::span<const int> vars) const;

  std::optional<int> index_of(int var, double value) const;

  Eigen::VectorXd to_values(const GridPoint& point) const;

  // Inverse of to_values; throws InvalidArgument when a coordinate is not a grid value.
  GridPoint to_grid(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  bool contains(const GridPoint& point) const;

 private:
  std::vector<std::vector<double>> values_;
};

// Mixed-radix enumeration of the configurations of a variable subset. The
// last variable varies fastest, so increasing configuration index is
// lexicographic order over the (sorted) variable list.
class SubGrid {
 public:
  SubGrid(const Domain& domain, std::span<const int> vars);

  const Group& vars() const { return vars_; }
  Eigen::Index size() const { return size_; }
  const std::vector<Eigen::Index>& strides() const { return strides_; }
  const std::vector<int>& radices() const { return radices_; }

  // Writes the value index of each subset variable into `out` (size vars().size()).
  void decode(Eigen::Index config, std::span<int> out) const;

  // Configuration index of the restriction of a full domain point.
  Eigen::Index encode(const GridPoint& full_point) const;

 private:
  Group vars_;
  std::vector<int> radices_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index size_ = 1;
};

}  // namespace addbo
