#include "addbo/domain.hpp"

#include "addbo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace addbo {

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

}  // namespace

Domain::Domain(std::vector<std::vector<double>> per_variable_values) : values_(std::move(per_variable_values)) {
  if (values_.empty()) throw InvalidArgument("domain needs at least one variable");
  for (std::size_t v = 0; v < values_.size(); ++v) {
    auto& vals = values_[v];
    if (vals.empty()) throw InvalidArgument("variable " + std::to_string(v + 1) + " has an empty value list");
    for (double x : vals) {
      if (!std::isfinite(x)) throw InvalidArgument("variable " + std::to_string(v + 1) + " has a non-finite value");
    }
    auto sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidArgument("variable " + std::to_string(v + 1) + " has repeated values");
    }
  }
}

Domain Domain::uniform_grid(int dim, int points_per_variable, double lo, double hi) {
  if (dim < 1 || points_per_variable < 1) throw InvalidArgument("uniform_grid: dim and points_per_variable must be >= 1");
  std::vector<double> axis(points_per_variable);
  for (int k = 0; k < points_per_variable; ++k) {
    axis[k] = points_per_variable == 1 ? lo : lo + (hi - lo) * k / (points_per_variable - 1);
  }
  return Domain(std::vector<std::vector<double>>(dim, axis));
}

std::uint64_t Domain::cardinality() const {
  std::uint64_t total = 1;
  for (const auto& v : values_) total = saturating_mul(total, v.size());
  return total;
}

std::uint64_t Domain::cardinality(std::span<const int> vars) const {
  std::uint64_t total = 1;
  for (int v : vars) total = saturating_mul(total, values_.at(v).size());
  return total;
}

std::optional<int> Domain::index_of(int var, double value) const {
  const auto& vals = values_.at(var);
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (vals[k] == value) return static_cast<int>(k);
  }
  return std::nullopt;
}

Eigen::VectorXd Domain::to_values(const GridPoint& point) const {
  if (static_cast<int>(point.size()) != dim()) throw InvalidArgument("point dimension does not match domain");
  Eigen::VectorXd x(dim());
  for (int v = 0; v < dim(); ++v) x[v] = values_[v].at(point[v]);
  return x;
}

GridPoint Domain::to_grid(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) throw InvalidArgument("point dimension does not match domain");
  GridPoint p(dim());
  for (int v = 0; v < dim(); ++v) {
    auto idx = index_of(v, x[v]);
    if (!idx) throw InvalidArgument("value of variable " + std::to_string(v + 1) + " is not on the grid");
    p[v] = *idx;
  }
  return p;
}

bool Domain::contains(const GridPoint& point) const {
  if (static_cast<int>(point.size()) != dim()) return false;
  for (int v = 0; v < dim(); ++v) {
    if (point[v] < 0 || point[v] >= size(v)) return false;
  }
  return true;
}

SubGrid::SubGrid(const Domain& domain, std::span<const int> vars) : vars_(vars.begin(), vars.end()) {
  const std::size_t k = vars_.size();
  radices_.resize(k);
  strides_.resize(k);
  if (domain.cardinality(vars) > static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max())) {
    throw CapacityError("sub-grid configuration count overflows");
  }
  Eigen::Index stride = 1;
  for (std::size_t i = k; i-- > 0;) {
    if (vars_[i] < 0 || vars_[i] >= domain.dim()) throw InvalidArgument("sub-grid variable out of range");
    radices_[i] = domain.size(vars_[i]);
    strides_[i] = stride;
    stride *= radices_[i];
  }
  size_ = stride;
}

void SubGrid::decode(Eigen::Index config, std::span<int> out) const {
  for (std::size_t i = vars_.size(); i-- > 0;) {
    out[i] = static_cast<int>(config % radices_[i]);
    config /= radices_[i];
  }
}

Eigen::Index SubGrid::encode(const GridPoint& full_point) const {
  Eigen::Index config = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) config += strides_[i] * full_point[vars_[i]];
  return config;
}

}  // namespace addbo
