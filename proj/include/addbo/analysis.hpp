#pragma once

#include "addbo/domain.hpp"
#include "addbo/posterior.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace addbo {

struct VarianceGapSample {
  GridPoint point;
  double true_std = 0.0;
  // Sum of component posterior standard deviations.
  double approx_std = 0.0;
  // approx / true; +infinity when true_std < 1e-12.
  double ratio = 0.0;
  bool ratio_diverged = false;
};

struct VarianceGapScan {
  std::vector<VarianceGapSample> samples;  // sorted by true_std
  // Samples where approx_std < true_std - 1e-9.
  int violations = 0;
};

// Compares the full-kernel posterior standard deviation with the sum of
// component deviations at `num_points` uniformly drawn domain points.
VarianceGapScan variance_gap_scan(const AdditivePosterior& posterior, const Domain& domain, int num_points,
                                  std::uint64_t seed);
// Same, at caller-chosen points.
VarianceGapScan variance_gap_scan(const AdditivePosterior& posterior, const Domain& domain,
                                  const std::vector<GridPoint>& points);

// I(y_A; f_A) = 1/2 log det(I + K_A / eta^2), in nats.
double information_gain(const Eigen::Ref<const Eigen::MatrixXd>& points, const Decomposition& decomp,
                        const KernelParams& params);

struct InfoGainResult {
  // Selected candidate indices in selection order.
  std::vector<int> selected;
  // gains[k] = I for the first k+1 selected points.
  std::vector<double> gains;
};

// Greedy maximization of the information gain over distinct candidates
// (rows of `candidates`), up to T points. Ties go to the lowest index.
InfoGainResult greedy_info_gain(const Eigen::Ref<const Eigen::MatrixXd>& candidates, int T, const Decomposition& decomp,
                                const KernelParams& params);
// Candidates are every point of `domain`; CapacityError beyond `capacity`.
InfoGainResult greedy_info_gain(const Domain& domain, int T, const Decomposition& decomp, const KernelParams& params,
                                std::uint64_t capacity = 100'000);

// "true_std,approx_std,ratio"
void write_variance_gap_csv(std::ostream& out, const VarianceGapScan& scan);
// "T,gain"
void write_info_gain_csv(std::ostream& out, const InfoGainResult& result);

}  // namespace addbo
