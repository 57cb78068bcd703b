#include "addbo/analysis.hpp"

#include "addbo/csv.hpp"
#include "addbo/error.hpp"
#include "addbo/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

namespace addbo {

VarianceGapScan variance_gap_scan(const AdditivePosterior& posterior, const Domain& domain,
                                  const std::vector<GridPoint>& points) {
  VarianceGapScan scan;
  const int groups = static_cast<int>(posterior.decomposition().size());
  for (const auto& p : points) {
    const Eigen::VectorXd x = domain.to_values(p);
    VarianceGapSample s;
    s.point = p;
    s.true_std = std::sqrt(posterior.full(x).variance);
    for (int j = 0; j < groups; ++j) s.approx_std += std::sqrt(posterior.component(j, x).variance);
    if (s.true_std < 1e-12) {
      s.ratio = std::numeric_limits<double>::infinity();
      s.ratio_diverged = true;
    } else {
      s.ratio = s.approx_std / s.true_std;
    }
    scan.violations += s.approx_std < s.true_std - 1e-9;
    scan.samples.push_back(std::move(s));
  }
  std::stable_sort(scan.samples.begin(), scan.samples.end(),
                   [](const VarianceGapSample& a, const VarianceGapSample& b) { return a.true_std < b.true_std; });
  return scan;
}

VarianceGapScan variance_gap_scan(const AdditivePosterior& posterior, const Domain& domain, int num_points,
                                  std::uint64_t seed) {
  if (num_points < 0) throw InvalidArgument("num_points must be nonnegative");
  Rng rng = make_rng(seed, Stream::kAnalysis);
  std::vector<GridPoint> points(num_points, GridPoint(domain.dim()));
  for (auto& p : points)
    for (int v = 0; v < domain.dim(); ++v) p[v] = std::uniform_int_distribution<int>(0, domain.size(v) - 1)(rng);
  return variance_gap_scan(posterior, domain, points);
}

double information_gain(const Eigen::Ref<const Eigen::MatrixXd>& points, const Decomposition& decomp,
                        const KernelParams& params) {
  if (!(params.noise_variance > 0.0)) throw InvalidArgument("information gain needs positive noise variance");
  if (points.rows() == 0) return 0.0;
  Eigen::MatrixXd m = additive_gram(points, decomp, params) / params.noise_variance;
  m.diagonal().array() += 1.0;
  const FactorizedGram factor(std::move(m));
  return 0.5 * factor.log_determinant();
}

InfoGainResult greedy_info_gain(const Eigen::Ref<const Eigen::MatrixXd>& candidates, int T, const Decomposition& decomp,
                                const KernelParams& params) {
  if (T < 1) throw InvalidArgument("T must be >= 1");
  if (T > candidates.rows()) throw InvalidArgument("T exceeds the number of candidates");
  InfoGainResult result;
  std::vector<bool> used(candidates.rows(), false);
  Eigen::MatrixXd chosen(0, candidates.cols());
  for (int step = 0; step < T; ++step) {
    int best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    Eigen::MatrixXd trial(chosen.rows() + 1, candidates.cols());
    trial.topRows(chosen.rows()) = chosen;
    for (Eigen::Index c = 0; c < candidates.rows(); ++c) {
      if (used[c]) continue;
      trial.bottomRows(1) = candidates.row(c);
      const double g = information_gain(trial, decomp, params);
      if (g > best_gain) {
        best_gain = g;
        best = static_cast<int>(c);
      }
    }
    used[best] = true;
    chosen.conservativeResize(chosen.rows() + 1, Eigen::NoChange);
    chosen.bottomRows(1) = candidates.row(best);
    result.selected.push_back(best);
    result.gains.push_back(best_gain);
  }
  return result;
}

InfoGainResult greedy_info_gain(const Domain& domain, int T, const Decomposition& decomp, const KernelParams& params,
                                std::uint64_t capacity) {
  const std::uint64_t total = domain.cardinality();
  if (total > capacity) throw CapacityError("domain too large for greedy information gain");
  const std::vector<int> all = [&] {
    std::vector<int> v(domain.dim());
    for (int k = 0; k < domain.dim(); ++k) v[k] = k;
    return v;
  }();
  const SubGrid grid(domain, all);
  Eigen::MatrixXd candidates(grid.size(), domain.dim());
  std::vector<int> digits(domain.dim());
  for (Eigen::Index c = 0; c < grid.size(); ++c) {
    grid.decode(c, digits);
    for (int v = 0; v < domain.dim(); ++v) candidates(c, v) = domain.value(v, digits[v]);
  }
  return greedy_info_gain(candidates, T, decomp, params);
}

void write_variance_gap_csv(std::ostream& out, const VarianceGapScan& scan) {
  out << "true_std,approx_std,ratio\n";
  for (const auto& s : scan.samples) {
    out << format_real(s.true_std) << ',' << format_real(s.approx_std) << ',' << format_real(s.ratio) << '\n';
  }
}

void write_info_gain_csv(std::ostream& out, const InfoGainResult& result) {
  out << "T,gain\n";
  for (std::size_t k = 0; k < result.gains.size(); ++k) out << k + 1 << ',' << format_real(result.gains[k]) << '\n';
}

}  // namespace addbo
