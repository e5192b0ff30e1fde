#pragma once

#include <span>
#include <vector>

namespace rra {

/// Relative L2 error: ||pred - ref||_2 / ||ref||_2 over sampled points.
double rel_l2(std::span<const double> pred, std::span<const double> ref);

/// Max absolute pointwise error.
double l_inf(std::span<const double> pred, std::span<const double> ref);

/// Empirical quantile, same convention as empirical_var: the lowest
/// order statistic whose CDF reaches q.
double quantile(std::span<const double> values, double q);

struct SurvivalPoint {
  double threshold = 0.0;
  double fraction = 0.0;  // Pr(value > threshold), strict
};

/// Complementary CDF sampled at the given ascending thresholds.
std::vector<SurvivalPoint> survival_curve(std::span<const double> values,
                                          std::span<const double> thresholds);

/// 200 log-spaced thresholds spanning [max(min value, 1e-12), max value].
std::vector<double> log_spaced_thresholds(std::span<const double> values,
                                          int count = 200);

/// Error and tail metrics of one trained model on its evaluation set.
/// q95_residual is the 0.95-quantile of |PDE residual|; q95_error the
/// same quantile of |prediction - reference|.
struct MetricsBundle {
  double rel_l2 = 0.0;
  double l_inf = 0.0;
  double q95_residual = 0.0;
  double q95_error = 0.0;
  double mean_abs_residual = 0.0;
};

}  // namespace rra
