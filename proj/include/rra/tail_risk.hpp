#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rra {

/// A finite sample of nonnegative residual magnitudes from one epoch's
/// collocation points. Entries must be finite and >= 0; the batch is
/// never empty.
class ResidualBatch {
public:
  explicit ResidualBatch(std::vector<double> values);

  /// Builds a batch from signed residuals by taking magnitudes.
  static ResidualBatch from_signed(std::span<const double> signed_residuals);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

private:
  std::vector<double> values_;
};

/// Tail geometry at level alpha for a sample of size n:
///   t = (1-alpha)*n,  m = floor(t),  s = t - m in [0,1).
/// t is snapped to the nearest integer when within 1e-9*n, so that
/// levels like alpha=0.95 with n=10000 give an exact integer tail
/// instead of s ~ 1e-13 from rounding of (1-alpha).
struct TailSpec {
  double alpha;
  std::size_t n;
  double t;
  std::size_t m;
  double s;

  TailSpec(double alpha, std::size_t n);
  bool integer_tail() const { return s == 0.0; }
};

/// Empirical CVaR together with the quantities that define it: the
/// minimizing threshold (VaR), the tail index set and the per-sample
/// weights w_i of the weighted-mean view value = (1/N) sum w_i R_i.
/// Weights are N/t on the strict top-m set, s*N/t on the boundary
/// order statistic when s > 0, and 0 elsewhere.
struct CVaREstimate {
  double value = 0.0;
  double var_threshold = 0.0;
  std::vector<std::size_t> tail_indices;  // top-m indices, then the boundary index if s > 0
  std::vector<double> weights;            // length N
};

/// alpha-quantile of the empirical CDF, inf{x : F(x) >= alpha}; equals
/// the order statistic R_(ceil(alpha*N)).
double empirical_var(const ResidualBatch& batch, double alpha);

/// Closed-form empirical CVaR: (1/t) (sum of the top-m order statistics
/// + s * R_(N-m)). Ties are broken stably by original index; any valid
/// selection gives the same value.
CVaREstimate empirical_cvar(const ResidualBatch& batch, double alpha);

/// Rockafellar-Uryasev objective eta + (1/((1-alpha)N)) sum (R_i - eta)_+.
double ru_objective(const ResidualBatch& batch, double alpha, double eta);

/// Result of scanning the RU objective over all order statistics plus
/// gap midpoints. The minimizer set of a convex piecewise-linear
/// function with breakpoints at the data is an interval [eta_lo, eta_hi]
/// (a singleton when eta_lo == eta_hi).
struct RuMinimum {
  double eta_lo = 0.0;
  double eta_hi = 0.0;
  double value = 0.0;
};

/// Brute-force minimization of the RU objective. Exact for piecewise
/// linear objectives; used as the independent oracle for empirical_cvar.
RuMinimum ru_minimize_bruteforce(const ResidualBatch& batch, double alpha);

/// Hinge penalty core (CVaR_alpha(R) - eps)_+^2 (excluding the outer
/// penalty weight).
double cvar_hinge_core(const ResidualBatch& batch, double alpha, double eps);

enum class ExcessWeighting { uniform, topk };

/// Mean-excess penalty core.
///   uniform: mean((R_i - eps)_+^2)
///   topk:    (1/N) sum w_i (R_i - eps)_+^2 with the CVaR weights of
///            empirical_cvar (fractional boundary weight when t is not
///            an integer).
double mean_excess_core(const ResidualBatch& batch, double eps,
                        ExcessWeighting weighting, double alpha = 0.0);

/// Checks mean_excess_core(topk) >= cvar_hinge_core at the same (alpha,
/// eps), with a 1e-12 relative slack for rounding. Holds for any t; the
/// integer-t case is the textbook statement.
bool verify_jensen_bound(const ResidualBatch& batch, double alpha, double eps);

/// d/dR_i of cvar_hinge_core with the tail set frozen:
///   2 * 1{CVaR > eps} * (CVaR - eps) * w_i / N.
/// Zero subgradient convention at CVaR == eps.
std::vector<double> cvar_hinge_gradient(const ResidualBatch& batch, double alpha,
                                        double eps);

/// d/dR_i of mean_excess_core: 2 w_i (R_i - eps)_+ / N (w_i = 1 for
/// uniform weighting). Zero subgradient convention at R_i == eps.
std::vector<double> mean_excess_gradient(const ResidualBatch& batch, double eps,
                                         ExcessWeighting weighting,
                                         double alpha = 0.0);

}  // namespace rra
