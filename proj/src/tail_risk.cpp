#include "rra/tail_risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rra {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("alpha must lie in (0,1)");
}

// Indices sorted ascending by (value, original index). Stable ordering
// makes tail selection deterministic under ties.
std::vector<std::size_t> sorted_indices(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

}  // namespace

ResidualBatch::ResidualBatch(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::domain_error("residual batch must be nonempty");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::domain_error("residual batch entry is not finite");
    if (v < 0.0) throw std::domain_error("residual batch entry is negative");
  }
}

ResidualBatch ResidualBatch::from_signed(std::span<const double> signed_residuals) {
  std::vector<double> mags(signed_residuals.size());
  for (std::size_t i = 0; i < signed_residuals.size(); ++i)
    mags[i] = std::abs(signed_residuals[i]);
  return ResidualBatch(std::move(mags));
}

TailSpec::TailSpec(double alpha_, std::size_t n_) : alpha(alpha_), n(n_) {
  check_alpha(alpha);
  if (n == 0) throw std::domain_error("tail spec requires n >= 1");
  t = (1.0 - alpha) * static_cast<double>(n);
  const double snapped = std::round(t);
  if (std::abs(t - snapped) <= 1e-9 * static_cast<double>(n) && snapped > 0.0) t = snapped;
  m = static_cast<std::size_t>(std::floor(t));
  s = t - static_cast<double>(m);
}

double empirical_var(const ResidualBatch& batch, double alpha) {
  check_alpha(alpha);
  std::vector<double> v = batch.values();
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double q = alpha * n;
  const double snapped = std::round(q);
  if (std::abs(q - snapped) <= 1e-9 * n) q = snapped;
  auto k = static_cast<std::size_t>(std::ceil(q));
  k = std::clamp<std::size_t>(k, 1, v.size());
  return v[k - 1];
}

CVaREstimate empirical_cvar(const ResidualBatch& batch, double alpha) {
  const TailSpec tail(alpha, batch.size());
  const auto& v = batch.values();
  const std::size_t n = v.size();
  const auto order = sorted_indices(v);

  CVaREstimate est;
  est.weights.assign(n, 0.0);
  const double w_tail = static_cast<double>(n) / tail.t;

  // Strict top-m set: the last m positions in ascending order.
  double tail_sum = 0.0;
  for (std::size_t pos = n - tail.m; pos < n; ++pos) {
    const std::size_t i = order[pos];
    est.tail_indices.push_back(i);
    est.weights[i] = w_tail;
    tail_sum += v[i];
  }

  // Boundary order statistic R_(N-m) carries the fractional weight.
  // m < n is guaranteed by t = (1-alpha)n < n, except for the alpha->0
  // snap where t == n and the tail is the whole sample.
  est.var_threshold = tail.m < n ? v[order[n - tail.m - 1]] : v[order[0]];
  if (tail.s > 0.0) {
    const std::size_t b = order[n - tail.m - 1];
    est.tail_indices.push_back(b);
    est.weights[b] += tail.s * w_tail;
    tail_sum += tail.s * v[b];
  }

  est.value = tail_sum / tail.t;
  return est;
}

double ru_objective(const ResidualBatch& batch, double alpha, double eta) {
  check_alpha(alpha);
  const auto& v = batch.values();
  double acc = 0.0;
  for (double r : v) acc += std::max(r - eta, 0.0);
  return eta + acc / ((1.0 - alpha) * static_cast<double>(v.size()));
}

RuMinimum ru_minimize_bruteforce(const ResidualBatch& batch, double alpha) {
  check_alpha(alpha);
  std::vector<double> pts = batch.values();
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  std::vector<double> candidates;
  candidates.push_back(pts.front() - 1.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    candidates.push_back(pts[i]);
    if (i + 1 < pts.size()) candidates.push_back(0.5 * (pts[i] + pts[i + 1]));
  }
  candidates.push_back(pts.back() + 1.0);

  double best = std::numeric_limits<double>::infinity();
  for (double eta : candidates) best = std::min(best, ru_objective(batch, alpha, eta));

  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  RuMinimum out;
  out.value = best;
  out.eta_lo = std::numeric_limits<double>::infinity();
  out.eta_hi = -std::numeric_limits<double>::infinity();
  for (double eta : candidates) {
    if (ru_objective(batch, alpha, eta) <= best + tol) {
      out.eta_lo = std::min(out.eta_lo, eta);
      out.eta_hi = std::max(out.eta_hi, eta);
    }
  }
  return out;
}

double cvar_hinge_core(const ResidualBatch& batch, double alpha, double eps) {
  if (!(eps >= 0.0)) throw std::domain_error("eps must be >= 0");
  const double excess = std::max(empirical_cvar(batch, alpha).value - eps, 0.0);
  return excess * excess;
}

double mean_excess_core(const ResidualBatch& batch, double eps,
                        ExcessWeighting weighting, double alpha) {
  if (!(eps >= 0.0)) throw std::domain_error("eps must be >= 0");
  const auto& v = batch.values();
  const double n = static_cast<double>(v.size());
  double acc = 0.0;
  if (weighting == ExcessWeighting::uniform) {
    for (double r : v) {
      const double e = std::max(r - eps, 0.0);
      acc += e * e;
    }
  } else {
    const auto est = empirical_cvar(batch, alpha);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (est.weights[i] == 0.0) continue;
      const double e = std::max(v[i] - eps, 0.0);
      acc += est.weights[i] * e * e;
    }
  }
  return acc / n;
}

bool verify_jensen_bound(const ResidualBatch& batch, double alpha, double eps) {
  const double ms = mean_excess_core(batch, eps, ExcessWeighting::topk, alpha);
  const double hinge = cvar_hinge_core(batch, alpha, eps);
  return ms >= hinge - 1e-12 * std::max(1.0, hinge);
}

std::vector<double> cvar_hinge_gradient(const ResidualBatch& batch, double alpha,
                                        double eps) {
  const auto est = empirical_cvar(batch, alpha);
  const double n = static_cast<double>(batch.size());
  std::vector<double> grad(batch.size(), 0.0);
  if (est.value <= eps) return grad;
  const double outer = 2.0 * (est.value - eps);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = outer * est.weights[i] / n;
  return grad;
}

std::vector<double> mean_excess_gradient(const ResidualBatch& batch, double eps,
                                         ExcessWeighting weighting, double alpha) {
  const auto& v = batch.values();
  const double n = static_cast<double>(v.size());
  std::vector<double> grad(v.size(), 0.0);
  if (weighting == ExcessWeighting::uniform) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] > eps) grad[i] = 2.0 * (v[i] - eps) / n;
  } else {
    const auto est = empirical_cvar(batch, alpha);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] > eps && est.weights[i] != 0.0)
        grad[i] = 2.0 * est.weights[i] * (v[i] - eps) / n;
  }
  return grad;
}

}  // namespace rra
