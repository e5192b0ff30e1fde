#include "rra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rra {

double rel_l2(std::span<const double> pred, std::span<const double> ref) {
  if (pred.size() != ref.size() || pred.empty())
    throw std::domain_error("rel_l2 needs equal-length nonempty inputs");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw std::domain_error("rel_l2 reference has zero norm");
  return std::sqrt(num) / std::sqrt(den);
}

double l_inf(std::span<const double> pred, std::span<const double> ref) {
  if (pred.size() != ref.size() || pred.empty())
    throw std::domain_error("l_inf needs equal-length nonempty inputs");
  double m = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    m = std::max(m, std::abs(pred[i] - ref[i]));
  return m;
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::domain_error("quantile of an empty sample");
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("quantile level must lie in (0,1)");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double pos = q * n;
  const double snapped = std::round(pos);
  if (std::abs(pos - snapped) <= 1e-9 * n) pos = snapped;
  auto k = static_cast<std::size_t>(std::ceil(pos));
  k = std::clamp<std::size_t>(k, 1, v.size());
  return v[k - 1];
}

std::vector<SurvivalPoint> survival_curve(std::span<const double> values,
                                          std::span<const double> thresholds) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  std::vector<SurvivalPoint> out;
  out.reserve(thresholds.size());
  const double n = static_cast<double>(v.size());
  for (double x : thresholds) {
    // ties at the threshold count as non-exceeding
    const auto above = v.end() - std::upper_bound(v.begin(), v.end(), x);
    out.push_back({x, n > 0 ? static_cast<double>(above) / n : 0.0});
  }
  return out;
}

std::vector<double> log_spaced_thresholds(std::span<const double> values, int count) {
  if (values.empty() || count < 2)
    throw std::domain_error("thresholds need values and count >= 2");
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  lo = std::max(lo, 1e-12);
  hi = std::max(hi, lo * (1.0 + 1e-12));
  std::vector<double> t(count);
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < count; ++i)
    t[i] = std::exp(la + (lb - la) * i / (count - 1.0));
  // exp/log rounding must not land the endpoints inside the data range
  t.front() = lo;
  t.back() = hi;
  return t;
}

}  // namespace rra
