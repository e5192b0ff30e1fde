#include "rra/cole_hopf.hpp"

#include <cmath>
#include <map>
#include <utility>
#include <stdexcept>

#include "rra/jet.hpp"

namespace rra {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

namespace {

// Orthonormal (physicists') Hermite value h_n(x) and h_{n-1}(x); the
// derivative is h_n'(x) = sqrt(2n) h_{n-1}(x). Intermediate h_j(x) blow
// up when x sits beyond the order-j turning point, so the pair is kept
// rescaled with an explicit power-of-2^512 exponent.
struct HermiteEval {
  double p1 = 0.0;  // h_n(x), scaled by 2^(512*expo)
  double p2 = 0.0;  // h_{n-1}(x), same scaling
  long expo = 0;
};

HermiteEval hermite_scaled(int n, double x) {
  constexpr double kBig = 0x1.0p512, kBigInv = 0x1.0p-512;
  HermiteEval e;
  e.p1 = std::pow(kPi, -0.25);
  for (int j = 1; j <= n; ++j) {
    const double p3 = e.p2;
    e.p2 = e.p1;
    e.p1 = x * std::sqrt(2.0 / j) * e.p2 - std::sqrt((j - 1.0) / j) * p3;
    const double mag = std::max(std::abs(e.p1), std::abs(e.p2));
    if (mag > kBig) {
      e.p1 *= kBigInv;
      e.p2 *= kBigInv;
      ++e.expo;
    } else if (mag != 0.0 && mag < kBigInv) {
      e.p1 *= kBig;
      e.p2 *= kBig;
      --e.expo;
    }
  }
  return e;
}

std::pair<double, double> hermite_pair(int n, double x) {
  HermiteEval e = hermite_scaled(n, x);
  const double unscale = e.expo > 0 ? 0x1.0p512 : (e.expo < 0 ? 0x1.0p-512 : 1.0);
  for (long k = 0; k != e.expo; k += e.expo > 0 ? 1 : -1) {
    e.p1 *= unscale;
    e.p2 *= unscale;
  }
  return {e.p1, e.p2};
}

}  // namespace

GaussHermite gauss_hermite(int order) {
  if (order < 2) throw std::domain_error("quadrature order must be >= 2");
  const int n = order;
  GaussHermite gh;
  gh.x.assign(n, 0.0);
  gh.w.assign(n, 0.0);

  // All roots lie inside (-R, R), R = sqrt(2n+1), with spacing bounded
  // below by ~pi/sqrt(2n). A scan at a quarter of that spacing brackets
  // every positive root; bisection plus a Newton polish nails it. This
  // stays stable at orders in the hundreds, unlike chained asymptotic
  // starting guesses.
  const double rmax = std::sqrt(2.0 * n + 1.0) + 0.5;
  const double step = kPi / (4.0 * std::sqrt(2.0 * n));
  std::vector<double> roots;
  const bool odd = (n % 2) != 0;
  if (odd) roots.push_back(0.0);

  double xa = odd ? step * 0.25 : 0.0;
  double fa = hermite_pair(n, xa).first;
  for (double xb = xa + step; xa < rmax; xa = xb, xb += step) {
    const double fb = hermite_pair(n, xb).first;
    if (fa == 0.0) {
      roots.push_back(xa);
    } else if (fa * fb < 0.0) {
      double lo = xa, hi = xb, flo = fa;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = hermite_pair(n, mid).first;
        if (flo * fm <= 0.0)
          hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      double z = 0.5 * (lo + hi);
      for (int it = 0; it < 4; ++it) {
        // the h_n/h_{n-1} ratio is invariant under the scaling
        const HermiteEval he = hermite_scaled(n, z);
        z -= he.p1 / (std::sqrt(2.0 * n) * he.p2);
      }
      roots.push_back(z);
    }
    fa = fb;
  }
  if (static_cast<int>(roots.size()) != (n + 1) / 2)
    throw std::runtime_error("gauss_hermite: root bracketing failed");

  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    const double z = roots[half - 1 - i];  // descending, largest first
    const double pp = std::sqrt(2.0 * n) * hermite_pair(n, z).second;
    gh.x[i] = z;
    gh.x[n - 1 - i] = -z;
    gh.w[i] = 2.0 / (pp * pp);
    gh.w[n - 1 - i] = gh.w[i];
  }
  return gh;
}

double burgers_cole_hopf(double x, double t, double nu, int quad_order) {
  if (!(nu > 0.0)) throw std::domain_error("viscosity must be positive");
  if (t < 0.0) throw std::domain_error("time must be nonnegative");
  if (t < 1e-14) return -sin_pi(x);

  static thread_local std::map<int, GaussHermite> cache;
  auto it = cache.find(quad_order);
  if (it == cache.end()) it = cache.emplace(quad_order, gauss_hermite(quad_order)).first;
  const GaussHermite& gh = it->second;

  // With the x-derivative taken on the initial-condition factor,
  //   u(x,t) = - sum w sin(pi(x - a z)) E / sum w E,
  //   a = sqrt(4 nu t),  E = exp(-cos(pi(x - a z)) / (2 pi nu)),
  // whose integrands stay bounded, unlike the kernel-differentiated form
  // with its (a/t) z weighting. The max exponent is factored out so the
  // quotient stays finite for 1/(2 pi nu) ~ 50.
  const double a = std::sqrt(4.0 * nu * t);
  const double scale = 1.0 / (2.0 * kPi * nu);

  double emax = -1e300;
  const int n = quad_order;
  for (int i = 0; i < n; ++i) {
    const double expo = -cos_pi(x - a * gh.x[i]) * scale;
    if (expo > emax) emax = expo;
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = x - a * gh.x[i];
    const double e = gh.w[i] * std::exp(-cos_pi(w) * scale - emax);
    num += e * sin_pi(w);
    den += e;
  }
  return -num / den;
}

}  // namespace rra
