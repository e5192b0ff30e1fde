#pragma once

#include <array>
#include <cmath>

namespace rra {

/// sin(pi*x) / cos(pi*x) with exact argument reduction. The argument is
/// reduced to [-1,1] and folded into [-1/2,1/2], so integer x gives an
/// exact zero even in single precision (sin_pi(20.0f) == 0.0f, unlike
/// sin(20*pi_f)). Hard-constraint wrappers rely on this at boundaries.
template <typename T>
T sin_pi(T x) {
  T r = x - T(2) * std::round(x / T(2));  // r in [-1,1]
  if (r > T(0.5))
    r = T(1) - r;
  else if (r < T(-0.5))
    r = T(-1) - r;
  return std::sin(T(3.14159265358979323846L) * r);
}

template <typename T>
T cos_pi(T x) {
  T r = std::abs(x - T(2) * std::round(x / T(2)));  // r in [0,1]
  const T sign = r > T(0.5) ? T(-1) : T(1);
  if (r > T(0.5)) r = T(1) - r;
  return sign * std::cos(T(3.14159265358979323846L) * r);
}

/// Truncated derivative jet along one scalar direction: d[k] holds the
/// k-th directional derivative (raw, not Taylor-normalized), k = 0..ord
/// with ord <= 3. Entries above the working order are kept at zero.
template <typename T>
struct Jet {
  std::array<T, 4> d{};

  static Jet constant(T v) {
    Jet j;
    j.d[0] = v;
    return j;
  }

  /// Seed for an input coordinate: value v, slope 1 along the active
  /// direction (slope 0 for passive coordinates).
  static Jet seed(T v, T slope) {
    Jet j;
    j.d[0] = v;
    j.d[1] = slope;
    return j;
  }
};

namespace jet_detail {
inline constexpr double kBinom[4][4] = {
    {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
}

template <typename T>
Jet<T> jet_add(const Jet<T>& a, const Jet<T>& b, int ord) {
  Jet<T> out;
  for (int k = 0; k <= ord; ++k) out.d[k] = a.d[k] + b.d[k];
  return out;
}

template <typename T>
Jet<T> jet_scale(const Jet<T>& a, T c, int ord) {
  Jet<T> out;
  for (int k = 0; k <= ord; ++k) out.d[k] = c * a.d[k];
  return out;
}

/// Leibniz product: (a*b)_k = sum_j C(k,j) a_j b_{k-j}.
template <typename T>
Jet<T> jet_mul(const Jet<T>& a, const Jet<T>& b, int ord) {
  Jet<T> out;
  for (int k = 0; k <= ord; ++k) {
    T acc{};
    for (int j = 0; j <= k; ++j)
      acc += T(jet_detail::kBinom[k][j]) * a.d[j] * b.d[k - j];
    out.d[k] = acc;
  }
  return out;
}

/// Adjoint of jet_mul in its second argument: given ybar for y = g*n with
/// g constant, accumulates nbar_j += sum_{k>=j} ybar_k C(k,j) g_{k-j}.
template <typename T>
void jet_mul_adjoint(const Jet<T>& g, const std::array<T, 4>& ybar,
                     std::array<T, 4>& nbar, int ord) {
  for (int j = 0; j <= ord; ++j) {
    T acc{};
    for (int k = j; k <= ord; ++k)
      acc += ybar[k] * T(jet_detail::kBinom[k][j]) * g.d[k - j];
    nbar[j] += acc;
  }
}

/// Composition y = f(a) by Faa di Bruno up to order 3. sig[i] must hold
/// f^(i)(a_0) for i = 0..ord.
template <typename T>
Jet<T> jet_compose(const Jet<T>& a, const std::array<T, 5>& sig, int ord) {
  Jet<T> out;
  out.d[0] = sig[0];
  if (ord >= 1) out.d[1] = sig[1] * a.d[1];
  if (ord >= 2) out.d[2] = sig[1] * a.d[2] + sig[2] * a.d[1] * a.d[1];
  if (ord >= 3)
    out.d[3] = sig[1] * a.d[3] + T(3) * sig[2] * a.d[1] * a.d[2] +
               sig[3] * a.d[1] * a.d[1] * a.d[1];
  return out;
}

/// Transpose of jet_compose: accumulates abar from ybar. Needs sig up to
/// order ord+1 because the coefficient functions f^(i)(a_0) themselves
/// depend on a_0.
template <typename T>
void jet_compose_adjoint(const Jet<T>& a, const std::array<T, 5>& sig,
                         const std::array<T, 4>& ybar, std::array<T, 4>& abar,
                         int ord) {
  const T a1 = a.d[1], a2 = a.d[2], a3 = a.d[3];
  abar[0] += ybar[0] * sig[1];
  if (ord >= 1) {
    abar[0] += ybar[1] * sig[2] * a1;
    abar[1] += ybar[1] * sig[1];
  }
  if (ord >= 2) {
    abar[0] += ybar[2] * (sig[3] * a1 * a1 + sig[2] * a2);
    abar[1] += ybar[2] * T(2) * sig[2] * a1;
    abar[2] += ybar[2] * sig[1];
  }
  if (ord >= 3) {
    abar[0] += ybar[3] * (sig[4] * a1 * a1 * a1 + T(3) * sig[3] * a1 * a2 + sig[2] * a3);
    abar[1] += ybar[3] * (T(3) * sig[3] * a1 * a1 + T(3) * sig[2] * a2);
    abar[2] += ybar[3] * T(3) * sig[2] * a1;
    abar[3] += ybar[3] * sig[1];
  }
}

/// Derivatives 0..4 of tanh at x. Evaluated through exp, which runs
/// several times faster than libm tanh at the same couple-of-ulp
/// accuracy; the exp overflow limits give the correct saturated values.
template <typename T>
std::array<T, 5> tanh_derivs(T x) {
  const T e = std::exp(T(2) * x);
  const T y = T(1) - T(2) / (e + T(1));
  const T y1 = T(1) - y * y;
  const T y2 = T(-2) * y * y1;
  const T y3 = T(-2) * (y1 * y1 + y * y2);
  const T y4 = T(-2) * (T(3) * y1 * y2 + y * y3);
  return {y, y1, y2, y3, y4};
}

/// Derivatives 0..4 of silu(x) = x * sigmoid(x).
template <typename T>
std::array<T, 5> silu_derivs(T x) {
  const T g = T(1) / (T(1) + std::exp(-x));
  const T g1 = g * (T(1) - g);
  const T g2 = g1 * (T(1) - T(2) * g);
  const T g3 = g2 * (T(1) - T(2) * g) - T(2) * g1 * g1;
  const T g4 = g3 * (T(1) - T(2) * g) - T(6) * g1 * g2;
  return {x * g, g + x * g1, T(2) * g1 + x * g2, T(3) * g2 + x * g3,
          T(4) * g3 + x * g4};
}

/// Derivatives 0..4 of sin(pi*w) at w (argument in units of pi).
template <typename T>
std::array<T, 5> sin_pi_derivs(T w) {
  const T pi = T(3.14159265358979323846L);
  const T s = sin_pi(w), c = cos_pi(w);
  const T p2 = pi * pi;
  return {s, pi * c, -p2 * s, -p2 * pi * c, p2 * p2 * s};
}

/// Derivatives 0..4 of exp at x.
template <typename T>
std::array<T, 5> exp_derivs(T x) {
  const T e = std::exp(x);
  return {e, e, e, e, e};
}

}  // namespace rra
