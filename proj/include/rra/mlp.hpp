#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rra/jet.hpp"
#include "rra/rng.hpp"

namespace rra {

enum class Activation { tanh_fn, silu };
enum class OutputActivation { linear, tanh_out };
enum class WrapperKind { identity, heat_hard, burgers_hard };

struct NetworkConfig {
  int depth = 4;  // hidden layers
  int width = 80;
  int input_dim = 2;
  Activation activation = Activation::tanh_fn;
  OutputActivation output = OutputActivation::linear;
};

/// Fully-connected scalar-output network with Xavier-uniform weights and
/// zero biases. Evaluation propagates directional-derivative jets up to
/// order 3 through every layer, and the reverse pass accumulates exact
/// parameter gradients of any function of the output jet.
///
/// The scratch keeps jet coefficients as per-layer planes (one
/// contiguous array per derivative order) so the affine and composition
/// loops vectorize; these are the innermost kernels of training.
template <typename T>
class Mlp {
public:
  struct Scratch {
    std::vector<T> in;    // 4 planes of input_dim
    std::vector<T> a;     // depth * 4 planes of width (pre-activation)
    std::vector<T> z;     // depth * 4 planes of width (post-activation)
    std::vector<T> sig;   // depth * 5 planes of width (derivative tables)
    std::array<T, 4> out_pre{};
    std::array<T, 5> out_sig{};  // only used for tanh output
    std::vector<T> zbar;  // 4 planes of width
    std::vector<T> abar;  // 4 planes of width
    int ord = 0;
  };

  Mlp(NetworkConfig cfg, std::uint64_t seed) : cfg_(cfg) {
    if (cfg_.depth < 1 || cfg_.width < 1 || cfg_.input_dim < 1)
      throw std::domain_error("network needs depth >= 1, width >= 1, input_dim >= 1");
    layer_in_.resize(n_layers());
    w_off_.resize(n_layers());
    b_off_.resize(n_layers());
    std::size_t off = 0;
    for (int l = 0; l < n_layers(); ++l) {
      const int in = l == 0 ? cfg_.input_dim : cfg_.width;
      const int out = l == cfg_.depth ? 1 : cfg_.width;
      layer_in_[l] = in;
      w_off_[l] = off;
      off += static_cast<std::size_t>(in) * out;
      b_off_[l] = off;
      off += out;
    }
    params_.assign(off, T(0));
    init_xavier(seed);
  }

  const NetworkConfig& config() const { return cfg_; }
  std::size_t param_count() const { return params_.size(); }
  std::vector<T>& params() { return params_; }
  const std::vector<T>& params() const { return params_; }

  Scratch make_scratch() const {
    Scratch ws;
    ws.in.assign(4u * cfg_.input_dim, T(0));
    ws.a.assign(static_cast<std::size_t>(cfg_.depth) * 4u * cfg_.width, T(0));
    ws.z.assign(ws.a.size(), T(0));
    ws.sig.assign(static_cast<std::size_t>(cfg_.depth) * 5u * cfg_.width, T(0));
    ws.zbar.assign(4u * cfg_.width, T(0));
    ws.abar.assign(4u * cfg_.width, T(0));
    return ws;
  }

  /// Forward jet pass along coordinate `dir`, derivatives up to `ord`.
  /// Fills the scratch with everything the reverse pass needs.
  Jet<T> jet(const double* x, int dir, int ord, Scratch& ws) const {
    switch (ord) {
      case 0: return jet_impl<0>(x, dir, ws);
      case 1: return jet_impl<1>(x, dir, ws);
      case 2: return jet_impl<2>(x, dir, ws);
      case 3: return jet_impl<3>(x, dir, ws);
      default: throw std::domain_error("jet order must lie in [0,3]");
    }
  }

  /// Reverse pass from an adjoint of the output jet. Must follow a jet()
  /// call on the same scratch. Accumulates into `grad` (params layout).
  void backprop_from(const std::array<T, 4>& out_bar, Scratch& ws,
                     std::span<T> grad) const {
    switch (ws.ord) {
      case 0: return backprop_impl<0>(out_bar, ws, grad);
      case 1: return backprop_impl<1>(out_bar, ws, grad);
      case 2: return backprop_impl<2>(out_bar, ws, grad);
      default: return backprop_impl<3>(out_bar, ws, grad);
    }
  }

private:
  int n_layers() const { return cfg_.depth + 1; }

  template <int K>
  Jet<T> jet_impl(const double* x, int dir, Scratch& ws) const {
    ws.ord = K;
    const int d_in = cfg_.input_dim;
    const int width = cfg_.width;
    for (int i = 0; i < d_in; ++i) {
      ws.in[0 * d_in + i] = static_cast<T>(x[i]);
      ws.in[1 * d_in + i] = i == dir ? T(1) : T(0);
      ws.in[2 * d_in + i] = T(0);
      ws.in[3 * d_in + i] = T(0);
    }

    const T* cur = ws.in.data();
    int cn = d_in;
    for (int l = 0; l < cfg_.depth; ++l) {
      const T* w = params_.data() + w_off_[l];
      const T* b = params_.data() + b_off_[l];
      T* a = ws.a.data() + static_cast<std::size_t>(l) * 4 * width;
      T* z = ws.z.data() + static_cast<std::size_t>(l) * 4 * width;
      T* sg = ws.sig.data() + static_cast<std::size_t>(l) * 5 * width;

      for (int o = 0; o < width; ++o) {
        const T* row = w + static_cast<std::size_t>(o) * cn;
        T a0 = b[o], a1{}, a2{}, a3{};
        for (int i = 0; i < cn; ++i) {
          const T wv = row[i];
          a0 += wv * cur[0 * cn + i];
          if constexpr (K >= 1) a1 += wv * cur[1 * cn + i];
          if constexpr (K >= 2) a2 += wv * cur[2 * cn + i];
          if constexpr (K >= 3) a3 += wv * cur[3 * cn + i];
        }
        a[0 * width + o] = a0;
        if constexpr (K >= 1) a[1 * width + o] = a1;
        if constexpr (K >= 2) a[2 * width + o] = a2;
        if constexpr (K >= 3) a[3 * width + o] = a3;

        const auto s = cfg_.activation == Activation::tanh_fn ? tanh_derivs(a0)
                                                              : silu_derivs(a0);
        for (int j = 0; j < 5; ++j) sg[j * width + o] = s[j];
        z[0 * width + o] = s[0];
        if constexpr (K >= 1) z[1 * width + o] = s[1] * a1;
        if constexpr (K >= 2) z[2 * width + o] = s[1] * a2 + s[2] * a1 * a1;
        if constexpr (K >= 3)
          z[3 * width + o] = s[1] * a3 + T(3) * s[2] * a1 * a2 + s[3] * a1 * a1 * a1;
      }
      cur = z;
      cn = width;
    }

    const int lo = cfg_.depth;
    const T* w = params_.data() + w_off_[lo];
    T o0 = params_[b_off_[lo]], o1{}, o2{}, o3{};
    for (int i = 0; i < cn; ++i) {
      const T wv = w[i];
      o0 += wv * cur[0 * cn + i];
      if constexpr (K >= 1) o1 += wv * cur[1 * cn + i];
      if constexpr (K >= 2) o2 += wv * cur[2 * cn + i];
      if constexpr (K >= 3) o3 += wv * cur[3 * cn + i];
    }
    ws.out_pre = {o0, o1, o2, o3};
    Jet<T> pre;
    pre.d = ws.out_pre;
    if (cfg_.output == OutputActivation::tanh_out) {
      ws.out_sig = tanh_derivs(o0);
      return jet_compose(pre, ws.out_sig, K);
    }
    return pre;
  }

  template <int K>
  void backprop_impl(const std::array<T, 4>& out_bar, Scratch& ws,
                     std::span<T> grad) const {
    const int width = cfg_.width;
    std::array<T, 4> pre_bar{};
    if (cfg_.output == OutputActivation::tanh_out) {
      Jet<T> pre;
      pre.d = ws.out_pre;
      jet_compose_adjoint(pre, ws.out_sig, out_bar, pre_bar, K);
    } else {
      pre_bar = out_bar;
    }

    // output layer: gradient of the weight vector and seed zbar planes
    const int lo = cfg_.depth;
    const T* zl = ws.z.data() + static_cast<std::size_t>(cfg_.depth - 1) * 4 * width;
    {
      T* gw = grad.data() + w_off_[lo];
      const T* w = params_.data() + w_off_[lo];
      const T c0 = pre_bar[0], c1 = pre_bar[1], c2 = pre_bar[2], c3 = pre_bar[3];
      T* zb = ws.zbar.data();
      for (int i = 0; i < width; ++i) {
        T acc = c0 * zl[0 * width + i];
        if constexpr (K >= 1) acc += c1 * zl[1 * width + i];
        if constexpr (K >= 2) acc += c2 * zl[2 * width + i];
        if constexpr (K >= 3) acc += c3 * zl[3 * width + i];
        gw[i] += acc;
        zb[0 * width + i] = w[i] * c0;
        if constexpr (K >= 1) zb[1 * width + i] = w[i] * c1;
        if constexpr (K >= 2) zb[2 * width + i] = w[i] * c2;
        if constexpr (K >= 3) zb[3 * width + i] = w[i] * c3;
      }
      grad[b_off_[lo]] += c0;
    }

    for (int l = cfg_.depth - 1; l >= 0; --l) {
      const T* a = ws.a.data() + static_cast<std::size_t>(l) * 4 * width;
      const T* sg = ws.sig.data() + static_cast<std::size_t>(l) * 5 * width;
      T* zb = ws.zbar.data();
      T* ab = ws.abar.data();

      // adjoint of the activation composition, plane-wise over neurons
      for (int i = 0; i < width; ++i) {
        const T s1 = sg[1 * width + i], s2 = sg[2 * width + i];
        const T a1 = a[1 * width + i];
        T b0 = zb[0 * width + i] * s1;
        T b1{}, b2{}, b3{};
        if constexpr (K >= 1) {
          const T y1 = zb[1 * width + i];
          b0 += y1 * s2 * a1;
          b1 = y1 * s1;
        }
        if constexpr (K >= 2) {
          const T s3 = sg[3 * width + i];
          const T a2 = a[2 * width + i];
          const T y2 = zb[2 * width + i];
          b0 += y2 * (s3 * a1 * a1 + s2 * a2);
          b1 += y2 * T(2) * s2 * a1;
          b2 = y2 * s1;
        }
        if constexpr (K >= 3) {
          const T s3 = sg[3 * width + i], s4 = sg[4 * width + i];
          const T a2 = a[2 * width + i], a3 = a[3 * width + i];
          const T y3 = zb[3 * width + i];
          b0 += y3 * (s4 * a1 * a1 * a1 + T(3) * s3 * a1 * a2 + s2 * a3);
          b1 += y3 * (T(3) * s3 * a1 * a1 + T(3) * s2 * a2);
          b2 += y3 * T(3) * s2 * a1;
          b3 = y3 * s1;
        }
        ab[0 * width + i] = b0;
        if constexpr (K >= 1) ab[1 * width + i] = b1;
        if constexpr (K >= 2) ab[2 * width + i] = b2;
        if constexpr (K >= 3) ab[3 * width + i] = b3;
      }

      const int in_n = layer_in_[l];
      const T* below = l == 0
                           ? ws.in.data()
                           : ws.z.data() + static_cast<std::size_t>(l - 1) * 4 * width;
      T* gw = grad.data() + w_off_[l];
      T* gb = grad.data() + b_off_[l];
      const T* w = params_.data() + w_off_[l];

      if (l > 0) {
        for (int k = 0; k <= K; ++k)
          for (int i = 0; i < in_n; ++i) zb[k * in_n + i] = T(0);
      }

      for (int o = 0; o < width; ++o) {
        const T c0 = ab[0 * width + o];
        const T c1 = K >= 1 ? ab[1 * width + o] : T(0);
        const T c2 = K >= 2 ? ab[2 * width + o] : T(0);
        const T c3 = K >= 3 ? ab[3 * width + o] : T(0);
        T* grow = gw + static_cast<std::size_t>(o) * in_n;
        const T* wrow = w + static_cast<std::size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) {
          T acc = c0 * below[0 * in_n + i];
          if constexpr (K >= 1) acc += c1 * below[1 * in_n + i];
          if constexpr (K >= 2) acc += c2 * below[2 * in_n + i];
          if constexpr (K >= 3) acc += c3 * below[3 * in_n + i];
          grow[i] += acc;
        }
        if (l > 0) {
          for (int i = 0; i < in_n; ++i) {
            const T wv = wrow[i];
            zb[0 * in_n + i] += wv * c0;
            if constexpr (K >= 1) zb[1 * in_n + i] += wv * c1;
            if constexpr (K >= 2) zb[2 * in_n + i] += wv * c2;
            if constexpr (K >= 3) zb[3 * in_n + i] += wv * c3;
          }
        }
        gb[o] += c0;
      }
    }
  }

  void init_xavier(std::uint64_t seed) {
    Rng rng(seed);
    for (int l = 0; l < n_layers(); ++l) {
      const int in = layer_in_[l];
      const int out = l == cfg_.depth ? 1 : cfg_.width;
      const double limit = std::sqrt(6.0 / (in + out));
      for (std::size_t i = 0; i < static_cast<std::size_t>(in) * out; ++i)
        params_[w_off_[l] + i] = static_cast<T>(rng.uniform(-limit, limit));
      // biases stay zero
    }
  }

  NetworkConfig cfg_;
  std::vector<T> params_;
  std::vector<int> layer_in_;
  std::vector<std::size_t> w_off_, b_off_;
};

/// Trial-solution wrapper u = g(x) * net(x) + h(x) enforcing hard
/// constraints by construction:
///   heat_hard:    u(x,t) = t x (1-x) net + sin(20 pi x)
///   burgers_hard: u(x,t) = t (1-x^2) net - sin(pi x)
/// Coordinate order is (x, t). identity passes the raw output through.
template <typename T>
struct WrapperJets {
  Jet<T> g;  // multiplier
  Jet<T> h;  // additive part
};

/// The analytic coefficients are evaluated in double regardless of the
/// field precision and cast once at the end, so e.g. sin(20 pi x) keeps
/// its fractional phase instead of losing it to a float 20*x product.
template <typename T>
WrapperJets<T> wrapper_jets(WrapperKind kind, const double* p, int dir, int ord) {
  Jet<double> g, h;
  const double x = p[0];
  const double t = p[1];
  switch (kind) {
    case WrapperKind::identity:
      g = Jet<double>::constant(1.0);
      break;
    case WrapperKind::heat_hard: {
      const double xx = x * (1.0 - x);
      if (dir == 0) {
        g.d = {t * xx, t * (1.0 - 2.0 * x), -2.0 * t, 0.0};
        const auto s = sin_pi_derivs(20.0 * x);  // d/dw of sin(pi w), w = 20x
        double scale = 1.0;
        for (int k = 0; k <= ord; ++k, scale *= 20.0) h.d[k] = s[k] * scale;
      } else {
        g.d = {t * xx, xx, 0.0, 0.0};
        h = Jet<double>::constant(sin_pi(20.0 * x));
      }
      break;
    }
    case WrapperKind::burgers_hard: {
      const double q = 1.0 - x * x;
      if (dir == 0) {
        g.d = {t * q, -2.0 * t * x, -2.0 * t, 0.0};
        const auto s = sin_pi_derivs(x);
        for (int k = 0; k <= ord; ++k) h.d[k] = -s[k];
      } else {
        g.d = {t * q, q, 0.0, 0.0};
        h = Jet<double>::constant(-sin_pi(x));
      }
      break;
    }
  }
  WrapperJets<T> w;
  for (int k = 0; k < 4; ++k) {
    w.g.d[k] = static_cast<T>(g.d[k]);
    w.h.d[k] = static_cast<T>(h.d[k]);
  }
  return w;
}

/// Network plus trial-solution wrapper: the constrained field the PDE
/// residuals see. All jets and gradients refer to the wrapped output.
template <typename T>
class Field {
public:
  Field(NetworkConfig cfg, WrapperKind kind, std::uint64_t seed)
      : net_(cfg, seed), kind_(kind) {}

  Mlp<T>& net() { return net_; }
  const Mlp<T>& net() const { return net_; }
  WrapperKind wrapper() const { return kind_; }
  typename Mlp<T>::Scratch make_scratch() const { return net_.make_scratch(); }

  Jet<T> jet(const std::array<double, 2>& p, int dir, int ord,
             typename Mlp<T>::Scratch& ws) const {
    const Jet<T> n = net_.jet(p.data(), dir, ord, ws);
    if (kind_ == WrapperKind::identity) return n;
    const auto w = wrapper_jets<T>(kind_, p.data(), dir, ord);
    return jet_add(jet_mul(w.g, n, ord), w.h, ord);
  }

  /// Forward + reverse in one call: returns the wrapped jet and adds the
  /// parameter gradient of <ybar, wrapped jet> into grad.
  Jet<T> jet_backprop(const std::array<double, 2>& p, int dir, int ord,
                      const std::array<T, 4>& ybar, typename Mlp<T>::Scratch& ws,
                      std::span<T> grad) const {
    const Jet<T> n = net_.jet(p.data(), dir, ord, ws);
    if (kind_ == WrapperKind::identity) {
      net_.backprop_from(ybar, ws, grad);
      return n;
    }
    const auto w = wrapper_jets<T>(kind_, p.data(), dir, ord);
    std::array<T, 4> nbar{};
    jet_mul_adjoint(w.g, ybar, nbar, ord);
    net_.backprop_from(nbar, ws, grad);
    return jet_add(jet_mul(w.g, n, ord), w.h, ord);
  }

  T value(const std::array<double, 2>& p, typename Mlp<T>::Scratch& ws) const {
    return jet(p, 0, 0, ws).d[0];
  }

  /// Pure directional derivative d^k/dx_c^k of the wrapped field. Mixed
  /// multi-indices are not supported by the jet propagation.
  double derivative(const std::array<double, 2>& p, int order_x0, int order_x1,
                    typename Mlp<T>::Scratch& ws) const {
    if (order_x0 < 0 || order_x1 < 0 || order_x0 > 3 || order_x1 > 3)
      throw std::domain_error("derivative order must lie in [0,3]");
    if (order_x0 > 0 && order_x1 > 0)
      throw std::domain_error("mixed derivatives are not supported");
    const int dir = order_x1 > 0 ? 1 : 0;
    const int ord = order_x0 + order_x1;
    return static_cast<double>(jet(p, dir, ord, ws).d[ord]);
  }

private:
  Mlp<T> net_;
  WrapperKind kind_;
};

}  // namespace rra
