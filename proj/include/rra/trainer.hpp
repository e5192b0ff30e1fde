#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rra/balancer.hpp"
#include "rra/metrics.hpp"
#include "rra/mlp.hpp"
#include "rra/pde.hpp"
#include "rra/rng.hpp"
#include "rra/tail_risk.hpp"
#include "rra/threshold.hpp"

namespace rra {

enum class Penalty { none, hinge, mean_excess };
enum class Schedule { smooth_first, stiff_first };
enum class OptimizerKind { adam, adamw };
enum class Precision { single, double_prec };

struct TrainConfig {
  int epochs = 15000;
  int warmup = 1000;
  Schedule schedule = Schedule::smooth_first;
  Penalty penalty = Penalty::hinge;
  double alpha = 0.95;
  double lambda_r = 1.0;
  double lambda_ic = 1.0;
  double lambda_bc = 1.0;
  double lambda_cfg = 0.03;
  OptimizerKind optimizer = OptimizerKind::adam;
  double lr0 = 5e-3;
  double lr_min = 1e-5;
  double weight_decay = 1e-2;  // adamw only
  double clip_norm = 5.0;
  std::uint64_t seed = 0;
  bool me_topk_weighting = false;  // weighted mean-excess variant
  bool balancer_enabled = false;
  bool tail_only = false;  // ablation mode: drop L_base after warmup
  double eps_init = 0.5;
  double eps_beta = 0.95;
  double eps_margin = 0.10;
  Precision precision = Precision::single;
  int val_every = 500;
  int threads = 0;  // 0: OpenMP default; fixed count => bitwise reproducible
  std::optional<NetworkConfig> net;
  std::optional<SamplerConfig> sampler;
  std::optional<EvalConfig> eval;
};

/// Paper setup for each benchmark (architecture comes from ProblemSpec).
TrainConfig default_train_config(ProblemKind kind);

/// Cosine annealing: lr_min + (lr0 - lr_min) (1 + cos(pi t / t_max)) / 2.
double cosine_lr(int epoch, double lr0, double lr_min, int t_max);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;
  double l_base = 0.0;
  double l_ic = 0.0;
  double l_bc = 0.0;
  double l_iface_u = 0.0;
  double l_iface_ux = 0.0;
  double l_core = 0.0;
  double eps = 0.0;
  double lambda_p = 0.0;
  double scale_base = 0.0;
  double scale_core = 0.0;
  double val_rel_l2 = std::numeric_limits<double>::quiet_NaN();
};

struct EvalContext {
  std::vector<std::array<double, 2>> points;
  std::vector<double> reference;  // same length as points; empty = no eval
};

struct TrainResult {
  std::vector<EpochRecord> records;
  MetricsBundle metrics;
  std::vector<double> final_abs_residuals;  // on the eval set
  double final_eps = 0.0;
  double final_lambda_p = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

namespace detail {

template <typename T>
struct AdamState {
  std::vector<T> m, v;
  long step = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  explicit AdamState(std::size_t n) : m(n, T(0)), v(n, T(0)) {}

  void update(std::span<T> params, std::span<const T> grad, double lr,
              bool decoupled_decay, double weight_decay) {
    ++step;
    const double bc1 = 1.0 - std::pow(beta1, step);
    const double bc2 = 1.0 - std::pow(beta2, step);
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (decoupled_decay && weight_decay != 0.0)
        params[i] -= static_cast<T>(lr * weight_decay) * params[i];
      m[i] = static_cast<T>(beta1) * m[i] + static_cast<T>(1.0 - beta1) * grad[i];
      v[i] = static_cast<T>(beta2) * v[i] + static_cast<T>(1.0 - beta2) * grad[i] * grad[i];
      const double mh = static_cast<double>(m[i]) / bc1;
      const double vh = static_cast<double>(v[i]) / bc2;
      params[i] -= static_cast<T>(lr * mh / (std::sqrt(vh) + eps));
    }
  }
};

}  // namespace detail

/// One training run of Algorithm-1 style two-phase optimization. The
/// epoch pipeline is split into a pure statistics pass and a gradient
/// pass so tests can probe phase weights, the detached threshold and
/// gradient assembly directly.
template <typename T>
class Trainer {
public:
  struct EpochStats {
    SampleSet samples;
    std::vector<ResidualPartials> rp;  // per interior point
    std::vector<double> abs_res;
    CVaREstimate cvar;
    double l_base = 0.0;
    double l_ic = 0.0;
    double l_bc = 0.0;
    double l_iface_u = 0.0;
    double l_iface_ux = 0.0;
  };

  struct PhaseWeights {
    double base = 0.0;
    double ic = 0.0;
    double bc = 0.0;
    double pen = 0.0;
  };

  Trainer(const ProblemSpec& base_spec, TrainConfig cfg)
      : cfg_(std::move(cfg)),
        spec_(apply_overrides(base_spec, cfg_)),
        field_(spec_.net, spec_.wrapper, Rng::mix(cfg_.seed, 0xF1E7D)),
        threshold_({.eps_init = cfg_.eps_init, .beta = cfg_.eps_beta, .margin = cfg_.eps_margin}),
        balancer_(LossBalancer::defaults(cfg_.lambda_cfg, cfg_.balancer_enabled)) {
#ifdef _OPENMP
    threads_ = cfg_.threads > 0 ? cfg_.threads : omp_get_max_threads();
#else
    threads_ = 1;
#endif
  }

  const ProblemSpec& spec() const { return spec_; }
  const TrainConfig& config() const { return cfg_; }
  Field<T>& field() { return field_; }
  const Field<T>& field() const { return field_; }
  double eps() const { return threshold_.eps(); }

  PhaseWeights phase_weights(int epoch, double lambda_p) const {
    PhaseWeights w;
    w.ic = cfg_.lambda_ic;
    w.bc = cfg_.lambda_bc;
    if (cfg_.penalty == Penalty::none) {
      w.base = cfg_.lambda_r;
      return w;
    }
    const bool in_warmup = epoch < cfg_.warmup;
    if (cfg_.schedule == Schedule::smooth_first) {
      w.base = cfg_.lambda_r;
      w.pen = in_warmup ? 0.0 : lambda_p;
      if (!in_warmup && cfg_.tail_only) w.base = 0.0;
    } else {
      w.base = in_warmup ? 0.0 : cfg_.lambda_r;
      w.pen = lambda_p;
      if (!in_warmup && cfg_.tail_only) w.base = 0.0;
    }
    return w;
  }

  /// Forward pass over fresh samples: residuals, their partials, anchor
  /// losses and the epoch CVaR estimate. Pure in the parameters.
  EpochStats forward_stats(int epoch) {
    EpochStats st;
    st.samples = sample(spec_, Rng::mix(cfg_.seed, static_cast<std::uint64_t>(epoch)));
    const auto& pts = st.samples.interior;
    const std::size_t n = pts.size();
    st.rp.resize(n);
    st.abs_res.resize(n);

#ifdef _OPENMP
#pragma omp parallel num_threads(threads_)
#endif
    {
      auto ws = field_.make_scratch();
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
      for (long i = 0; i < static_cast<long>(n); ++i) {
        const auto fd = collect_derivs(
            [&](const std::array<double, 2>& q, int dir, int ord) {
              return field_.jet(q, dir, ord, ws);
            },
            pts[i], spec_.order_c0, spec_.order_c1);
        st.rp[i] = residual(spec_, pts[i], fd);
        st.abs_res[i] = std::abs(st.rp[i].r);
      }
    }

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += st.rp[i].r * st.rp[i].r;
    st.l_base = n > 0 ? acc / static_cast<double>(n) : 0.0;
    st.cvar = empirical_cvar(ResidualBatch(st.abs_res), cfg_.alpha);

    anchor_losses(st);
    return st;
  }

  double core_loss(const EpochStats& st, double eps) const {
    double core = 0.0;
    switch (cfg_.penalty) {
      case Penalty::none:
        break;
      case Penalty::hinge: {
        const double excess = std::max(st.cvar.value - eps, 0.0);
        core = excess * excess;
        break;
      }
      case Penalty::mean_excess: {
        const double n = static_cast<double>(st.abs_res.size());
        for (std::size_t i = 0; i < st.abs_res.size(); ++i) {
          const double e = std::max(st.abs_res[i] - eps, 0.0);
          const double w = cfg_.me_topk_weighting ? st.cvar.weights[i] : 1.0;
          core += w * e * e;
        }
        core /= n;
        break;
      }
    }
    if (spec_.has_iface_loss && cfg_.penalty != Penalty::none)
      core += st.l_iface_u + st.l_iface_ux;  // bundled into the penalty term
    return core;
  }

  /// Accumulates the parameter gradient of the composite loss with the
  /// given phase weights and detached threshold.
  std::vector<T> gradient(const EpochStats& st, double eps, const PhaseWeights& w) {
    std::vector<T> grad(field_.net().param_count(), T(0));
    const auto& pts = st.samples.interior;
    const std::size_t n = pts.size();

    // per-point seed d(loss)/d r_i
    std::vector<double> seed(n, 0.0);
    const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
    for (std::size_t i = 0; i < n; ++i) seed[i] = w.base * 2.0 * st.rp[i].r * inv_n;
    if (w.pen != 0.0 && cfg_.penalty == Penalty::hinge) {
      const double excess = std::max(st.cvar.value - eps, 0.0);
      if (excess > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
          const double sgn = st.rp[i].r > 0.0 ? 1.0 : (st.rp[i].r < 0.0 ? -1.0 : 0.0);
          seed[i] += w.pen * 2.0 * excess * st.cvar.weights[i] * inv_n * sgn;
        }
      }
    } else if (w.pen != 0.0 && cfg_.penalty == Penalty::mean_excess) {
      for (std::size_t i = 0; i < n; ++i) {
        const double e = st.abs_res[i] - eps;
        if (e <= 0.0) continue;
        const double wt = cfg_.me_topk_weighting ? st.cvar.weights[i] : 1.0;
        const double sgn = st.rp[i].r > 0.0 ? 1.0 : (st.rp[i].r < 0.0 ? -1.0 : 0.0);
        seed[i] += w.pen * 2.0 * wt * e * inv_n * sgn;
      }
    }

#ifdef _OPENMP
    std::vector<std::vector<T>> partial(threads_, std::vector<T>(grad.size(), T(0)));
#pragma omp parallel num_threads(threads_)
    {
      const int tid = omp_get_thread_num();
      auto ws = field_.make_scratch();
      auto& g = partial[tid];
#pragma omp for schedule(static)
      for (long i = 0; i < static_cast<long>(n); ++i)
        backprop_point(pts[i], st.rp[i], seed[i], ws, g);
    }
    for (const auto& g : partial)
      for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += g[j];
#else
    auto ws = field_.make_scratch();
    for (std::size_t i = 0; i < n; ++i)
      backprop_point(pts[i], st.rp[i], seed[i], ws, grad);
#endif

    anchor_gradient(st, w, grad);
    return grad;
  }

  /// Full run. Validation is recorded every cfg.val_every epochs and on
  /// the final epoch when an evaluation context is supplied.
  TrainResult train(const EvalContext& eval) {
    TrainResult out;
    out.records.reserve(cfg_.epochs);
    detail::AdamState<T> opt(field_.net().param_count());

    for (int e = 0; e < cfg_.epochs; ++e) {
      const double lr = cosine_lr(e, cfg_.lr0, cfg_.lr_min, cfg_.epochs);
      EpochStats st = forward_stats(e);
      const double eps_new = threshold_.update(st.cvar.value);
      const double l_core = core_loss(st, eps_new);
      balancer_.update_scales(st.l_base, l_core);
      const double lambda_p = balancer_.lambda_p();
      const PhaseWeights w = phase_weights(e, lambda_p);

      EpochRecord rec;
      rec.epoch = e;
      rec.lr = lr;
      rec.l_base = st.l_base;
      rec.l_ic = st.l_ic;
      rec.l_bc = st.l_bc;
      rec.l_iface_u = st.l_iface_u;
      rec.l_iface_ux = st.l_iface_ux;
      rec.l_core = l_core;
      rec.eps = eps_new;
      rec.lambda_p = lambda_p;
      rec.scale_base = balancer_.scale_base();
      rec.scale_core = balancer_.scale_core();
      rec.loss = w.base * st.l_base + w.ic * st.l_ic + w.bc * st.l_bc + w.pen * l_core;

      if (!std::isfinite(rec.loss)) {
        out.records.push_back(rec);
        out.aborted = true;
        out.abort_reason = "non-finite loss at epoch " + std::to_string(e);
        break;
      }

      auto grad = gradient(st, eps_new, w);
      clip_gradient(grad);
      opt.update(std::span<T>(field_.net().params()), std::span<const T>(grad), lr,
                 cfg_.optimizer == OptimizerKind::adamw, cfg_.weight_decay);

      const bool validate =
          !eval.points.empty() &&
          (e % cfg_.val_every == cfg_.val_every - 1 || e == cfg_.epochs - 1);
      if (validate) rec.val_rel_l2 = rel_l2(predict(eval.points), eval.reference);
      out.records.push_back(rec);
    }

    out.final_eps = threshold_.eps();
    out.final_lambda_p = balancer_.lambda_p();
    if (!eval.points.empty() && !out.aborted) {
      const auto pred = predict(eval.points);
      out.metrics.rel_l2 = rel_l2(pred, eval.reference);
      out.metrics.l_inf = l_inf(pred, eval.reference);
      std::vector<double> abs_err(pred.size());
      for (std::size_t i = 0; i < pred.size(); ++i)
        abs_err[i] = std::abs(pred[i] - eval.reference[i]);
      out.metrics.q95_error = quantile(abs_err, 0.95);
      out.final_abs_residuals = abs_residuals(eval.points);
      out.metrics.q95_residual = quantile(out.final_abs_residuals, 0.95);
      double mean = 0.0;
      for (double r : out.final_abs_residuals) mean += r;
      out.metrics.mean_abs_residual = mean / static_cast<double>(out.final_abs_residuals.size());
    }
    return out;
  }

  /// Field values at arbitrary points (parallel, deterministic).
  std::vector<double> predict(const std::vector<std::array<double, 2>>& pts) {
    std::vector<double> out(pts.size());
#ifdef _OPENMP
#pragma omp parallel num_threads(threads_)
#endif
    {
      auto ws = field_.make_scratch();
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
      for (long i = 0; i < static_cast<long>(pts.size()); ++i)
        out[i] = static_cast<double>(field_.value(pts[i], ws));
    }
    return out;
  }

  /// |PDE residual| at arbitrary points.
  std::vector<double> abs_residuals(const std::vector<std::array<double, 2>>& pts) {
    std::vector<double> out(pts.size());
#ifdef _OPENMP
#pragma omp parallel num_threads(threads_)
#endif
    {
      auto ws = field_.make_scratch();
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
      for (long i = 0; i < static_cast<long>(pts.size()); ++i) {
        const auto fd = collect_derivs(
            [&](const std::array<double, 2>& q, int dir, int ord) {
              return field_.jet(q, dir, ord, ws);
            },
            pts[i], spec_.order_c0, spec_.order_c1);
        out[i] = std::abs(residual(spec_, pts[i], fd).r);
      }
    }
    return out;
  }

private:
  static ProblemSpec apply_overrides(ProblemSpec spec, const TrainConfig& cfg) {
    if (cfg.net) spec.net = *cfg.net;
    if (cfg.sampler) spec.sampler = *cfg.sampler;
    if (cfg.eval) spec.eval = *cfg.eval;
    return spec;
  }

  void backprop_point(const std::array<double, 2>& p, const ResidualPartials& rp,
                      double seed, typename Mlp<T>::Scratch& ws, std::vector<T>& g) {
    if (seed == 0.0) return;
    std::array<T, 4> bar0{};
    bar0[0] = static_cast<T>(seed * rp.du);
    bar0[1] = static_cast<T>(seed * rp.d1[0]);
    bar0[2] = static_cast<T>(seed * rp.d2[0]);
    bar0[3] = static_cast<T>(seed * rp.d3[0]);
    field_.jet_backprop(p, 0, spec_.order_c0, bar0, ws, g);

    std::array<T, 4> bar1{};
    bar1[1] = static_cast<T>(seed * rp.d1[1]);
    bar1[2] = static_cast<T>(seed * rp.d2[1]);
    bar1[3] = static_cast<T>(seed * rp.d3[1]);
    // the value channel was already routed through the first pass
    if (bar1[1] != T(0) || bar1[2] != T(0) || bar1[3] != T(0))
      field_.jet_backprop(p, 1, spec_.order_c1, bar1, ws, g);
  }

  void anchor_losses(EpochStats& st) {
    auto ws = field_.make_scratch();
    if (spec_.kind == ProblemKind::poisson2d || spec_.kind == ProblemKind::poisson2d_jump) {
      double acc = 0.0;
      for (const auto& p : st.samples.boundary) {
        const double u = static_cast<double>(field_.value(p, ws));
        acc += u * u;  // zero Dirichlet data
      }
      st.l_bc = st.samples.boundary.empty() ? 0.0 : acc / st.samples.boundary.size();
    }
    if (spec_.kind == ProblemKind::kdv1d) {
      double acc = 0.0;
      for (std::size_t i = 0; i < st.samples.initial.size(); ++i) {
        const double d = static_cast<double>(field_.value(st.samples.initial[i], ws)) -
                         st.samples.initial_target[i];
        acc += d * d;
      }
      st.l_ic = st.samples.initial.empty() ? 0.0 : acc / st.samples.initial.size();

      double pacc = 0.0;
      for (double t : st.samples.bc_times) {
        const auto jl = field_.jet({spec_.lo[0], t}, 0, 2, ws);
        const auto jr = field_.jet({spec_.hi[0], t}, 0, 2, ws);
        for (int k = 0; k <= 2; ++k) {
          const double d = static_cast<double>(jl.d[k]) - static_cast<double>(jr.d[k]);
          pacc += d * d;
        }
      }
      st.l_bc = st.samples.bc_times.empty() ? 0.0 : pacc / st.samples.bc_times.size();
    }
    if (spec_.kind == ProblemKind::poisson2d_jump) {
      double au = 0.0, aux = 0.0;
      for (double y : st.samples.iface_y) {
        const auto jl = field_.jet({0.5, y}, 0, 1, ws);
        const auto jr = field_.jet({0.5, y}, 0, 1, ws);  // matched one-sided limits
        const double du = static_cast<double>(jl.d[0]) - static_cast<double>(jr.d[0]);
        const double dux = static_cast<double>(jl.d[1]) - static_cast<double>(jr.d[1]);
        au += du * du;
        aux += dux * dux;
      }
      if (!st.samples.iface_y.empty()) {
        st.l_iface_u = au / st.samples.iface_y.size();
        st.l_iface_ux = aux / st.samples.iface_y.size();
      }
    }
    // heat and burgers enforce their constraints through the wrapper
  }

  void anchor_gradient(const EpochStats& st, const PhaseWeights& w, std::vector<T>& g) {
    auto ws = field_.make_scratch();
    if ((spec_.kind == ProblemKind::poisson2d || spec_.kind == ProblemKind::poisson2d_jump) &&
        w.bc != 0.0 && !st.samples.boundary.empty()) {
      const double inv = 1.0 / static_cast<double>(st.samples.boundary.size());
      for (const auto& p : st.samples.boundary) {
        const double u = static_cast<double>(field_.value(p, ws));
        std::array<T, 4> bar{};
        bar[0] = static_cast<T>(w.bc * 2.0 * u * inv);
        field_.jet_backprop(p, 0, 0, bar, ws, g);
      }
    }
    if (spec_.kind == ProblemKind::kdv1d) {
      if (w.ic != 0.0 && !st.samples.initial.empty()) {
        const double inv = 1.0 / static_cast<double>(st.samples.initial.size());
        for (std::size_t i = 0; i < st.samples.initial.size(); ++i) {
          const double d = static_cast<double>(field_.value(st.samples.initial[i], ws)) -
                           st.samples.initial_target[i];
          std::array<T, 4> bar{};
          bar[0] = static_cast<T>(w.ic * 2.0 * d * inv);
          field_.jet_backprop(st.samples.initial[i], 0, 0, bar, ws, g);
        }
      }
      if (w.bc != 0.0 && !st.samples.bc_times.empty()) {
        const double inv = 1.0 / static_cast<double>(st.samples.bc_times.size());
        for (double t : st.samples.bc_times) {
          const std::array<double, 2> pl{spec_.lo[0], t}, pr{spec_.hi[0], t};
          const auto jl = field_.jet(pl, 0, 2, ws);
          const auto jr = field_.jet(pr, 0, 2, ws);
          std::array<T, 4> bl{}, br{};
          for (int k = 0; k <= 2; ++k) {
            const double d = static_cast<double>(jl.d[k]) - static_cast<double>(jr.d[k]);
            bl[k] = static_cast<T>(w.bc * 2.0 * d * inv);
            br[k] = static_cast<T>(-w.bc * 2.0 * d * inv);
          }
          field_.jet_backprop(pl, 0, 2, bl, ws, g);
          field_.jet_backprop(pr, 0, 2, br, ws, g);
        }
      }
    }
    // interface penalties: both one-sided limits are the same evaluation
    // of a continuous field, so their difference and gradient vanish
  }

  void clip_gradient(std::vector<T>& grad) const {
    double sq = 0.0;
    for (T g : grad) sq += static_cast<double>(g) * static_cast<double>(g);
    const double norm = std::sqrt(sq);
    if (norm > cfg_.clip_norm && norm > 0.0) {
      const T scale = static_cast<T>(cfg_.clip_norm / norm);
      for (T& g : grad) g *= scale;
    }
  }

  TrainConfig cfg_;
  ProblemSpec spec_;
  Field<T> field_;
  ThresholdController threshold_;
  LossBalancer balancer_;
  int threads_ = 1;
};

}  // namespace rra
