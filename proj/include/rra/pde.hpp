#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rra/jet.hpp"
#include "rra/mlp.hpp"

namespace rra {

enum class ProblemKind { heat1d, burgers1d, kdv1d, poisson2d, poisson2d_jump };

ProblemKind problem_from_name(const std::string& name);
const char* problem_name(ProblemKind kind);

/// Pure directional derivatives of a scalar field at one point, as the
/// residual operators consume them: d1/d2/d3 indexed by coordinate.
struct FieldDerivs {
  double u = 0.0;
  std::array<double, 2> d1{};
  std::array<double, 2> d2{};
  std::array<double, 2> d3{};
};

/// Signed residual plus its partial derivatives with respect to each
/// entry of FieldDerivs (for assembling backprop seeds).
struct ResidualPartials {
  double r = 0.0;
  double du = 0.0;
  std::array<double, 2> d1{};
  std::array<double, 2> d2{};
  std::array<double, 2> d3{};
};

struct SamplerConfig {
  int n_int = 0;
  int n_bnd = 0;
  int n_ic = 0;
  int n_iface = 0;
  double iface_prob = 0.3;   // mixture mass drawn from the interface band
  double iface_band = 0.05;  // |x - 0.5| <= band
};

struct EvalConfig {
  int grid0 = 0;      // grid points along coordinate 0
  int grid1 = 0;      // along coordinate 1
  int n_random = 0;   // if > 0, evaluate on random points instead
};

struct ProblemSpec {
  ProblemKind kind;
  std::string name;
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
  bool coord1_is_time = true;
  int order_c0 = 2;  // jet order needed along coordinate 0
  int order_c1 = 1;  // along coordinate 1
  WrapperKind wrapper = WrapperKind::identity;
  NetworkConfig net;
  SamplerConfig sampler;
  EvalConfig eval;
  bool has_ic_loss = false;
  bool has_bc_loss = false;
  bool has_iface_loss = false;
  bool periodic_bc = false;  // KdV: match u, u_x, u_xx across x ends
};

const ProblemSpec& problem(ProblemKind kind);

/// Signed PDE residual at a point, with partials. Feeding the exact
/// solution's derivatives gives r = 0 up to rounding.
ResidualPartials residual(const ProblemSpec& spec, const std::array<double, 2>& p,
                          const FieldDerivs& f);

struct SampleSet {
  std::vector<std::array<double, 2>> interior;
  std::vector<std::array<double, 2>> boundary;  // Dirichlet points, target 0
  std::vector<std::array<double, 2>> initial;
  std::vector<double> initial_target;
  std::vector<double> bc_times;  // KdV periodic pairs share these t values
  std::vector<double> iface_y;   // jump problem interface ordinates
};

/// Fresh collocation sets; deterministic in (problem, epoch_seed).
SampleSet sample(const ProblemSpec& spec, std::uint64_t epoch_seed);

/// Points the metrics are evaluated on (grid or seeded random set).
std::vector<std::array<double, 2>> eval_points(const ProblemSpec& spec,
                                               std::uint64_t seed);

// --- analytic fields -------------------------------------------------
// Closed-form solutions exposed through the same jet interface as the
// network-backed field, for plugging into residual() as stand-in models.

template <typename T>
Jet<T> heat_exact_jet(const std::array<double, 2>& p, int dir, int ord) {
  const T x = static_cast<T>(p[0]), t = static_cast<T>(p[1]);
  if (dir == 0) {
    Jet<T> w;
    w.d = {T(20) * x, T(20), T(0), T(0)};
    const auto s = jet_compose(w, sin_pi_derivs(T(20) * x), ord);
    return jet_scale(s, std::exp(-t), ord);
  }
  Jet<T> w;
  w.d = {-t, T(-1), T(0), T(0)};
  const auto e = jet_compose(w, exp_derivs(-t), ord);
  return jet_scale(e, sin_pi(T(20) * x), ord);
}

template <typename T>
Jet<T> poisson_exact_jet(const std::array<double, 2>& p, int dir, int ord) {
  const T x = static_cast<T>(p[0]), y = static_cast<T>(p[1]);
  const T active = dir == 0 ? x : y;
  const T passive = dir == 0 ? y : x;
  Jet<T> w;
  w.d = {active, T(1), T(0), T(0)};
  const auto s = jet_compose(w, sin_pi_derivs(active), ord);
  return jet_scale(s, sin_pi(passive), ord);
}

template <typename T>
Jet<T> kdv_soliton_jet(const std::array<double, 2>& p, int dir, int ord, double c = 1.0,
                       double x0 = 0.0) {
  const T x = static_cast<T>(p[0]), t = static_cast<T>(p[1]);
  const T k = std::sqrt(static_cast<T>(c)) / T(2);
  Jet<T> theta;
  theta.d[0] = k * (x - static_cast<T>(c) * t - static_cast<T>(x0));
  theta.d[1] = dir == 0 ? k : -k * static_cast<T>(c);
  const auto th = jet_compose(theta, tanh_derivs(theta.d[0]), ord);
  const auto th2 = jet_mul(th, th, ord);
  Jet<T> one = Jet<T>::constant(T(1));
  return jet_scale(jet_add(one, jet_scale(th2, T(-1), ord), ord), static_cast<T>(c) / T(2),
                   ord);
}

/// Collects FieldDerivs from any jet source (analytic or network-backed).
template <typename JetFn>
FieldDerivs collect_derivs(JetFn&& jets, const std::array<double, 2>& p, int ord0,
                           int ord1) {
  FieldDerivs f;
  const auto j0 = jets(p, 0, ord0);
  const auto j1 = jets(p, 1, ord1);
  f.u = static_cast<double>(j0.d[0]);
  f.d1 = {static_cast<double>(j0.d[1]), static_cast<double>(j1.d[1])};
  f.d2 = {static_cast<double>(j0.d[2]), static_cast<double>(j1.d[2])};
  f.d3 = {static_cast<double>(j0.d[3]), static_cast<double>(j1.d[3])};
  return f;
}

// --- reference solutions ---------------------------------------------

/// Pointwise reference oracle for a problem. Grid-backed oracles (jump
/// Poisson) interpolate bilinearly; the rest evaluate closed forms or
/// quadrature. Independent of the jet/training code path.
class ReferenceSolution {
public:
  static ReferenceSolution build(ProblemKind kind, const std::string& cache_dir);
  double operator()(const std::array<double, 2>& p) const;

private:
  ProblemKind kind_;
  std::shared_ptr<const struct FdGridHolder> grid_;
};

/// KdV soliton parameters shared by the IC, the reference and the tests.
inline constexpr double kKdvSpeed = 1.0;
inline constexpr double kKdvCenter = 0.0;

double kdv_soliton_value(double x, double t, double c = kKdvSpeed,
                         double x0 = kKdvCenter);

/// Heat diffusivity 1/(400 pi^2) and Burgers viscosity 0.01/pi.
double heat_diffusivity();
double burgers_viscosity();

}  // namespace rra
