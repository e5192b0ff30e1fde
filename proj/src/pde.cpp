#include "rra/pde.hpp"

#include <cmath>
#include <stdexcept>

#include "rra/cole_hopf.hpp"
#include "rra/fd_poisson.hpp"
#include "rra/rng.hpp"

namespace rra {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double heat_diffusivity() { return 1.0 / (400.0 * kPi * kPi); }
double burgers_viscosity() { return 0.01 / kPi; }

double kdv_soliton_value(double x, double t, double c, double x0) {
  const double theta = 0.5 * std::sqrt(c) * (x - c * t - x0);
  const double sech = 1.0 / std::cosh(theta);
  return 0.5 * c * sech * sech;
}

ProblemKind problem_from_name(const std::string& name) {
  if (name == "heat1d") return ProblemKind::heat1d;
  if (name == "burgers1d") return ProblemKind::burgers1d;
  if (name == "kdv1d") return ProblemKind::kdv1d;
  if (name == "poisson2d") return ProblemKind::poisson2d;
  if (name == "poisson2d_jump") return ProblemKind::poisson2d_jump;
  throw std::domain_error("unknown problem: " + name);
}

const char* problem_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::heat1d: return "heat1d";
    case ProblemKind::burgers1d: return "burgers1d";
    case ProblemKind::kdv1d: return "kdv1d";
    case ProblemKind::poisson2d: return "poisson2d";
    case ProblemKind::poisson2d_jump: return "poisson2d_jump";
  }
  throw std::domain_error("unknown problem kind");
}

const ProblemSpec& problem(ProblemKind kind) {
  static const ProblemSpec heat = [] {
    ProblemSpec s;
    s.kind = ProblemKind::heat1d;
    s.name = "heat1d";
    s.lo = {0.0, 0.0};
    s.hi = {1.0, 1.0};
    s.order_c0 = 2;
    s.order_c1 = 1;
    s.wrapper = WrapperKind::heat_hard;
    s.net = {.depth = 4, .width = 80, .input_dim = 2, .activation = Activation::tanh_fn};
    s.sampler = {.n_int = 5000};
    s.eval = {.grid0 = 250, .grid1 = 250};
    return s;
  }();
  static const ProblemSpec burgers = [] {
    ProblemSpec s;
    s.kind = ProblemKind::burgers1d;
    s.name = "burgers1d";
    s.lo = {-1.0, 0.0};
    s.hi = {1.0, 1.0};
    s.order_c0 = 2;
    s.order_c1 = 1;
    s.wrapper = WrapperKind::burgers_hard;
    s.net = {.depth = 7,
             .width = 20,
             .input_dim = 2,
             .activation = Activation::tanh_fn,
             .output = OutputActivation::tanh_out};
    s.sampler = {.n_int = 10000};
    s.eval = {.n_random = 90000};
    return s;
  }();
  static const ProblemSpec kdv = [] {
    ProblemSpec s;
    s.kind = ProblemKind::kdv1d;
    s.name = "kdv1d";
    s.lo = {-10.0, 0.0};
    s.hi = {10.0, 1.0};
    s.order_c0 = 3;
    s.order_c1 = 1;
    s.wrapper = WrapperKind::identity;
    s.net = {.depth = 4, .width = 128, .input_dim = 2, .activation = Activation::silu};
    s.sampler = {.n_int = 10000, .n_bnd = 512, .n_ic = 512};
    s.eval = {.grid0 = 201, .grid1 = 201};
    s.has_ic_loss = true;
    s.has_bc_loss = true;
    s.periodic_bc = true;
    return s;
  }();
  static const ProblemSpec poisson = [] {
    ProblemSpec s;
    s.kind = ProblemKind::poisson2d;
    s.name = "poisson2d";
    s.lo = {0.0, 0.0};
    s.hi = {1.0, 1.0};
    s.coord1_is_time = false;
    s.order_c0 = 2;
    s.order_c1 = 2;
    s.wrapper = WrapperKind::identity;
    s.net = {.depth = 6, .width = 64, .input_dim = 2, .activation = Activation::tanh_fn};
    s.sampler = {.n_int = 10000, .n_bnd = 200};
    s.eval = {.grid0 = 101, .grid1 = 101};
    s.has_bc_loss = true;
    return s;
  }();
  static const ProblemSpec jump = [] {
    ProblemSpec s;
    s.kind = ProblemKind::poisson2d_jump;
    s.name = "poisson2d_jump";
    s.lo = {0.0, 0.0};
    s.hi = {1.0, 1.0};
    s.coord1_is_time = false;
    s.order_c0 = 2;
    s.order_c1 = 2;
    s.wrapper = WrapperKind::identity;
    s.net = {.depth = 6, .width = 64, .input_dim = 2, .activation = Activation::tanh_fn};
    s.sampler = {.n_int = 4096, .n_bnd = 2000, .n_iface = 2000};
    s.eval = {.grid0 = 201, .grid1 = 201};
    s.has_bc_loss = true;
    s.has_iface_loss = true;
    return s;
  }();
  switch (kind) {
    case ProblemKind::heat1d: return heat;
    case ProblemKind::burgers1d: return burgers;
    case ProblemKind::kdv1d: return kdv;
    case ProblemKind::poisson2d: return poisson;
    case ProblemKind::poisson2d_jump: return jump;
  }
  throw std::domain_error("unknown problem kind");
}

ResidualPartials residual(const ProblemSpec& spec, const std::array<double, 2>& p,
                          const FieldDerivs& f) {
  ResidualPartials out;
  switch (spec.kind) {
    case ProblemKind::heat1d: {
      const double a = heat_diffusivity();
      out.r = f.d1[1] - a * f.d2[0];
      out.d1[1] = 1.0;
      out.d2[0] = -a;
      break;
    }
    case ProblemKind::burgers1d: {
      const double nu = burgers_viscosity();
      out.r = f.d1[1] + f.u * f.d1[0] - nu * f.d2[0];
      out.du = f.d1[0];
      out.d1[0] = f.u;
      out.d1[1] = 1.0;
      out.d2[0] = -nu;
      break;
    }
    case ProblemKind::kdv1d: {
      out.r = f.d1[1] + 6.0 * f.u * f.d1[0] + f.d3[0];
      out.du = 6.0 * f.d1[0];
      out.d1[0] = 6.0 * f.u;
      out.d1[1] = 1.0;
      out.d3[0] = 1.0;
      break;
    }
    case ProblemKind::poisson2d: {
      const double fsrc = 2.0 * kPi * kPi * sin_pi(p[0]) * sin_pi(p[1]);
      out.r = -(f.d2[0] + f.d2[1]) - fsrc;
      out.d2[0] = -1.0;
      out.d2[1] = -1.0;
      break;
    }
    case ProblemKind::poisson2d_jump: {
      const double base = kPi * kPi * sin_pi(p[0]) * sin_pi(p[1]);
      const double fsrc = p[0] < 0.5 ? 2.0 * base : -6.0 * base;
      out.r = -(f.d2[0] + f.d2[1]) - fsrc;
      out.d2[0] = -1.0;
      out.d2[1] = -1.0;
      break;
    }
  }
  return out;
}

SampleSet sample(const ProblemSpec& spec, std::uint64_t epoch_seed) {
  Rng rng(Rng::mix(static_cast<std::uint64_t>(spec.kind) + 0x51u, epoch_seed));
  SampleSet s;
  s.interior.reserve(spec.sampler.n_int);

  const auto span0 = spec.hi[0] - spec.lo[0];
  const auto span1 = spec.hi[1] - spec.lo[1];
  for (int i = 0; i < spec.sampler.n_int; ++i) {
    double c0;
    if (spec.kind == ProblemKind::poisson2d_jump &&
        rng.uniform() < spec.sampler.iface_prob) {
      c0 = 0.5 + spec.sampler.iface_band * (2.0 * rng.uniform() - 1.0);
    } else {
      c0 = spec.lo[0] + span0 * rng.uniform();
    }
    // time-like coordinates sample the half-open interval (0, T]
    const double u1 = rng.uniform();
    const double c1 =
        spec.coord1_is_time ? spec.hi[1] - span1 * u1 : spec.lo[1] + span1 * u1;
    s.interior.push_back({c0, c1});
  }

  if (spec.kind == ProblemKind::poisson2d || spec.kind == ProblemKind::poisson2d_jump) {
    s.boundary.reserve(spec.sampler.n_bnd);
    for (int i = 0; i < spec.sampler.n_bnd; ++i) {
      const double side = rng.uniform();
      const double a = rng.uniform();
      if (side < 0.25)
        s.boundary.push_back({0.0, a});
      else if (side < 0.5)
        s.boundary.push_back({1.0, a});
      else if (side < 0.75)
        s.boundary.push_back({a, 0.0});
      else
        s.boundary.push_back({a, 1.0});
    }
  }

  if (spec.kind == ProblemKind::kdv1d) {
    s.bc_times.reserve(spec.sampler.n_bnd);
    for (int i = 0; i < spec.sampler.n_bnd; ++i) s.bc_times.push_back(rng.uniform());
    s.initial.reserve(spec.sampler.n_ic);
    s.initial_target.reserve(spec.sampler.n_ic);
    for (int i = 0; i < spec.sampler.n_ic; ++i) {
      const double x = spec.lo[0] + span0 * rng.uniform();
      s.initial.push_back({x, 0.0});
      s.initial_target.push_back(kdv_soliton_value(x, 0.0));
    }
  }

  if (spec.kind == ProblemKind::poisson2d_jump) {
    s.iface_y.reserve(spec.sampler.n_iface);
    for (int i = 0; i < spec.sampler.n_iface; ++i) s.iface_y.push_back(rng.uniform());
  }
  return s;
}

std::vector<std::array<double, 2>> eval_points(const ProblemSpec& spec,
                                               std::uint64_t seed) {
  std::vector<std::array<double, 2>> pts;
  if (spec.eval.n_random > 0) {
    Rng rng(Rng::mix(static_cast<std::uint64_t>(spec.kind) + 0xE7u, seed));
    pts.reserve(spec.eval.n_random);
    for (int i = 0; i < spec.eval.n_random; ++i) {
      const double c0 = spec.lo[0] + (spec.hi[0] - spec.lo[0]) * rng.uniform();
      const double u1 = rng.uniform();
      const double c1 = spec.coord1_is_time ? spec.hi[1] - (spec.hi[1] - spec.lo[1]) * u1
                                            : spec.lo[1] + (spec.hi[1] - spec.lo[1]) * u1;
      pts.push_back({c0, c1});
    }
    return pts;
  }
  pts.reserve(static_cast<std::size_t>(spec.eval.grid0) * spec.eval.grid1);
  for (int j = 0; j < spec.eval.grid1; ++j)
    for (int i = 0; i < spec.eval.grid0; ++i) {
      const double c0 =
          spec.lo[0] + (spec.hi[0] - spec.lo[0]) * i / (spec.eval.grid0 - 1.0);
      const double c1 =
          spec.lo[1] + (spec.hi[1] - spec.lo[1]) * j / (spec.eval.grid1 - 1.0);
      pts.push_back({c0, c1});
    }
  return pts;
}

struct FdGridHolder {
  FdGrid grid;
};

ReferenceSolution ReferenceSolution::build(ProblemKind kind, const std::string& cache_dir) {
  ReferenceSolution ref;
  ref.kind_ = kind;
  if (kind == ProblemKind::poisson2d_jump) {
    auto holder = std::make_shared<FdGridHolder>();
    holder->grid = fd_poisson_jump_cached(801, cache_dir);
    ref.grid_ = holder;
  }
  return ref;
}

double ReferenceSolution::operator()(const std::array<double, 2>& p) const {
  switch (kind_) {
    case ProblemKind::heat1d: {
      if (!(p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0))
        throw std::domain_error("point outside the heat domain");
      return sin_pi(20.0 * p[0]) * std::exp(-p[1]);
    }
    case ProblemKind::burgers1d: {
      if (!(p[0] >= -1.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0))
        throw std::domain_error("point outside the burgers domain");
      return burgers_cole_hopf(p[0], p[1], burgers_viscosity());
    }
    case ProblemKind::kdv1d: {
      if (!(p[0] >= -10.0 && p[0] <= 10.0 && p[1] >= 0.0 && p[1] <= 1.0))
        throw std::domain_error("point outside the kdv domain");
      return kdv_soliton_value(p[0], p[1]);
    }
    case ProblemKind::poisson2d: {
      if (!(p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0))
        throw std::domain_error("point outside the poisson domain");
      return sin_pi(p[0]) * sin_pi(p[1]);
    }
    case ProblemKind::poisson2d_jump:
      return grid_->grid.interpolate(p[0], p[1]);
  }
  throw std::domain_error("unknown problem kind");
}

}  // namespace rra
