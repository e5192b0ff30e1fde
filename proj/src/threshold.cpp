#include "rra/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rra {

ThresholdController::ThresholdController(Config cfg) : cfg_(cfg), eps_(cfg.eps_init) {
  if (!(cfg_.eps_init > 0.0)) throw std::domain_error("eps_init must be > 0");
  if (!(cfg_.beta > 0.0 && cfg_.beta < 1.0))
    throw std::domain_error("threshold EMA decay must lie in (0,1)");
  if (!(cfg_.margin >= 0.0 && cfg_.margin < 1.0))
    throw std::domain_error("margin must lie in [0,1)");
}

double ThresholdController::update(double cvar_detached) {
  if (!std::isfinite(cvar_detached) || cvar_detached < 0.0)
    throw std::domain_error("detached CVaR must be finite and >= 0");
  const double target = (1.0 - cfg_.margin) * cvar_detached;
  eps_ = std::min(cfg_.beta * eps_ + (1.0 - cfg_.beta) * target, target);
  return eps_;
}

}  // namespace rra
