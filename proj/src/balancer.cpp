#include "rra/balancer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rra {

LossBalancer::Config LossBalancer::defaults(double lambda_cfg, bool enabled) {
  Config cfg;
  cfg.lambda_cfg = lambda_cfg;
  cfg.lambda_min = lambda_cfg * 1e-3;
  cfg.lambda_max = lambda_cfg * 1e3;
  cfg.enabled = enabled;
  return cfg;
}

LossBalancer::LossBalancer(Config cfg) : cfg_(cfg) {
  if (!(cfg_.lambda_cfg > 0.0)) throw std::domain_error("lambda_cfg must be > 0");
  if (!(cfg_.beta > 0.0 && cfg_.beta < 1.0))
    throw std::domain_error("balancer EMA decay must lie in (0,1)");
  if (!(cfg_.delta > 0.0)) throw std::domain_error("division guard must be > 0");
  if (!(cfg_.lambda_min <= cfg_.lambda_max))
    throw std::domain_error("lambda_min must not exceed lambda_max");
}

void LossBalancer::update_scales(double base_loss_detached, double core_loss_detached) {
  if (!std::isfinite(base_loss_detached) || base_loss_detached < 0.0)
    throw std::domain_error("base loss must be finite and >= 0");
  if (!std::isfinite(core_loss_detached) || core_loss_detached < 0.0)
    throw std::domain_error("core loss must be finite and >= 0");
  s_b_ = cfg_.beta * s_b_ + (1.0 - cfg_.beta) * base_loss_detached;
  s_p_ = cfg_.beta * s_p_ + (1.0 - cfg_.beta) * core_loss_detached;
}

double LossBalancer::lambda_p() const {
  if (!cfg_.enabled) return cfg_.lambda_cfg;
  const double ratio = cfg_.lambda_cfg * s_b_ / (s_p_ + cfg_.delta);
  return std::clamp(ratio, cfg_.lambda_min, cfg_.lambda_max);
}

}  // namespace rra
