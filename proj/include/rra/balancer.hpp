#pragma once

namespace rra {

/// Dynamic penalty-weight balancer. Tracks EMA scales of the detached
/// base loss and penalty core and, when enabled, rescales the penalty
/// weight by their ratio:
///
///   lambda_p = clip(lambda_cfg * S_b / (S_p + delta), lambda_min, lambda_max)
///
/// Disabled, it returns lambda_cfg unchanged. Both scales start at 1.
class LossBalancer {
public:
  struct Config {
    double lambda_cfg = 0.03;
    double beta = 0.9;
    double lambda_min = 0.03e-3;
    double lambda_max = 0.03e3;
    double delta = 1e-12;
    bool enabled = false;
  };

  /// Defaults with a symmetric three-decade clip band around lambda_cfg.
  static Config defaults(double lambda_cfg, bool enabled);

  explicit LossBalancer(Config cfg);

  /// EMA update of both scales from detached loss values. Throws
  /// std::domain_error if either loss is negative or non-finite.
  void update_scales(double base_loss_detached, double core_loss_detached);

  double lambda_p() const;
  double scale_base() const { return s_b_; }
  double scale_core() const { return s_p_; }
  const Config& config() const { return cfg_; }

private:
  Config cfg_;
  double s_b_ = 1.0;
  double s_p_ = 1.0;
};

}  // namespace rra
