#pragma once

namespace rra {

/// Adaptive gradient-free tail tolerance. Each epoch the tolerance moves
/// toward a margin-shifted target derived from a detached CVaR estimate:
///
///   target = (1 - margin) * cvar
///   eps    = min(beta * eps + (1 - beta) * target, target)
///
/// so downward changes are immediate (the cap) and upward changes are
/// smoothed (the EMA). The caller must pass a detached statistic; no
/// gradient path exists through this update.
class ThresholdController {
public:
  struct Config {
    double eps_init = 0.5;
    double beta = 0.95;
    double margin = 0.10;
  };

  explicit ThresholdController(Config cfg);

  /// Applies one update from a detached CVaR value and returns the new
  /// tolerance. Throws std::domain_error on negative or non-finite input.
  double update(double cvar_detached);

  double eps() const { return eps_; }
  const Config& config() const { return cfg_; }

private:
  Config cfg_;
  double eps_;
};

}  // namespace rra
