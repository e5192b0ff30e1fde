#include "rra/trainer.hpp"

namespace rra {

double cosine_lr(int epoch, double lr0, double lr_min, int t_max) {
  const double frac = t_max > 0 ? static_cast<double>(epoch) / t_max : 1.0;
  return lr_min + 0.5 * (lr0 - lr_min) * (1.0 + std::cos(3.14159265358979323846 * frac));
}

TrainConfig default_train_config(ProblemKind kind) {
  TrainConfig cfg;
  switch (kind) {
    case ProblemKind::heat1d:
      cfg.epochs = 15000;
      cfg.warmup = 1000;
      cfg.lr0 = 9e-3;
      cfg.clip_norm = 5.0;
      cfg.precision = Precision::single;
      break;
    case ProblemKind::poisson2d:
      cfg.epochs = 15000;
      cfg.warmup = 1000;
      cfg.lr0 = 5e-3;
      cfg.clip_norm = 5.0;
      cfg.precision = Precision::single;
      break;
    case ProblemKind::kdv1d:
      cfg.epochs = 10000;
      cfg.warmup = 1000;
      cfg.optimizer = OptimizerKind::adamw;
      cfg.lr0 = 1e-2;
      cfg.clip_norm = 1.0;
      cfg.precision = Precision::double_prec;
      break;
    case ProblemKind::burgers1d:
      cfg.epochs = 20000;
      cfg.warmup = 1000;
      cfg.lr0 = 5e-3;
      cfg.clip_norm = 5.0;
      cfg.precision = Precision::single;
      break;
    case ProblemKind::poisson2d_jump:
      cfg.epochs = 15000;
      cfg.warmup = 3000;
      cfg.lr0 = 1e-3;
      cfg.clip_norm = 1.0;
      cfg.precision = Precision::double_prec;
      cfg.balancer_enabled = true;
      break;
  }
  return cfg;
}

}  // namespace rra
