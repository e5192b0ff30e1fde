// Experiment runner for the residual risk-aware PINN framework.
//
//   rra run     --problem poisson2d --method rra_wms [--config file.json] ...
//   rra compare --problem heat1d --methods baseline,rra_hinge ...
//   rra ablate  --problems heat1d,burgers1d,poisson2d --penalty me ...
//   rra ccdf    --run runs/poisson2d_rra_wms_s0
//
// Flags override config-file keys; RRA_OUT_ROOT sets the default output
// root. Exit codes: 0 success, 1 invalid configuration, 2 numeric
// failure (aborted training).

#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rra/experiment.hpp"

namespace {

struct TrainFlags {
  std::optional<int> epochs, warmup, val_every, threads;
  std::optional<int> net_depth, net_width;
  std::optional<int> n_int, n_bnd, n_ic, n_iface;
  std::optional<int> eval_grid0, eval_grid1, eval_random;
  std::optional<double> alpha, lr0, lr_min, clip_norm, lambda_cfg, lambda_ic, lambda_bc;
  std::optional<double> eps_init, eps_margin, eps_beta;
  std::optional<std::string> precision, schedule, optimizer, activation, output;
  std::optional<bool> tail_only, balancer, me_topk;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--warmup", warmup, "warmup epochs");
    cmd->add_option("--alpha", alpha, "CVaR tail level");
    cmd->add_option("--lr0", lr0, "initial learning rate");
    cmd->add_option("--lr-min", lr_min, "cosine floor");
    cmd->add_option("--clip-norm", clip_norm, "gradient clip norm");
    cmd->add_option("--lambda-cfg", lambda_cfg, "penalty seed weight");
    cmd->add_option("--lambda-ic", lambda_ic, "initial-condition weight");
    cmd->add_option("--lambda-bc", lambda_bc, "boundary weight");
    cmd->add_option("--eps-init", eps_init, "initial tail tolerance");
    cmd->add_option("--eps-margin", eps_margin, "relative threshold margin");
    cmd->add_option("--eps-beta", eps_beta, "threshold EMA decay");
    cmd->add_option("--precision", precision, "single|double");
    cmd->add_option("--schedule", schedule, "smooth_first|stiff_first");
    cmd->add_option("--optimizer", optimizer, "adam|adamw");
    cmd->add_option("--val-every", val_every, "validation cadence (epochs)");
    cmd->add_option("--threads", threads, "worker threads (0 = auto)");
    cmd->add_option("--net-depth", net_depth, "hidden layers");
    cmd->add_option("--net-width", net_width, "neurons per layer");
    cmd->add_option("--activation", activation, "tanh|silu");
    cmd->add_option("--output-activation", output, "linear|tanh");
    cmd->add_option("--n-int", n_int, "interior points per epoch");
    cmd->add_option("--n-bnd", n_bnd, "boundary points per epoch");
    cmd->add_option("--n-ic", n_ic, "initial points per epoch");
    cmd->add_option("--n-iface", n_iface, "interface points per epoch");
    cmd->add_option("--eval-grid0", eval_grid0, "evaluation grid, coordinate 0");
    cmd->add_option("--eval-grid1", eval_grid1, "evaluation grid, coordinate 1");
    cmd->add_option("--eval-random", eval_random, "random evaluation points");
    cmd->add_flag("--tail-only,!--no-tail-only", tail_only,
                  "drop the base loss after warmup");
    cmd->add_flag("--balancer,!--no-balancer", balancer, "dynamic penalty weight");
    cmd->add_flag("--me-topk,!--no-me-topk", me_topk,
                  "tail-weighted mean-excess variant");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    auto set = [&j](const char* key, const auto& opt) {
      if (opt) j[key] = *opt;
    };
    set("epochs", epochs);
    set("warmup", warmup);
    set("alpha", alpha);
    set("lr0", lr0);
    set("lr_min", lr_min);
    set("clip_norm", clip_norm);
    set("lambda_cfg", lambda_cfg);
    set("lambda_ic", lambda_ic);
    set("lambda_bc", lambda_bc);
    set("eps_init", eps_init);
    set("eps_margin", eps_margin);
    set("eps_beta", eps_beta);
    set("precision", precision);
    set("schedule", schedule);
    set("optimizer", optimizer);
    set("val_every", val_every);
    set("threads", threads);
    set("tail_only", tail_only);
    set("balancer", balancer);
    set("me_topk_weighting", me_topk);
    nlohmann::json net;
    if (net_depth) net["depth"] = *net_depth;
    if (net_width) net["width"] = *net_width;
    if (activation) net["activation"] = *activation;
    if (output) net["output"] = *output;
    if (!net.empty()) j["net"] = net;
    nlohmann::json sampler;
    if (n_int) sampler["n_int"] = *n_int;
    if (n_bnd) sampler["n_bnd"] = *n_bnd;
    if (n_ic) sampler["n_ic"] = *n_ic;
    if (n_iface) sampler["n_iface"] = *n_iface;
    if (!sampler.empty()) j["sampler"] = sampler;
    nlohmann::json eval;
    if (eval_grid0) eval["grid0"] = *eval_grid0;
    if (eval_grid1) eval["grid1"] = *eval_grid1;
    if (eval_random) eval["n_random"] = *eval_random;
    if (!eval.empty()) j["eval"] = eval;
    return j;
  }
};

rra::ExperimentConfig base_config(const std::string& config_file,
                                  const std::string& problem, const std::string& method,
                                  const std::vector<std::uint64_t>& seeds,
                                  const std::string& out_dir, const TrainFlags& flags) {
  rra::ExperimentConfig cfg;
  if (!config_file.empty()) cfg = rra::load_experiment_config(config_file);
  if (!problem.empty()) cfg.problem = problem;
  if (!method.empty()) cfg.method = method;
  // rebuild train defaults for the (possibly overridden) problem/method,
  // then replay file and flag overrides in that order
  const auto kind = rra::problem_from_name(cfg.problem);
  cfg.train = rra::method_train_config(kind, cfg.method);
  nlohmann::json merged = nlohmann::json::object();
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    const auto j = nlohmann::json::parse(in);
    if (j.contains("train")) merged = j["train"];
  }
  const nlohmann::json flag_json = flags.to_json();
  for (const auto& [key, value] : flag_json.items()) {
    if (merged.contains(key) && merged[key].is_object() && value.is_object())
      merged[key].update(value);
    else
      merged[key] = value;
  }
  cfg.train_overrides = merged;
  rra::apply_train_overrides(cfg.train, merged);
  if (!seeds.empty()) cfg.seeds = seeds;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual risk-aware PINN experiment runner"};
  app.require_subcommand(1);

  std::string config_file, problem, method, out_dir, run_dir, penalty_name;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> methods, problems;
  std::vector<double> alphas{0.50, 0.75, 0.85, 0.95, 0.99};
  int thresholds = 200;
  TrainFlags flags;

  auto* run = app.add_subcommand("run", "train one experiment per seed");
  run->add_option("--config", config_file, "JSON config file");
  run->add_option("--problem", problem, "heat1d|burgers1d|kdv1d|poisson2d|poisson2d_jump");
  run->add_option("--method", method, "baseline|rra_hinge|rra_wms");
  run->add_option("--seeds", seeds, "seeds")->delimiter(',');
  run->add_option("--out", out_dir, "output root");
  flags.add_to(run);

  auto* cmp = app.add_subcommand("compare", "method comparison table");
  cmp->add_option("--config", config_file, "JSON config file");
  cmp->add_option("--problem", problem, "benchmark problem");
  cmp->add_option("--methods", methods, "methods to compare")->delimiter(',')->required();
  cmp->add_option("--seeds", seeds, "seeds")->delimiter(',');
  cmp->add_option("--out", out_dir, "output root");
  flags.add_to(cmp);

  auto* abl = app.add_subcommand("ablate", "tail-level sweep");
  abl->add_option("--config", config_file, "JSON config file");
  abl->add_option("--problems", problems, "problems to average over")->delimiter(',');
  abl->add_option("--alphas", alphas, "tail levels")->delimiter(',');
  abl->add_option("--penalty", penalty_name, "hinge|me")->required();
  abl->add_option("--seeds", seeds, "seeds")->delimiter(',');
  abl->add_option("--out", out_dir, "output root");
  flags.add_to(abl);

  auto* ccdf = app.add_subcommand("ccdf", "export the survival curve of a run");
  ccdf->add_option("--run", run_dir, "run directory")->required();
  ccdf->add_option("--thresholds", thresholds, "threshold count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      auto cfg = base_config(config_file, problem, method, seeds, out_dir, flags);
      bool any_aborted = false;
      for (auto seed : cfg.seeds) {
        const auto out = rra::run_one(cfg, seed, /*reuse_existing=*/false);
        std::printf("%s: rel_l2=%.6g l_inf=%.6g q95_residual=%.6g%s\n",
                    out.dir.string().c_str(), out.metrics.rel_l2, out.metrics.l_inf,
                    out.metrics.q95_residual, out.aborted ? " [ABORTED]" : "");
        any_aborted |= out.aborted;
      }
      return any_aborted ? 2 : 0;
    }
    if (cmp->parsed()) {
      auto cfg = base_config(config_file, problem, method, seeds, out_dir, flags);
      const auto rows = rra::compare(cfg, methods);
      std::printf("%-12s %12s %12s %12s\n", "method", "rel_l2", "l_inf", "q95_res");
      for (const auto& r : rows)
        std::printf("%-12s %12.6g%s %11.6g%s %11.6g%s\n", r.method.c_str(),
                    r.metrics.rel_l2, r.best_rel_l2 ? "*" : " ", r.metrics.l_inf,
                    r.best_l_inf ? "*" : " ", r.metrics.q95_residual,
                    r.best_q95 ? "*" : " ");
      return 0;
    }
    if (abl->parsed()) {
      rra::Penalty pen;
      if (penalty_name == "hinge")
        pen = rra::Penalty::hinge;
      else if (penalty_name == "me")
        pen = rra::Penalty::mean_excess;
      else
        throw std::runtime_error("penalty must be hinge or me");
      if (problems.empty()) problems = {"heat1d", "burgers1d", "poisson2d"};
      auto cfg = base_config(config_file, problems.front(), "", seeds, out_dir, flags);
      const auto res = rra::ablate(problems, alphas, pen, cfg);
      std::printf("%8s %12s %18s %12s\n", "alpha", "rel_l2", "mean_abs_residual",
                  "final_eps");
      for (const auto& r : res.averaged)
        std::printf("%8.2f %12.6g %18.6g %12.6g\n", r.alpha, r.rel_l2,
                    r.mean_abs_residual, r.final_eps);
      return 0;
    }
    if (ccdf->parsed()) {
      const auto path = rra::export_ccdf(run_dir, thresholds);
      std::printf("%s\n", path.string().c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
