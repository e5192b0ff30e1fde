#include "rra/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>

#include "rra/run_io.hpp"

namespace rra {

namespace {

Penalty method_penalty(const std::string& method) {
  if (method == "baseline") return Penalty::none;
  if (method == "rra_hinge") return Penalty::hinge;
  if (method == "rra_wms") return Penalty::mean_excess;
  throw std::runtime_error("unknown method: " + method);
}

// Loads the persisted run only when its snapshot matches this exact
// configuration; stale directories retrain instead of lying.
bool reuse_if_matching(const ExperimentConfig& cfg, std::uint64_t seed,
                       const std::filesystem::path& dir, RunOutcome& out) {
  if (!std::filesystem::exists(dir / "metrics.json") ||
      !std::filesystem::exists(dir / "config.json"))
    return false;
  ExperimentConfig snapshot = cfg;
  snapshot.seeds = {seed};
  snapshot.train.seed = seed;
  std::ifstream in(dir / "config.json");
  nlohmann::json persisted;
  in >> persisted;
  if (!in || experiment_to_json(snapshot).dump() != persisted.dump()) return false;
  out.dir = dir;
  out.metrics = read_metrics_json(dir / "metrics.json", &out.aborted);
  out.reused = true;
  std::ifstream min(dir / "metrics.json");
  nlohmann::json mj;
  min >> mj;
  out.final_eps = mj.value("final_eps", 0.0);
  return true;
}

std::string penalty_name(Penalty p) {
  switch (p) {
    case Penalty::none: return "none";
    case Penalty::hinge: return "hinge";
    case Penalty::mean_excess: return "me";
  }
  return "none";
}

template <typename T>
RunOutcome train_into_dir(const ExperimentConfig& cfg, std::uint64_t seed,
                          const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  const ProblemKind kind = problem_from_name(cfg.problem);
  Trainer<T> trainer(problem(kind), tc);

  EvalContext ev;
  ev.points = eval_points(trainer.spec(), Rng::mix(seed, 0xE7A1));
  const auto cache = resolve_out_dir(cfg) / "cache";
  auto ref = ReferenceSolution::build(kind, cache.string());
  ev.reference.reserve(ev.points.size());
  for (const auto& p : ev.points) ev.reference.push_back(ref(p));

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult res = trainer.train(ev);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(dir);
  {
    std::ofstream snap(dir / "config.json");
    ExperimentConfig snapshot = cfg;
    snapshot.seeds = {seed};
    snapshot.train = tc;
    snap << experiment_to_json(snapshot).dump(2) << "\n";
  }
  write_epochs_csv(dir / "epochs.csv", res.records);
  save_checkpoint(dir / "checkpoint.txt", cfg.problem, trainer.field());
  RunProvenance prov{cfg.problem, cfg.method, seed, tc.epochs};
  write_metrics_json(dir / "metrics.json", prov, res.metrics, res.final_eps,
                     res.final_lambda_p, wall, res.aborted, res.abort_reason);
  if (!res.final_abs_residuals.empty())
    write_residuals_csv(dir / "residuals.csv", prov, res.final_abs_residuals);

  RunOutcome out;
  out.dir = dir;
  out.metrics = res.metrics;
  out.final_eps = res.final_eps;
  out.aborted = res.aborted;
  return out;
}

}  // namespace

TrainConfig method_train_config(ProblemKind kind, const std::string& method) {
  TrainConfig cfg = default_train_config(kind);
  cfg.penalty = method_penalty(method);
  return cfg;
}

void apply_train_overrides(TrainConfig& cfg, const nlohmann::json& j) {
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.warmup = j.value("warmup", cfg.warmup);
  if (j.contains("schedule")) {
    const auto s = j["schedule"].get<std::string>();
    if (s == "smooth_first")
      cfg.schedule = Schedule::smooth_first;
    else if (s == "stiff_first")
      cfg.schedule = Schedule::stiff_first;
    else
      throw std::runtime_error("unknown schedule: " + s);
  }
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.lambda_r = j.value("lambda_r", cfg.lambda_r);
  cfg.lambda_ic = j.value("lambda_ic", cfg.lambda_ic);
  cfg.lambda_bc = j.value("lambda_bc", cfg.lambda_bc);
  cfg.lambda_cfg = j.value("lambda_cfg", cfg.lambda_cfg);
  if (j.contains("optimizer")) {
    const auto s = j["optimizer"].get<std::string>();
    if (s == "adam")
      cfg.optimizer = OptimizerKind::adam;
    else if (s == "adamw")
      cfg.optimizer = OptimizerKind::adamw;
    else
      throw std::runtime_error("unknown optimizer: " + s);
  }
  cfg.lr0 = j.value("lr0", cfg.lr0);
  cfg.lr_min = j.value("lr_min", cfg.lr_min);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.clip_norm = j.value("clip_norm", cfg.clip_norm);
  cfg.me_topk_weighting = j.value("me_topk_weighting", cfg.me_topk_weighting);
  cfg.balancer_enabled = j.value("balancer", cfg.balancer_enabled);
  cfg.tail_only = j.value("tail_only", cfg.tail_only);
  cfg.eps_init = j.value("eps_init", cfg.eps_init);
  cfg.eps_beta = j.value("eps_beta", cfg.eps_beta);
  cfg.eps_margin = j.value("eps_margin", cfg.eps_margin);
  if (j.contains("precision")) {
    const auto s = j["precision"].get<std::string>();
    if (s == "single")
      cfg.precision = Precision::single;
    else if (s == "double")
      cfg.precision = Precision::double_prec;
    else
      throw std::runtime_error("unknown precision: " + s);
  }
  cfg.val_every = j.value("val_every", cfg.val_every);
  cfg.threads = j.value("threads", cfg.threads);
  if (j.contains("net")) {
    NetworkConfig net = cfg.net ? *cfg.net : NetworkConfig{};
    const auto& n = j["net"];
    net.depth = n.value("depth", net.depth);
    net.width = n.value("width", net.width);
    if (n.contains("activation"))
      net.activation = io_detail::activation_from(n["activation"].get<std::string>());
    if (n.contains("output"))
      net.output = io_detail::output_from(n["output"].get<std::string>());
    cfg.net = net;
  }
  if (j.contains("sampler")) {
    SamplerConfig s = cfg.sampler ? *cfg.sampler : SamplerConfig{};
    const auto& n = j["sampler"];
    s.n_int = n.value("n_int", s.n_int);
    s.n_bnd = n.value("n_bnd", s.n_bnd);
    s.n_ic = n.value("n_ic", s.n_ic);
    s.n_iface = n.value("n_iface", s.n_iface);
    s.iface_prob = n.value("iface_prob", s.iface_prob);
    s.iface_band = n.value("iface_band", s.iface_band);
    cfg.sampler = s;
  }
  if (j.contains("eval")) {
    EvalConfig e = cfg.eval ? *cfg.eval : EvalConfig{};
    const auto& n = j["eval"];
    e.grid0 = n.value("grid0", e.grid0);
    e.grid1 = n.value("grid1", e.grid1);
    e.n_random = n.value("n_random", e.n_random);
    cfg.eval = e;
  }
}

nlohmann::json experiment_to_json(const ExperimentConfig& cfg) {
  const TrainConfig& t = cfg.train;
  nlohmann::json train{
      {"epochs", t.epochs},
      {"warmup", t.warmup},
      {"schedule", t.schedule == Schedule::smooth_first ? "smooth_first" : "stiff_first"},
      {"alpha", t.alpha},
      {"lambda_r", t.lambda_r},
      {"lambda_ic", t.lambda_ic},
      {"lambda_bc", t.lambda_bc},
      {"lambda_cfg", t.lambda_cfg},
      {"optimizer", t.optimizer == OptimizerKind::adam ? "adam" : "adamw"},
      {"lr0", t.lr0},
      {"lr_min", t.lr_min},
      {"weight_decay", t.weight_decay},
      {"clip_norm", t.clip_norm},
      {"me_topk_weighting", t.me_topk_weighting},
      {"balancer", t.balancer_enabled},
      {"tail_only", t.tail_only},
      {"eps_init", t.eps_init},
      {"eps_beta", t.eps_beta},
      {"eps_margin", t.eps_margin},
      {"precision", t.precision == Precision::single ? "single" : "double"},
      {"val_every", t.val_every},
      {"threads", t.threads},
  };
  if (t.net) {
    train["net"] = {{"depth", t.net->depth},
                    {"width", t.net->width},
                    {"activation", io_detail::activation_name(t.net->activation)},
                    {"output", io_detail::output_name(t.net->output)}};
  }
  if (t.sampler) {
    train["sampler"] = {{"n_int", t.sampler->n_int},     {"n_bnd", t.sampler->n_bnd},
                        {"n_ic", t.sampler->n_ic},       {"n_iface", t.sampler->n_iface},
                        {"iface_prob", t.sampler->iface_prob},
                        {"iface_band", t.sampler->iface_band}};
  }
  if (t.eval) {
    train["eval"] = {{"grid0", t.eval->grid0},
                     {"grid1", t.eval->grid1},
                     {"n_random", t.eval->n_random}};
  }
  return nlohmann::json{{"problem", cfg.problem},
                        {"method", cfg.method},
                        {"seeds", cfg.seeds},
                        {"out_dir", cfg.out_dir},
                        {"train", train}};
}

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.problem = j.value("problem", cfg.problem);
  cfg.method = j.value("method", cfg.method);
  ProblemKind kind;
  try {
    kind = problem_from_name(cfg.problem);
  } catch (const std::domain_error& e) {
    throw std::runtime_error(e.what());
  }
  cfg.train = method_train_config(kind, cfg.method);  // validates method
  if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (cfg.seeds.empty()) throw std::runtime_error("seeds list must not be empty");
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  if (j.contains("train")) {
    cfg.train_overrides = j["train"];
    apply_train_overrides(cfg.train, cfg.train_overrides);
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config: " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed config " + file.string() + ": " + e.what());
  }
  return experiment_from_json(j);
}

std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("RRA_OUT_ROOT"); env && *env) return env;
  return "runs";
}

std::filesystem::path run_dir_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  return resolve_out_dir(cfg) /
         (cfg.problem + "_" + cfg.method + "_s" + std::to_string(seed));
}

RunOutcome run_one(const ExperimentConfig& cfg, std::uint64_t seed, bool reuse_existing) {
  const auto dir = run_dir_for(cfg, seed);
  RunOutcome out;
  if (reuse_existing && reuse_if_matching(cfg, seed, dir, out)) return out;
  if (cfg.train.precision == Precision::single)
    return train_into_dir<float>(cfg, seed, dir);
  return train_into_dir<double>(cfg, seed, dir);
}

std::vector<CompareRow> compare(const ExperimentConfig& base,
                                const std::vector<std::string>& methods) {
  if (methods.empty()) throw std::runtime_error("compare needs at least one method");
  if (base.seeds.empty()) throw std::runtime_error("compare needs at least one seed");
  const ProblemKind kind = problem_from_name(base.problem);

  std::vector<CompareRow> rows;
  for (const auto& method : methods) {
    ExperimentConfig cfg = base;
    cfg.method = method;
    // re-derive the penalty while keeping every other override
    TrainConfig tc = base.train;
    tc.penalty = method_train_config(kind, method).penalty;
    cfg.train = tc;

    MetricsBundle acc;
    for (auto seed : base.seeds) {
      const auto out = run_one(cfg, seed, /*reuse_existing=*/true);
      if (out.aborted) throw std::runtime_error("run aborted: " + out.dir.string());
      acc.rel_l2 += out.metrics.rel_l2;
      acc.l_inf += out.metrics.l_inf;
      acc.q95_residual += out.metrics.q95_residual;
      acc.q95_error += out.metrics.q95_error;
      acc.mean_abs_residual += out.metrics.mean_abs_residual;
    }
    const double inv = 1.0 / static_cast<double>(base.seeds.size());
    acc.rel_l2 *= inv;
    acc.l_inf *= inv;
    acc.q95_residual *= inv;
    acc.q95_error *= inv;
    acc.mean_abs_residual *= inv;
    rows.push_back({method, acc, false, false, false});
  }

  auto flag_best = [&](auto member, bool CompareRow::* flag) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].metrics.*member < rows[best].metrics.*member) best = i;
    rows[best].*flag = true;
  };
  flag_best(&MetricsBundle::rel_l2, &CompareRow::best_rel_l2);
  flag_best(&MetricsBundle::l_inf, &CompareRow::best_l_inf);
  flag_best(&MetricsBundle::q95_residual, &CompareRow::best_q95);

  const auto out_csv = resolve_out_dir(base) / (base.problem + "_compare.csv");
  std::filesystem::create_directories(out_csv.parent_path());
  std::ofstream out(out_csv);
  out << "method,rel_l2,l_inf,q95_residual,q95_error,best_rel_l2,best_l_inf,best_q95\n";
  out.precision(10);
  for (const auto& r : rows)
    out << r.method << ',' << r.metrics.rel_l2 << ',' << r.metrics.l_inf << ','
        << r.metrics.q95_residual << ',' << r.metrics.q95_error << ','
        << (r.best_rel_l2 ? 1 : 0) << ',' << (r.best_l_inf ? 1 : 0) << ','
        << (r.best_q95 ? 1 : 0) << '\n';
  return rows;
}

AblateResult ablate(const std::vector<std::string>& problems,
                    const std::vector<double>& alphas, Penalty penalty,
                    const ExperimentConfig& base) {
  if (penalty == Penalty::none)
    throw std::runtime_error("ablation sweeps require hinge or mean-excess penalty");
  AblateResult result;
  result.problems = problems;
  result.per_problem.resize(problems.size());

  const std::string method = penalty == Penalty::hinge ? "rra_hinge" : "rra_wms";
  for (std::size_t pi = 0; pi < problems.size(); ++pi) {
    const ProblemKind kind = problem_from_name(problems[pi]);
    for (double alpha : alphas) {
      ExperimentConfig cfg = base;
      cfg.problem = problems[pi];
      cfg.method = method;
      TrainConfig tc = method_train_config(kind, method);
      // ablation setup: tail-only objective after warmup, a fixed
      // 4x80 tanh network, Adam 5e-3, eps starting at 0.5
      tc.tail_only = true;
      tc.epochs = 10000;
      tc.warmup = 1000;
      tc.optimizer = OptimizerKind::adam;
      tc.lr0 = 5e-3;
      tc.eps_init = 0.5;
      tc.net = NetworkConfig{.depth = 4, .width = 80, .input_dim = 2};
      tc.eval = EvalConfig{.grid0 = 250, .grid1 = 250};
      // user overrides (typically budget/network shrinking) win
      apply_train_overrides(tc, base.train_overrides);
      tc.alpha = alpha;
      cfg.train = tc;
      cfg.out_dir = (resolve_out_dir(base) /
                     ("ablate_" + penalty_name(penalty)) / problems[pi])
                        .string();

      MetricsBundle acc;
      double eps_acc = 0.0;
      for (auto seed : base.seeds) {
        // run directories are keyed by alpha as well as seed
        const auto dir = resolve_out_dir(cfg) /
                         (problems[pi] + "_" + method + "_a" + std::to_string(alpha) +
                          "_s" + std::to_string(seed));
        RunOutcome out;
        if (!reuse_if_matching(cfg, seed, dir, out)) {
          if (cfg.train.precision == Precision::single)
            out = train_into_dir<float>(cfg, seed, dir);
          else
            out = train_into_dir<double>(cfg, seed, dir);
        }
        if (out.aborted) throw std::runtime_error("ablation run aborted: " + dir.string());
        acc.rel_l2 += out.metrics.rel_l2;
        acc.mean_abs_residual += out.metrics.mean_abs_residual;
        eps_acc += out.final_eps;
      }
      const double inv = 1.0 / static_cast<double>(base.seeds.size());
      result.per_problem[pi].push_back(
          {alpha, acc.rel_l2 * inv, acc.mean_abs_residual * inv, eps_acc * inv});
    }
  }

  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    AblateRow row;
    row.alpha = alphas[ai];
    for (std::size_t pi = 0; pi < problems.size(); ++pi) {
      row.rel_l2 += result.per_problem[pi][ai].rel_l2;
      row.mean_abs_residual += result.per_problem[pi][ai].mean_abs_residual;
      row.final_eps += result.per_problem[pi][ai].final_eps;
    }
    const double inv = 1.0 / static_cast<double>(problems.size());
    row.rel_l2 *= inv;
    row.mean_abs_residual *= inv;
    row.final_eps *= inv;
    result.averaged.push_back(row);
  }

  // per-problem and averaged CSVs
  const auto root = resolve_out_dir(base) / ("ablate_" + penalty_name(penalty));
  std::filesystem::create_directories(root);
  for (std::size_t pi = 0; pi < problems.size(); ++pi) {
    std::ofstream out(root / (problems[pi] + ".csv"));
    out << "alpha,rel_l2,mean_abs_residual,final_eps\n";
    out.precision(10);
    for (const auto& r : result.per_problem[pi])
      out << r.alpha << ',' << r.rel_l2 << ',' << r.mean_abs_residual << ','
          << r.final_eps << '\n';
  }
  std::ofstream out(root / "averaged.csv");
  out << "alpha,rel_l2,mean_abs_residual,final_eps\n";
  out.precision(10);
  for (const auto& r : result.averaged)
    out << r.alpha << ',' << r.rel_l2 << ',' << r.mean_abs_residual << ','
        << r.final_eps << '\n';
  return result;
}

std::filesystem::path export_ccdf(const std::filesystem::path& run_dir, int thresholds) {
  const auto residuals = read_residuals_csv(run_dir / "residuals.csv");
  const auto th = log_spaced_thresholds(residuals, thresholds);
  const auto curve = survival_curve(residuals, th);
  const auto path = run_dir / "ccdf.csv";
  write_ccdf_csv(path, curve);
  return path;
}

}  // namespace rra
