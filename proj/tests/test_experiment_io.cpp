#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rra/experiment.hpp"
#include "rra/run_io.hpp"

using namespace rra;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig tiny_experiment(const std::string& prob, const std::string& method,
                                 const fs::path& out) {
  ExperimentConfig cfg;
  cfg.problem = prob;
  cfg.method = method;
  cfg.out_dir = out.string();
  cfg.train = method_train_config(problem_from_name(prob), method);
  cfg.train.epochs = 60;
  cfg.train.warmup = 20;
  cfg.train.val_every = 20;
  cfg.train.threads = 2;
  cfg.train.net = NetworkConfig{.depth = 2, .width = 10, .input_dim = 2};
  SamplerConfig s = problem(problem_from_name(cfg.problem)).sampler;
  s.n_int = 120;
  s.n_bnd = std::min(s.n_bnd, 40);
  s.n_ic = std::min(s.n_ic, 40);
  s.n_iface = std::min(s.n_iface, 40);
  cfg.train.sampler = s;
  cfg.train.eval = EvalConfig{.grid0 = 15, .grid1 = 15};
  return cfg;
}

}  // namespace

TEST_CASE("config files: parsing, overrides, validation") {
  const auto dir = fresh_dir("rra_cfg_test");
  {
    std::ofstream out(dir / "good.json");
    out << R"({"problem": "heat1d", "method": "rra_hinge", "seeds": [3, 4],
               "train": {"epochs": 77, "alpha": 0.9, "net": {"depth": 3, "width": 7},
                         "sampler": {"n_int": 55}}})";
  }
  auto cfg = load_experiment_config(dir / "good.json");
  CHECK(cfg.problem == "heat1d");
  CHECK(cfg.train.penalty == Penalty::hinge);
  CHECK(cfg.train.epochs == 77);
  CHECK(cfg.train.alpha == 0.9);
  CHECK(cfg.train.lr0 == 9e-3);  // heat default survives partial overrides
  REQUIRE(cfg.train.net.has_value());
  CHECK(cfg.train.net->depth == 3);
  CHECK(cfg.train.sampler->n_int == 55);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 4});

  {
    std::ofstream out(dir / "bad_problem.json");
    out << R"({"problem": "wave9d"})";
  }
  CHECK_THROWS_AS(load_experiment_config(dir / "bad_problem.json"), std::runtime_error);
  {
    std::ofstream out(dir / "bad_method.json");
    out << R"({"problem": "heat1d", "method": "rra_super"})";
  }
  CHECK_THROWS_AS(load_experiment_config(dir / "bad_method.json"), std::runtime_error);
  {
    std::ofstream out(dir / "empty_seeds.json");
    out << R"({"problem": "heat1d", "seeds": []})";
  }
  CHECK_THROWS_AS(load_experiment_config(dir / "empty_seeds.json"), std::runtime_error);
  {
    std::ofstream out(dir / "mangled.json");
    out << "{problem:";
  }
  CHECK_THROWS_AS(load_experiment_config(dir / "mangled.json"), std::runtime_error);
  CHECK_THROWS_AS(load_experiment_config(dir / "missing.json"), std::runtime_error);
}

TEST_CASE("run_one persists a complete, reproducible run directory") {
  const auto out = fresh_dir("rra_run_test");
  auto cfg = tiny_experiment("poisson2d", "rra_wms", out);

  const auto res = run_one(cfg, 5, /*reuse_existing=*/false);
  CHECK(!res.aborted);
  CHECK(!res.reused);
  for (const char* f : {"config.json", "epochs.csv", "checkpoint.txt", "metrics.json",
                        "residuals.csv"})
    CHECK(fs::exists(res.dir / f));

  // the snapshot round-trips to an identical resolved configuration
  std::ifstream snap(res.dir / "config.json");
  nlohmann::json j;
  snap >> j;
  const auto restored = experiment_from_json(j);
  CHECK(experiment_to_json(restored).dump() == j.dump());

  // reuse skips retraining and reproduces the metrics
  const auto t0 = fs::last_write_time(res.dir / "checkpoint.txt");
  const auto again = run_one(cfg, 5, /*reuse_existing=*/true);
  CHECK(again.reused);
  CHECK(again.metrics.rel_l2 == res.metrics.rel_l2);
  CHECK(fs::last_write_time(res.dir / "checkpoint.txt") == t0);

  // epochs.csv carries the header and one row per epoch
  std::ifstream ep(res.dir / "epochs.csv");
  std::string line;
  std::getline(ep, line);
  CHECK(line.rfind("epoch,lr,loss", 0) == 0);
  int rows = 0;
  while (std::getline(ep, line))
    if (!line.empty()) ++rows;
  CHECK(rows == cfg.train.epochs);
}

TEST_CASE("checkpoint round trip is bit exact per precision") {
  const auto dir = fresh_dir("rra_ckpt_test");

  Field<double> fd({.depth = 3, .width = 9, .input_dim = 2}, WrapperKind::heat_hard, 11);
  save_checkpoint(dir / "d.txt", "heat1d", fd);
  std::string prob;
  auto gd = load_checkpoint<double>(dir / "d.txt", &prob);
  CHECK(prob == "heat1d");
  CHECK(gd.net().params() == fd.net().params());
  CHECK(gd.wrapper() == WrapperKind::heat_hard);

  Field<float> ff({.depth = 2, .width = 6, .input_dim = 2,
                   .activation = Activation::silu,
                   .output = OutputActivation::tanh_out},
                  WrapperKind::identity, 12);
  save_checkpoint(dir / "f.txt", "kdv1d", ff);
  auto gf = load_checkpoint<float>(dir / "f.txt");
  CHECK(gf.net().params() == ff.net().params());
  CHECK(gf.net().config().activation == Activation::silu);
  CHECK(gf.net().config().output == OutputActivation::tanh_out);

  CHECK_THROWS_AS(load_checkpoint<float>(dir / "d.txt"), std::runtime_error);
  CHECK_THROWS_AS(load_checkpoint<double>(dir / "missing.txt"), std::runtime_error);
}

TEST_CASE("compare: single method, best flags, idempotence") {
  const auto out = fresh_dir("rra_cmp_test");
  auto cfg = tiny_experiment("poisson2d", "baseline", out);
  cfg.seeds = {1};

  const auto single = compare(cfg, {"baseline"});
  REQUIRE(single.size() == 1);
  CHECK(single[0].best_rel_l2);
  CHECK(single[0].best_l_inf);
  CHECK(single[0].best_q95);
  CHECK(fs::exists(out / "poisson2d_compare.csv"));

  const auto rows = compare(cfg, {"baseline", "rra_wms"});
  REQUIRE(rows.size() == 2);
  int best_count = 0;
  for (const auto& r : rows) best_count += r.best_rel_l2 ? 1 : 0;
  CHECK(best_count == 1);

  // all four run dirs now exist; a second compare must reuse them
  const auto stamp =
      fs::last_write_time(out / "poisson2d_baseline_s1" / "checkpoint.txt");
  const auto rows2 = compare(cfg, {"baseline", "rra_wms"});
  CHECK(fs::last_write_time(out / "poisson2d_baseline_s1" / "checkpoint.txt") == stamp);
  CHECK(rows2[0].metrics.rel_l2 == rows[0].metrics.rel_l2);

  CHECK_THROWS_AS(compare(cfg, {}), std::runtime_error);
  ExperimentConfig no_seeds = cfg;
  no_seeds.seeds.clear();
  CHECK_THROWS_AS(compare(no_seeds, {"baseline"}), std::runtime_error);
}

TEST_CASE("ccdf export: identical dumps, trivial rows, missing artifacts") {
  const auto out = fresh_dir("rra_ccdf_test");
  auto cfg = tiny_experiment("heat1d", "rra_hinge", out);
  const auto res = run_one(cfg, 2, false);

  const auto p1 = export_ccdf(res.dir);
  std::ifstream f1(p1);
  std::string body1((std::istreambuf_iterator<char>(f1)), {});
  const auto p2 = export_ccdf(res.dir);
  std::ifstream f2(p2);
  std::string body2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(body1 == body2);

  // every residual <= max implies the last survival row is exactly zero
  std::ifstream f3(p1);
  std::string line, last;
  std::getline(f3, line);  // header
  while (std::getline(f3, line))
    if (!line.empty()) last = line;
  CHECK(last.substr(last.find(',') + 1) == "0");

  CHECK_THROWS_AS(export_ccdf(out / "not_a_run"), std::runtime_error);
}

TEST_CASE("ablate: tiny sweep produces per-problem and averaged tables") {
  const auto out = fresh_dir("rra_abl_test");
  ExperimentConfig base;
  base.out_dir = out.string();
  base.seeds = {0};
  base.train = method_train_config(ProblemKind::poisson2d, "rra_wms");
  base.train_overrides = nlohmann::json{
      {"epochs", 50},
      {"warmup", 20},
      {"threads", 2},
      {"val_every", 1000},
      {"net", {{"depth", 1}, {"width", 8}}},
      {"sampler", {{"n_int", 80}, {"n_bnd", 24}}},
      {"eval", {{"grid0", 11}, {"grid1", 11}}},
  };

  const auto res = ablate({"poisson2d"}, {0.5, 0.95}, Penalty::mean_excess, base);
  REQUIRE(res.averaged.size() == 2);
  CHECK(res.averaged[0].alpha == 0.5);
  CHECK(res.averaged[1].alpha == 0.95);
  for (const auto& r : res.averaged) {
    CHECK(std::isfinite(r.rel_l2));
    CHECK(r.final_eps >= 0.0);
  }
  CHECK(fs::exists(out / "ablate_me" / "poisson2d.csv"));
  CHECK(fs::exists(out / "ablate_me" / "averaged.csv"));

  // the ablation preset (tail-only objective, eps_init 0.5) reached the
  // runs, with user overrides layered on top
  {
    std::ifstream in(out / "ablate_me" / "poisson2d" /
                     "poisson2d_rra_wms_a0.500000_s0" / "config.json");
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    CHECK(j["train"]["tail_only"] == true);
    CHECK(j["train"]["eps_init"] == 0.5);
    CHECK(j["train"]["epochs"] == 50);
    CHECK(j["train"]["net"]["width"] == 8);
  }

  // single-alpha sweep produces a single row
  const auto one = ablate({"poisson2d"}, {0.75}, Penalty::hinge, base);
  CHECK(one.averaged.size() == 1);

  CHECK_THROWS_AS(ablate({"poisson2d"}, {0.5}, Penalty::none, base), std::runtime_error);
}
