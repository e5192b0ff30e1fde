#include "rra/run_io.hpp"

#include <cmath>

namespace rra {

namespace io_detail {

const char* activation_name(Activation a) {
  return a == Activation::tanh_fn ? "tanh" : "silu";
}
const char* output_name(OutputActivation o) {
  return o == OutputActivation::linear ? "linear" : "tanh";
}
const char* wrapper_name(WrapperKind w) {
  switch (w) {
    case WrapperKind::identity: return "identity";
    case WrapperKind::heat_hard: return "heat_hard";
    case WrapperKind::burgers_hard: return "burgers_hard";
  }
  return "identity";
}
Activation activation_from(const std::string& s) {
  if (s == "tanh") return Activation::tanh_fn;
  if (s == "silu") return Activation::silu;
  throw std::runtime_error("unknown activation: " + s);
}
OutputActivation output_from(const std::string& s) {
  if (s == "linear") return OutputActivation::linear;
  if (s == "tanh") return OutputActivation::tanh_out;
  throw std::runtime_error("unknown output activation: " + s);
}
WrapperKind wrapper_from(const std::string& s) {
  if (s == "identity") return WrapperKind::identity;
  if (s == "heat_hard") return WrapperKind::heat_hard;
  if (s == "burgers_hard") return WrapperKind::burgers_hard;
  throw std::runtime_error("unknown wrapper: " + s);
}

}  // namespace io_detail

void write_epochs_csv(const std::filesystem::path& path,
                      const std::vector<EpochRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,lr,loss,l_base,l_ic,l_bc,l_iface_u,l_iface_ux,l_core,eps,lambda_p,"
         "scale_base,scale_core,val_rel_l2\n";
  out.precision(12);
  for (const auto& r : records) {
    out << r.epoch << ',' << r.lr << ',' << r.loss << ',' << r.l_base << ',' << r.l_ic
        << ',' << r.l_bc << ',' << r.l_iface_u << ',' << r.l_iface_ux << ',' << r.l_core
        << ',' << r.eps << ',' << r.lambda_p << ',' << r.scale_base << ','
        << r.scale_core << ',';
    if (std::isfinite(r.val_rel_l2)) out << r.val_rel_l2;
    out << '\n';
  }
}

void write_metrics_json(const std::filesystem::path& path, const RunProvenance& prov,
                        const MetricsBundle& metrics, double final_eps,
                        double final_lambda_p, double wall_seconds, bool aborted,
                        const std::string& abort_reason) {
  nlohmann::json j{
      {"problem", prov.problem},
      {"method", prov.method},
      {"seed", prov.seed},
      {"epochs", prov.epochs},
      {"rel_l2", metrics.rel_l2},
      {"l_inf", metrics.l_inf},
      {"q95_residual", metrics.q95_residual},
      {"q95_error", metrics.q95_error},
      {"mean_abs_residual", metrics.mean_abs_residual},
      {"final_eps", final_eps},
      {"final_lambda_p", final_lambda_p},
      {"wall_seconds", wall_seconds},
      {"aborted", aborted},
  };
  if (aborted) j["abort_reason"] = abort_reason;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

MetricsBundle read_metrics_json(const std::filesystem::path& path, bool* aborted) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing metrics: " + path.string());
  nlohmann::json j;
  in >> j;
  MetricsBundle m;
  m.rel_l2 = j.at("rel_l2").get<double>();
  m.l_inf = j.at("l_inf").get<double>();
  m.q95_residual = j.at("q95_residual").get<double>();
  m.q95_error = j.at("q95_error").get<double>();
  m.mean_abs_residual = j.at("mean_abs_residual").get<double>();
  if (aborted) *aborted = j.value("aborted", false);
  return m;
}

void write_residuals_csv(const std::filesystem::path& path, const RunProvenance& prov,
                         std::span<const double> abs_residuals) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# problem=" << prov.problem << " method=" << prov.method
      << " seed=" << prov.seed << " epochs=" << prov.epochs << "\n";
  out << "abs_residual\n";
  out.precision(12);
  for (double r : abs_residuals) out << r << '\n';
}

std::vector<double> read_residuals_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing residual dump: " + path.string());
  std::string line;
  std::getline(in, line);  // provenance comment
  std::getline(in, line);  // header
  std::vector<double> vals;
  while (std::getline(in, line))
    if (!line.empty()) vals.push_back(std::strtod(line.c_str(), nullptr));
  if (vals.empty()) throw std::runtime_error("empty residual dump: " + path.string());
  return vals;
}

void write_ccdf_csv(const std::filesystem::path& path,
                    const std::vector<SurvivalPoint>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "threshold,survival\n";
  out.precision(12);
  for (const auto& p : curve) out << p.threshold << ',' << p.fraction << '\n';
}

}  // namespace rra
