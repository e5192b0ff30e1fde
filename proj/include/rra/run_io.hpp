#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rra/metrics.hpp"
#include "rra/mlp.hpp"
#include "rra/trainer.hpp"

namespace rra {

struct RunProvenance {
  std::string problem;
  std::string method;
  std::uint64_t seed = 0;
  int epochs = 0;
};

void write_epochs_csv(const std::filesystem::path& path,
                      const std::vector<EpochRecord>& records);

void write_metrics_json(const std::filesystem::path& path, const RunProvenance& prov,
                        const MetricsBundle& metrics, double final_eps,
                        double final_lambda_p, double wall_seconds, bool aborted,
                        const std::string& abort_reason);

/// Loads metrics.json back; throws std::runtime_error when absent/corrupt.
MetricsBundle read_metrics_json(const std::filesystem::path& path,
                                bool* aborted = nullptr);

void write_residuals_csv(const std::filesystem::path& path, const RunProvenance& prov,
                         std::span<const double> abs_residuals);

std::vector<double> read_residuals_csv(const std::filesystem::path& path);

void write_ccdf_csv(const std::filesystem::path& path,
                    const std::vector<SurvivalPoint>& curve);

namespace io_detail {
const char* activation_name(Activation a);
const char* output_name(OutputActivation o);
const char* wrapper_name(WrapperKind w);
Activation activation_from(const std::string& s);
OutputActivation output_from(const std::string& s);
WrapperKind wrapper_from(const std::string& s);
}  // namespace io_detail

/// Text checkpoint: one JSON header line describing the network, then
/// one hexfloat parameter per line (bit-exact round trip per precision).
template <typename T>
void save_checkpoint(const std::filesystem::path& path, const std::string& problem,
                     const Field<T>& field) {
  const auto& cfg = field.net().config();
  nlohmann::json header{
      {"format", "rra-checkpoint"},
      {"version", 1},
      {"problem", problem},
      {"precision", sizeof(T) == 4 ? "single" : "double"},
      {"depth", cfg.depth},
      {"width", cfg.width},
      {"input_dim", cfg.input_dim},
      {"activation", io_detail::activation_name(cfg.activation)},
      {"output", io_detail::output_name(cfg.output)},
      {"wrapper", io_detail::wrapper_name(field.wrapper())},
      {"params", field.net().param_count()},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out << header.dump() << "\n";
  char buf[48];
  for (T v : field.net().params()) {
    std::snprintf(buf, sizeof(buf), "%a", static_cast<double>(v));
    out << buf << "\n";
  }
}

template <typename T>
Field<T> load_checkpoint(const std::filesystem::path& path,
                         std::string* problem_out = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path.string());
  std::string line;
  std::getline(in, line);
  const auto header = nlohmann::json::parse(line);
  const std::string want = sizeof(T) == 4 ? "single" : "double";
  if (header.at("precision").get<std::string>() != want)
    throw std::runtime_error("checkpoint precision mismatch");
  NetworkConfig cfg;
  cfg.depth = header.at("depth").get<int>();
  cfg.width = header.at("width").get<int>();
  cfg.input_dim = header.at("input_dim").get<int>();
  cfg.activation = io_detail::activation_from(header.at("activation").get<std::string>());
  cfg.output = io_detail::output_from(header.at("output").get<std::string>());
  Field<T> field(cfg, io_detail::wrapper_from(header.at("wrapper").get<std::string>()), 0);
  if (problem_out) *problem_out = header.at("problem").get<std::string>();
  const auto n = header.at("params").get<std::size_t>();
  if (n != field.net().param_count())
    throw std::runtime_error("checkpoint parameter count mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    std::getline(in, line);
    if (!in) throw std::runtime_error("truncated checkpoint");
    field.net().params()[i] = static_cast<T>(std::strtod(line.c_str(), nullptr));
  }
  return field;
}

}  // namespace rra
