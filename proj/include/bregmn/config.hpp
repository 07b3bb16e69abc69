#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bregmn/estimator.hpp"
#include "bregmn/generator.hpp"
#include "bregmn/measure.hpp"

namespace bregmn {

/// Thrown for malformed configs; messages carry the JSON path of the
/// offending key. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Declarative measure description (JSON "kind": gaussian | uniform |
/// mixture | flat). Gaussians take "mean" plus either "var" (isotropic) or
/// "cov" (full matrix).
struct MeasureSpec {
  std::string kind = "gaussian";
  std::vector<double> mean, lo, hi;
  std::vector<std::vector<double>> cov;  // empty -> use var
  double var = 1.0;
  std::vector<double> weights;
  std::vector<MeasureSpec> components;
};

struct GeneratorSpec {
  std::string family = "uniform-shift";
  double theta0 = 0.0, width = 1.0;  // uniform-shift
  double a0 = 1.0, b0 = 0.0;         // affine
  int noise_dim = 2, out_dim = 2;    // mlp
  std::vector<int> widths = {16, 16};
};

struct BaseSpec {
  double alpha = 0.5;
  double sigma1 = 0.001;  // branch noise variances (isotropic)
  double sigma2 = 0.001;
};

struct DreSpec {
  std::string kind = "mmd";  // mmd | discriminator
  double bandwidth = 0.0;    // <= 0: median heuristic
  double lambda = 1e-3;
  std::vector<int> widths = {8};
  int steps = 400;
  double lr = 0.05;
};

struct EstimatorSpec {
  int n_fit = 256;
  int n_base = 2048;
  double fd_step = 1e-3;
  int refit_every = 1;
  std::string grad_mode = "auto";  // auto | fd | pathwise
};

struct OptimizerSpec {
  std::string kind = "sgd";  // sgd | adam
  double lr = 0.05;
  double momentum = 0.9;
  double clip = 10.0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

struct ExperimentConfig {
  std::string experiment = "run";
  std::uint64_t seed = 1;
  std::string out_dir;
  std::string f = "neglog";
  int max_steps = 2000;
  double tol = 1e-3;
  MeasureSpec data;
  GeneratorSpec generator;
  BaseSpec base;
  DreSpec dre;
  EstimatorSpec estimator;
  OptimizerSpec optimizer;

  // Subcommand-specific extras.
  std::optional<MeasureSpec> model;         // divergence / dre-fit Q
  std::optional<MeasureSpec> base_measure;  // divergence M (absent: M = Q)
  int grid_points = 0;                      // divergence; 0 = default
  double sigma2 = 0.5;                      // verify-prop1
  int n_mc = 100000;                        // verify-prop1
  std::vector<double> thetas;               // support-signal sweep
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical serialization (sorted keys, resolved defaults); parse of the
/// output reproduces the same config.
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& cfg);

Measure build_measure(const MeasureSpec& spec);
GeneratorModel build_generator(const GeneratorSpec& spec, Rng&& init_rng);

/// Collapses the base / dre / estimator specs into the estimator pipeline
/// knobs.
PipelineConfig to_pipeline(const ExperimentConfig& cfg);

inline constexpr const char* kArtifactVersion = "bregmn-0.1.0";

struct RunRecord {
  std::string experiment;
  std::string version = kArtifactVersion;
  std::uint64_t config_hash = 0;
  std::vector<std::string> csv_paths;
  std::map<std::string, double> metrics;
  double wall_seconds = 0.0;
};

}  // namespace bregmn
