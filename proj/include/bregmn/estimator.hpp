#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "bregmn/convex.hpp"
#include "bregmn/dre.hpp"
#include "bregmn/generator.hpp"
#include "bregmn/measure.hpp"

namespace bregmn {

struct BregmanEstimate {
  double value = 0.0;
  std::vector<double> terms;  // pointwise increments; value is their mean
  std::size_t n = 0;
  std::string f_name;
  std::uint64_t seed = 0;
};

/// Sample-based scaled-Bregman value: mean over base draws x_i of
/// f(r_pm(x_i)) - f(r_qm(x_i)) - f'(r_qm(x_i)) (r_pm(x_i) - r_qm(x_i)).
BregmanEstimate estimate(const ConvexGenerator& f, const RatioModel& r_pm,
                         const RatioModel& r_qm,
                         const Eigen::MatrixXd& base_samples,
                         std::uint64_t seed = 0);

enum class DreKind { Mmd, Discriminator };
enum class GradMode { Auto, FiniteDifference, Pathwise };

/// Knobs for one full estimator pass (sample, fit ratios, estimate).
struct PipelineConfig {
  int n_fit = 256;    // per-side sample count for ratio fitting
  int n_base = 2048;  // base draws per estimate
  double fd_step = 1e-3;
  GradMode grad_mode = GradMode::Auto;
  DreKind dre = DreKind::Mmd;
  KernelSpec kernel;
  DiscriminatorOptions disc;
  // Noisy base: alpha (P * N(0, sigma2_p I)) + (1-alpha) (Q * N(0, sigma2_q I)).
  double alpha = 0.5;
  double sigma2_p = 0.001;
  double sigma2_q = 0.001;
};

/// Ratio models held fixed between refits; fitted parameters are treated as
/// constants by the gradients.
struct FittedRatios {
  RatioModel r_pm, r_qm;
};

struct PipelineResult {
  BregmanEstimate est;
  FittedRatios ratios;
};

/// One full pass at the generator's current parameters. All random draws
/// come from substreams of `seed` and are parameter-independent, so calling
/// this at perturbed parameters with the same seed realizes common random
/// numbers. When `frozen` is given the ratio fit is skipped and the frozen
/// models are reused (and returned).
PipelineResult pipeline_estimate(const ConvexGenerator& f,
                                 const GeneratorModel& gen,
                                 const Measure& data,
                                 const PipelineConfig& cfg, std::uint64_t seed,
                                 const FittedRatios* frozen = nullptr);

/// Gradient of the pipeline value with respect to the generator parameters.
/// FiniteDifference: central differences of the full pipeline per coordinate
/// with step fd_step * (1 + |phi_i|), at most 64 parameters. Pathwise:
/// reparameterization gradient through the generator-branch base samples
/// with the ratio models frozen. Auto picks FD up to 64 parameters.
Eigen::VectorXd estimate_gradient(const ConvexGenerator& f,
                                  GeneratorModel& gen, const Measure& data,
                                  const PipelineConfig& cfg,
                                  std::uint64_t seed,
                                  const FittedRatios* frozen = nullptr,
                                  double* loss_out = nullptr);

/// Fits r = p/q on fresh data/generator samples; the ratio used by the
/// f-divergence baseline.
RatioModel fit_pq_ratio(const GeneratorModel& gen, const Measure& data,
                        const PipelineConfig& cfg, std::uint64_t seed);

/// f-divergence objective used by the baseline trainer: fit r = p/q on
/// samples of the data and the generator (or reuse `frozen`), return mean of
/// f(r) over fresh generator draws (the base-measure-equals-Q path).
BregmanEstimate pipeline_f_divergence(const ConvexGenerator& f,
                                      const GeneratorModel& gen,
                                      const Measure& data,
                                      const PipelineConfig& cfg,
                                      std::uint64_t seed,
                                      const RatioModel* frozen = nullptr);

Eigen::VectorXd f_divergence_gradient(const ConvexGenerator& f,
                                      GeneratorModel& gen, const Measure& data,
                                      const PipelineConfig& cfg,
                                      std::uint64_t seed,
                                      double* loss_out = nullptr,
                                      const RatioModel* frozen = nullptr);

}  // namespace bregmn
