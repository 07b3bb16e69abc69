#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bregmn/config.hpp"
#include "bregmn/estimator.hpp"
#include "bregmn/generator.hpp"

namespace bregmn {

struct TrainState {
  int step = 0;  // steps actually executed
  Eigen::VectorXd phi;
  std::vector<double> loss;       // objective per step
  std::vector<double> grad_norm;  // gradient norm per step
  std::vector<double> wall_ms;    // measured per step; excluded from CSVs
  std::vector<Eigen::VectorXd> phi_history;  // parameters after each step
  std::uint64_t seed = 0;
  bool converged = false;
  bool aborted = false;
  std::string abort_reason;
  std::optional<GeneratorModel> generator;  // final model
};

/// Alternating loop: fit both density ratios against the noisy base at the
/// current generator, take one optimizer step on the scaled-Bregman
/// estimate, repeat. Stops at max_steps, on convergence (gradient norm below
/// tol for 20 consecutive steps), or on a non-finite loss (aborted).
TrainState train(const ExperimentConfig& cfg);

/// Same loop shape minimizing the plain f-divergence estimate with the
/// generator itself as the base (the M = Q path). The side-by-side
/// comparison baseline.
TrainState train_f_divergence_baseline(const ExperimentConfig& cfg);

/// Mixture-learning run: validates the non-adversarial setup (2D mixture
/// data, mlp generator, mmd ratios, pathwise gradients) and trains.
TrainState train_nonadversarial_mixture(const ExperimentConfig& cfg);

}  // namespace bregmn
