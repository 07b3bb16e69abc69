#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "bregmn/convex.hpp"
#include "bregmn/estimator.hpp"
#include "bregmn/measure.hpp"
#include "bregmn/rng.hpp"

namespace bregmn {

/// Noisy mixture base measure
///   M = alpha (P * N(0, cov1)) + (1 - alpha) (Q * N(0, cov2)).
/// The Gaussian convolution gives M full support even when P and Q are
/// mutually singular, which is what keeps the ratios p/m, q/m usable.
/// Analytic density access requires both branches to have densities;
/// empirical branches (generator samples) still support sampling.
class NoisyBase {
 public:
  NoisyBase(Measure p, Measure q, double alpha, Eigen::MatrixXd cov1,
            Eigen::MatrixXd cov2);

  double alpha() const { return alpha_; }
  const Eigen::MatrixXd& cov1() const { return cov1_; }
  const Eigen::MatrixXd& cov2() const { return cov2_; }
  const Measure& p() const { return p_; }
  const Measure& q() const { return q_; }
  bool analytic() const { return analytic_; }

  /// The noise-smoothed branches P * N(0, cov1) and Q * N(0, cov2). These
  /// are the measures the noisy construction actually compares: against the
  /// raw P and Q a log-family generator sees an infinite divergence whenever
  /// the supports stay disjoint (the ratio q/m is exactly zero on P's
  /// support no matter how wide the base noise is), while the smoothed
  /// branches keep every ratio positive and the objective finite.
  const Measure& noisy_p() const { return noisy_p_; }
  const Measure& noisy_q() const { return noisy_q_; }

  /// The base as a plain measure (mixture of the convolved branches).
  const Measure& mixture() const { return mix_; }

  double density(const Eigen::VectorXd& x) const;
  Eigen::VectorXd density_batch(const Eigen::MatrixXd& points) const;
  Eigen::MatrixXd sample(int n, Rng& rng) const;

 private:
  double alpha_;
  Eigen::MatrixXd cov1_, cov2_;
  Measure p_, q_, noisy_p_, noisy_q_, mix_;
  bool analytic_;
};

NoisyBase build_noisy_base(const Measure& p, const Measure& q, double alpha,
                           const Eigen::MatrixXd& cov1,
                           const Eigen::MatrixXd& cov2);

/// Isotropic branch noise: cov_i = var_i * I.
NoisyBase build_noisy_base_iso(const Measure& p, const Measure& q,
                               double alpha, double var1, double var2);

/// The symmetric case M0 = (P + Q)/2 * N(0, sigma2 I).
NoisyBase symmetric_noisy_base(const Measure& p, const Measure& q,
                               double sigma2);

/// One row per swept parameter value of a one-parameter model family.
struct SignalRow {
  double theta = 0.0;
  double js_grad = 0.0;     // |d/dtheta| of the JS f-divergence oracle
  double breg_grad = 0.0;   // |d/dtheta| of the scaled-Bregman objective
  double breg_value = 0.0;  // objective at theta
};

/// How the scaled-Bregman column of the signal table is differentiated.
/// Quadrature: centered differences of the exact quadrature value of
/// B(P*N1, Q_theta*N2 | M), the divergence between the noise-smoothed
/// branches over their mixture base. Smoothing the numerators is essential,
/// not cosmetic: with the raw densities the ratio q/m is exactly zero on
/// P's support for every disjoint theta, a log-family generator assigns
/// that an infinite value, and the floored stand-in saturates near
/// 1/kRatioFloor where centered differences resolve nothing but rounding
/// noise. The smoothed objective is finite, theta-smooth, and is what the
/// noisy construction optimizes.
/// Pipeline: centered differences of the full sample-based training
/// objective (DRE fits and all) under common random numbers; this is the
/// signal the trainer actually follows.
enum class SignalSource { Quadrature, Pipeline };

/// Sweeps theta over `family` (theta -> Q_theta, a uniform-box family for
/// the Pipeline source) and tabulates the JS f-divergence gradient next to
/// the scaled-Bregman gradient. cfg supplies alpha, the branch noise, and —
/// for the Pipeline source — the DRE settings.
std::vector<SignalRow> support_signal_check(
    const Measure& p, const std::function<Measure(double)>& family,
    const std::vector<double>& thetas, const ConvexGenerator& f,
    const PipelineConfig& cfg, SignalSource source, std::uint64_t seed = 1,
    double fd_step = 1e-3);

}  // namespace bregmn
