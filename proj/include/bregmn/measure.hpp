#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "bregmn/grid.hpp"
#include "bregmn/rng.hpp"

namespace bregmn {

/// Probability measure on R^d with optional closed-form density, sampling,
/// and Gaussian convolution. Value type; mixtures and convolutions own their
/// parts through shared immutable nodes.
///
/// Kinds:
///   gaussian     N(mean, cov), cov SPD
///   uniform-box  axis-aligned box
///   mixture      finite convex combination of components
///   empirical    sample table; sampling only, no density
///   convolved    base * N(0, noise_cov); closed forms where available
///   flat         unnormalized density 1 on a box; base-measure use only
class Measure {
 public:
  enum class Kind { Gaussian, UniformBox, Mixture, Empirical, Convolved, Flat };

  static Measure gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);
  /// Isotropic convenience: N(mean, var * I).
  static Measure gaussian_iso(Eigen::VectorXd mean, double var);
  static Measure uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static Measure mixture(std::vector<double> weights,
                         std::vector<Measure> components);
  static Measure empirical(Eigen::MatrixXd samples);
  static Measure flat(Eigen::VectorXd lo, Eigen::VectorXd hi);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool has_density() const;
  bool is_probability() const { return kind_ != Kind::Flat; }

  double density(const Eigen::VectorXd& x) const;
  Eigen::VectorXd density_batch(const Eigen::MatrixXd& points) const;

  /// n samples, one per row. Throws for flat measures.
  Eigen::MatrixXd sample(int n, Rng& rng) const;

  /// This measure convolved with N(0, cov). Gaussians absorb the covariance,
  /// mixtures distribute over components, boxes get the normal-cdf closed
  /// form (diagonal noise) or an internal quadrature fallback.
  Measure convolve_gaussian(const Eigen::MatrixXd& cov) const;
  Measure convolve_gaussian_iso(double var) const;

  /// Axis-aligned box that carries all but ~1e-9 of the mass (supports are
  /// padded by six standard deviations where unbounded).
  void support_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const;

  /// Density discontinuity locations along one axis (box edges).
  std::vector<double> breakpoints(int axis) const;

  // Gaussian accessors (throw for other kinds).
  const Eigen::VectorXd& mean() const;
  const Eigen::MatrixXd& cov() const;

  const Eigen::MatrixXd& samples() const;  // empirical accessor

 private:
  Measure() = default;

  Kind kind_ = Kind::Gaussian;
  int dim_ = 0;

  // gaussian
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;      // lower Cholesky factor of cov
  Eigen::MatrixXd cov_inv_;
  double log_norm_ = 0.0;     // -d/2 log(2 pi) - 1/2 log det cov

  // uniform-box / flat
  Eigen::VectorXd lo_, hi_;
  double inv_vol_ = 0.0;

  // mixture
  std::vector<double> weights_;
  std::vector<Measure> components_;

  // empirical
  std::shared_ptr<const Eigen::MatrixXd> samples_;

  // convolved
  std::shared_ptr<const Measure> base_;
  Eigen::MatrixXd noise_cov_;
  Eigen::MatrixXd noise_chol_;
  bool noise_diagonal_ = false;
  Eigen::VectorXd noise_sigma_;  // per-axis std dev when diagonal

  void init_gaussian();
  double convolved_density(const Eigen::VectorXd& x) const;
};

/// Builds a grid covering every listed measure's support box. Points per
/// axis defaults to 1024 in 1D and 256 in 2D. Box-edge breakpoints of the
/// measures are forwarded to the grid.
QuadratureGrid grid_for(const std::vector<const Measure*>& ms,
                        int pts_per_axis = 0);

}  // namespace bregmn
