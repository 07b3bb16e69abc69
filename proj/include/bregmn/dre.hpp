#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

#include "bregmn/mlp.hpp"
#include "bregmn/rng.hpp"

namespace bregmn {

// Fitted ratio models clamp their outputs to this range so downstream f'
// evaluations stay finite.
inline constexpr double kRatioModelFloor = 1e-6;
inline constexpr double kRatioModelCeil = 1e6;

/// Gaussian RBF kernel parameters. bandwidth <= 0 selects the median
/// heuristic over the pooled samples at fit time. lambda is a relative
/// ridge: the solve uses lambda * trace(K_qq) / n on the diagonal.
struct KernelSpec {
  double bandwidth = 0.0;
  double lambda = 1e-3;
};

struct DiscriminatorOptions {
  std::vector<int> widths = {8};  // empty = linear logit
  int steps = 400;
  double lr = 0.05;
};

/// A fitted (or analytic plug-in) density-ratio model r(x), always clamped
/// to [kRatioModelFloor, kRatioModelCeil]. Immutable after fitting.
class RatioModel {
 public:
  enum class Kind { Mmd, Discriminator, Analytic };

  /// Empty model; throws on evaluation. Assign a fitted one before use.
  RatioModel() = default;

  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd eval_batch(const Eigen::MatrixXd& xs) const;

  /// d r / dx. Zero whenever the output clamp is active.
  Eigen::VectorXd grad_x(const Eigen::VectorXd& x) const;

  Kind kind() const { return kind_; }
  double bandwidth() const { return bandwidth_; }

  /// Mmd kind: the regularized-solve ratio values at the denominator
  /// support points (n_q * w with (K_qq + lambda_eff I) w = K_qp 1 / n_p).
  const Eigen::VectorXd& values_at_support() const;
  const Eigen::MatrixXd& support_points() const;

  /// Wraps exact densities (or any callable) as a ratio model. grad is
  /// optional and only needed by pathwise gradient consumers.
  static RatioModel analytic(
      std::function<double(const Eigen::VectorXd&)> r,
      std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad = nullptr);

 private:
  friend RatioModel fit_mmd_ratio(const Eigen::MatrixXd&, const Eigen::MatrixXd&,
                                  const KernelSpec&);
  friend std::pair<RatioModel, RatioModel> fit_mmd_ratio_pair(
      const Eigen::MatrixXd&, const Eigen::MatrixXd&, const Eigen::MatrixXd&,
      const KernelSpec&);
  friend RatioModel fit_discriminator_ratio(const Eigen::MatrixXd&,
                                            const Eigen::MatrixXd&,
                                            const DiscriminatorOptions&, Rng&);

  Kind kind_ = Kind::Analytic;
  double bandwidth_ = 0.0;

  // mmd
  Eigen::MatrixXd support_;  // denominator sample table, one point per row
  Eigen::VectorXd values_;   // ratio values at support points

  // discriminator
  std::shared_ptr<const Mlp> logit_;

  // analytic
  std::function<double(const Eigen::VectorXd&)> fn_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn_grad_;
};

/// Median pairwise distance over the pooled rows of a and b, divided by
/// sqrt(2) so the RBF kernel k(x,y) = exp(-|x-y|^2 / (2 h^2)) equals e^-1 at
/// the median distance. Pools are subsampled to at most 2000 rows.
double median_heuristic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Closed-form kernel ratio fit: solve (K_qq + lambda_eff I) w = K_qp 1/n_p
/// on the denominator Gram matrix, keep values v = n_q w at the denominator
/// points, and evaluate elsewhere by kernel-weighted (Nadaraya-Watson)
/// interpolation of v.
RatioModel fit_mmd_ratio(const Eigen::MatrixXd& samples_num,
                         const Eigen::MatrixXd& samples_den,
                         const KernelSpec& kernel);

/// Two ratio fits sharing one denominator table (and one Gram factorization):
/// returns (num_a / den, num_b / den).
std::pair<RatioModel, RatioModel> fit_mmd_ratio_pair(
    const Eigen::MatrixXd& num_a, const Eigen::MatrixXd& num_b,
    const Eigen::MatrixXd& samples_den, const KernelSpec& kernel);

/// Logistic discriminator route: full-batch gradient descent on
/// cross-entropy with label y=1 for samples_p; the ratio is exp(C(x)) with
/// C the pre-sigmoid logit.
RatioModel fit_discriminator_ratio(const Eigen::MatrixXd& samples_p,
                                   const Eigen::MatrixXd& samples_q,
                                   const DiscriminatorOptions& options,
                                   Rng& rng);

/// Biased (V-statistic) squared MMD with an RBF kernel; bandwidth <= 0 uses
/// the median heuristic.
double mmd2_biased(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                   double bandwidth = 0.0);

}  // namespace bregmn
