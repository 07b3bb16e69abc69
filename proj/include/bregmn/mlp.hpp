#pragma once

#include <Eigen/Dense>

#include <vector>

#include "bregmn/rng.hpp"

namespace bregmn {

/// Fully-connected net with tanh hidden activations and a linear output
/// layer. Parameters live in one flat vector (per layer: row-major weight
/// block, then biases) so optimizers and finite differences can treat the
/// model as an opaque R^n point.
class Mlp {
 public:
  Mlp(int in_dim, std::vector<int> hidden, int out_dim);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  int param_count() const { return static_cast<int>(params_.size()); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  /// Xavier-uniform init of weights, zero biases.
  void init(Rng& rng);

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& xs) const;

  /// Reverse pass for one input. Adds dL/dparams into param_grad (which must
  /// be sized param_count) and returns dL/dx.
  Eigen::VectorXd backward(const Eigen::VectorXd& x,
                           const Eigen::VectorXd& dLdy,
                           Eigen::VectorXd& param_grad) const;

 private:
  struct LayerView {
    Eigen::Index w_off, b_off;
    int in, out;
  };

  int in_dim_, out_dim_;
  std::vector<int> widths_;  // hidden widths
  std::vector<LayerView> layers_;
  Eigen::VectorXd params_;

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
  weight(const LayerView& l) const;
  Eigen::Map<const Eigen::VectorXd> bias(const LayerView& l) const;
};

}  // namespace bregmn
