#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "bregmn/mlp.hpp"
#include "bregmn/rng.hpp"

namespace bregmn {

/// Pushforward generator x = G_phi(z). Noise draws are reparameterized
/// (phi-independent), so evaluating G at perturbed parameters on the same
/// noise table gives common-random-number finite differences for free.
///
/// Families:
///   uniform-shift  z ~ U[0,w]^d,  x = theta + z       (params: [theta])
///   affine         z ~ N(0,1),    x = a z + b, 1D     (params: [a, b])
///   mlp            z ~ N(0,I_k),  x = Mlp(z)          (params: all weights)
class GeneratorModel {
 public:
  enum class Family { UniformShift, Affine, Mlp };

  static GeneratorModel uniform_shift(double theta0, double width = 1.0,
                                      int dim = 1);
  static GeneratorModel affine(double a0, double b0);
  static GeneratorModel mlp(int noise_dim, std::vector<int> widths,
                            int out_dim, Rng& init_rng);

  Family family() const { return family_; }
  int noise_dim() const { return noise_dim_; }
  int out_dim() const { return out_dim_; }
  double width() const { return width_; }

  Eigen::VectorXd& params();
  const Eigen::VectorXd& params() const;
  int param_count() const;

  /// n noise rows, independent of the parameters.
  Eigen::MatrixXd sample_noise(int n, Rng& rng) const;

  /// Push a noise table through G_phi; one output row per noise row.
  Eigen::MatrixXd push(const Eigen::MatrixXd& z) const;

  /// Accumulate dL/dphi into grad given dL/dx for a single pushed sample.
  void push_backward(const Eigen::VectorXd& z, const Eigen::VectorXd& dLdx,
                     Eigen::VectorXd& grad) const;

  GeneratorModel(const GeneratorModel& other);
  GeneratorModel& operator=(const GeneratorModel& other);
  GeneratorModel(GeneratorModel&&) = default;
  GeneratorModel& operator=(GeneratorModel&&) = default;

 private:
  GeneratorModel() = default;

  Family family_ = Family::UniformShift;
  int noise_dim_ = 1;
  int out_dim_ = 1;
  double width_ = 1.0;
  Eigen::VectorXd params_;   // uniform-shift / affine
  std::unique_ptr<Mlp> net_; // mlp family owns its parameters
};

}  // namespace bregmn
