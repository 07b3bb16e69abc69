#include "bregmn/generator.hpp"

#include <stdexcept>

namespace bregmn {

GeneratorModel::GeneratorModel(const GeneratorModel& other)
    : family_(other.family_),
      noise_dim_(other.noise_dim_),
      out_dim_(other.out_dim_),
      width_(other.width_),
      params_(other.params_),
      net_(other.net_ ? std::make_unique<Mlp>(*other.net_) : nullptr) {}

GeneratorModel& GeneratorModel::operator=(const GeneratorModel& other) {
  if (this == &other) return *this;
  family_ = other.family_;
  noise_dim_ = other.noise_dim_;
  out_dim_ = other.out_dim_;
  width_ = other.width_;
  params_ = other.params_;
  net_ = other.net_ ? std::make_unique<Mlp>(*other.net_) : nullptr;
  return *this;
}

GeneratorModel GeneratorModel::uniform_shift(double theta0, double width,
                                             int dim) {
  if (!(width > 0))
    throw std::invalid_argument("generator: width must be positive");
  GeneratorModel g;
  g.family_ = Family::UniformShift;
  g.noise_dim_ = g.out_dim_ = dim;
  g.width_ = width;
  g.params_ = Eigen::VectorXd::Constant(1, theta0);
  return g;
}

GeneratorModel GeneratorModel::affine(double a0, double b0) {
  GeneratorModel g;
  g.family_ = Family::Affine;
  g.noise_dim_ = g.out_dim_ = 1;
  g.params_.resize(2);
  g.params_ << a0, b0;
  return g;
}

GeneratorModel GeneratorModel::mlp(int noise_dim, std::vector<int> widths,
                                   int out_dim, Rng& init_rng) {
  GeneratorModel g;
  g.family_ = Family::Mlp;
  g.noise_dim_ = noise_dim;
  g.out_dim_ = out_dim;
  g.net_ = std::make_unique<Mlp>(noise_dim, std::move(widths), out_dim);
  g.net_->init(init_rng);
  return g;
}

Eigen::VectorXd& GeneratorModel::params() {
  return net_ ? net_->params() : params_;
}

const Eigen::VectorXd& GeneratorModel::params() const {
  return net_ ? net_->params() : params_;
}

int GeneratorModel::param_count() const {
  return static_cast<int>(params().size());
}

Eigen::MatrixXd GeneratorModel::sample_noise(int n, Rng& rng) const {
  if (n < 1) throw std::invalid_argument("generator: noise count must be positive");
  Eigen::MatrixXd z(n, noise_dim_);
  if (family_ == Family::UniformShift) {
    std::uniform_real_distribution<double> u(0.0, width_);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < noise_dim_; ++a) z(i, a) = u(rng);
  } else {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < noise_dim_; ++a) z(i, a) = gauss(rng);
  }
  return z;
}

Eigen::MatrixXd GeneratorModel::push(const Eigen::MatrixXd& z) const {
  if (z.cols() != noise_dim_)
    throw std::invalid_argument("generator: noise dimension mismatch");
  switch (family_) {
    case Family::UniformShift:
      return z.array() + params_[0];
    case Family::Affine:
      return params_[0] * z.array() + params_[1];
    case Family::Mlp:
      return net_->forward_batch(z);
  }
  return z;
}

void GeneratorModel::push_backward(const Eigen::VectorXd& z,
                                   const Eigen::VectorXd& dLdx,
                                   Eigen::VectorXd& grad) const {
  if (grad.size() != param_count())
    throw std::invalid_argument("generator: grad size mismatch");
  switch (family_) {
    case Family::UniformShift:
      grad[0] += dLdx.sum();
      return;
    case Family::Affine:
      grad[0] += dLdx[0] * z[0];
      grad[1] += dLdx[0];
      return;
    case Family::Mlp:
      net_->backward(z, dLdx, grad);
      return;
  }
}

}  // namespace bregmn
