#include "bregmn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace bregmn {

Mlp::Mlp(int in_dim, std::vector<int> hidden, int out_dim)
    : in_dim_(in_dim), out_dim_(out_dim), widths_(std::move(hidden)) {
  if (in_dim < 1 || out_dim < 1)
    throw std::invalid_argument("mlp: dimensions must be positive");
  for (int w : widths_)
    if (w < 1) throw std::invalid_argument("mlp: hidden widths must be positive");

  Eigen::Index off = 0;
  int prev = in_dim_;
  auto add_layer = [&](int out) {
    layers_.push_back({off, off + static_cast<Eigen::Index>(out) * prev, prev, out});
    off += static_cast<Eigen::Index>(out) * prev + out;
    prev = out;
  };
  for (int w : widths_) add_layer(w);
  add_layer(out_dim_);
  params_ = Eigen::VectorXd::Zero(off);
}

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>>
Mlp::weight(const LayerView& l) const {
  return {params_.data() + l.w_off, l.out, l.in};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(const LayerView& l) const {
  return {params_.data() + l.b_off, l.out};
}

void Mlp::init(Rng& rng) {
  for (const LayerView& l : layers_) {
    const double s = std::sqrt(6.0 / (l.in + l.out));
    std::uniform_real_distribution<double> u(-s, s);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(l.out) * l.in; ++i)
      params_[l.w_off + i] = u(rng);
    for (int i = 0; i < l.out; ++i) params_[l.b_off + i] = 0.0;
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  if (x.size() != in_dim_)
    throw std::invalid_argument("mlp: input dimension mismatch");
  Eigen::VectorXd h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerView& l = layers_[i];
    Eigen::VectorXd z = weight(l) * h + bias(l);
    if (i + 1 < layers_.size()) z = z.array().tanh();
    h = std::move(z);
  }
  return h;
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& xs) const {
  Eigen::MatrixXd out(xs.rows(), out_dim_);
  for (Eigen::Index i = 0; i < xs.rows(); ++i)
    out.row(i) = forward(xs.row(i).transpose()).transpose();
  return out;
}

Eigen::VectorXd Mlp::backward(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& dLdy,
                              Eigen::VectorXd& param_grad) const {
  if (param_grad.size() != params_.size())
    throw std::invalid_argument("mlp: param_grad size mismatch");

  // Forward, keeping post-activation values per layer.
  std::vector<Eigen::VectorXd> acts;
  acts.reserve(layers_.size() + 1);
  acts.push_back(x);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerView& l = layers_[i];
    Eigen::VectorXd z = weight(l) * acts.back() + bias(l);
    if (i + 1 < layers_.size()) z = z.array().tanh();
    acts.push_back(std::move(z));
  }

  Eigen::VectorXd delta = dLdy;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const LayerView& l = layers_[i];
    if (i + 1 < layers_.size()) {
      // tanh' = 1 - tanh^2, and acts[i+1] already holds tanh(z).
      delta.array() *= 1.0 - acts[i + 1].array().square();
    }
    const Eigen::VectorXd& in = acts[i];
    for (int r = 0; r < l.out; ++r) {
      param_grad.segment(l.w_off + static_cast<Eigen::Index>(r) * l.in, l.in) +=
          delta[r] * in;
      param_grad[l.b_off + r] += delta[r];
    }
    delta = weight(l).transpose() * delta;
  }
  return delta;
}

}  // namespace bregmn
