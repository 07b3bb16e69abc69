#include "bregmn/dre.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bregmn/simd/kernels.hpp"

namespace bregmn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Squared distances between the rows of a and b; out is rows(a) x rows(b).
RowMat sqdist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("dre: sample dimension mismatch");
  const auto na = static_cast<std::size_t>(a.rows());
  const auto nb = static_cast<std::size_t>(b.rows());
  RowMat d2(a.rows(), b.rows());
  const auto& k = simd::active();
  if (a.cols() == 1) {
    k.sqdist1(a.col(0).data(), na, b.col(0).data(), nb, d2.data());
  } else if (a.cols() == 2) {
    k.sqdist2(a.col(0).data(), a.col(1).data(), na, b.col(0).data(),
              b.col(1).data(), nb, d2.data());
  } else {
    d2 = (-2.0 * a * b.transpose()).rowwise() + b.rowwise().squaredNorm().transpose();
    d2.colwise() += a.rowwise().squaredNorm();
    d2 = d2.cwiseMax(0.0);
  }
  return d2;
}

RowMat gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double h) {
  RowMat d2 = sqdist(a, b);
  simd::active().rbf(d2.data(), d2.data(), static_cast<std::size_t>(d2.size()),
                     -1.0 / (2.0 * h * h));
  return d2;
}

double clamp_output(double r) {
  if (r < kRatioModelFloor) return kRatioModelFloor;
  if (r > kRatioModelCeil) return kRatioModelCeil;
  return r;
}

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z))
                : std::exp(z) / (1.0 + std::exp(z));
}

constexpr double kDenominatorTiny = 1e-280;

}  // namespace

double median_heuristic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index total = a.rows() + b.rows();
  if (total < 2) throw std::invalid_argument("dre: need at least two samples");
  const Eigen::Index cap = 2000;
  const Eigen::Index stride = (total + cap - 1) / cap;
  Eigen::MatrixXd pool((total + stride - 1) / stride, a.cols());
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < total; i += stride)
    pool.row(n++) = i < a.rows() ? a.row(i) : b.row(i - a.rows());
  pool.conservativeResize(n, Eigen::NoChange);

  const RowMat d2 = sqdist(pool, pool);
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d.push_back(std::sqrt(d2(i, j)));
  if (d.empty()) return 1.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  const double med = *mid;
  const double h = med / std::numbers::sqrt2;
  return h > 1e-12 ? h : 1.0;
}

RatioModel fit_mmd_ratio(const Eigen::MatrixXd& samples_num,
                         const Eigen::MatrixXd& samples_den,
                         const KernelSpec& kernel) {
  auto [model, unused] =
      fit_mmd_ratio_pair(samples_num, samples_num, samples_den, kernel);
  (void)unused;
  return model;
}

std::pair<RatioModel, RatioModel> fit_mmd_ratio_pair(
    const Eigen::MatrixXd& num_a, const Eigen::MatrixXd& num_b,
    const Eigen::MatrixXd& samples_den, const KernelSpec& kernel) {
  if (num_a.rows() < 1 || num_b.rows() < 1 || samples_den.rows() < 1)
    throw std::invalid_argument("dre: empty sample table");
  if (kernel.lambda < 0)
    throw std::invalid_argument("dre: ridge lambda must be nonnegative");

  const double h = kernel.bandwidth > 0
                       ? kernel.bandwidth
                       : median_heuristic(num_a, samples_den);
  const Eigen::Index nq = samples_den.rows();

  RowMat kqq = gram(samples_den, samples_den, h);
  if (!kqq.allFinite()) throw std::runtime_error("dre: non-finite kernel matrix");
  const double lambda_eff = kernel.lambda * kqq.trace() / static_cast<double>(nq);
  Eigen::MatrixXd a = kqq;
  a.diagonal().array() += lambda_eff;

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    if (kernel.lambda == 0.0)
      throw std::runtime_error(
          "dre: singular kernel system at lambda = 0; use a positive ridge");
    throw std::runtime_error("dre: kernel system factorization failed");
  }

  auto solve_for = [&](const Eigen::MatrixXd& num) {
    const RowMat kqp = gram(samples_den, num, h);
    if (!kqp.allFinite())
      throw std::runtime_error("dre: non-finite kernel matrix");
    const Eigen::VectorXd rhs = kqp.rowwise().mean();
    RatioModel m;
    m.kind_ = RatioModel::Kind::Mmd;
    m.bandwidth_ = h;
    m.support_ = samples_den;
    m.values_ = static_cast<double>(nq) * llt.solve(rhs);
    return m;
  };

  return {solve_for(num_a), solve_for(num_b)};
}

RatioModel fit_discriminator_ratio(const Eigen::MatrixXd& samples_p,
                                   const Eigen::MatrixXd& samples_q,
                                   const DiscriminatorOptions& options,
                                   Rng& rng) {
  if (samples_p.rows() < 1 || samples_q.rows() < 1)
    throw std::invalid_argument("dre: empty sample table");
  if (samples_p.cols() != samples_q.cols())
    throw std::invalid_argument("dre: sample dimension mismatch");
  if (options.steps < 1)
    throw std::invalid_argument("dre: discriminator needs steps >= 1");

  auto logit = std::make_shared<Mlp>(static_cast<int>(samples_p.cols()),
                                     options.widths, 1);
  logit->init(rng);

  const double inv_np = 1.0 / static_cast<double>(samples_p.rows());
  const double inv_nq = 1.0 / static_cast<double>(samples_q.rows());
  Eigen::VectorXd grad(logit->param_count());
  Eigen::VectorXd d(1);

  for (int step = 0; step < options.steps; ++step) {
    grad.setZero();
    double loss = 0.0;
    for (Eigen::Index i = 0; i < samples_p.rows(); ++i) {
      const Eigen::VectorXd x = samples_p.row(i).transpose();
      const double c = logit->forward(x)[0];
      loss += softplus(-c) * inv_np;
      d[0] = -sigmoid(-c) * inv_np;
      logit->backward(x, d, grad);
    }
    for (Eigen::Index i = 0; i < samples_q.rows(); ++i) {
      const Eigen::VectorXd x = samples_q.row(i).transpose();
      const double c = logit->forward(x)[0];
      loss += softplus(c) * inv_nq;
      d[0] = sigmoid(c) * inv_nq;
      logit->backward(x, d, grad);
    }
    if (!std::isfinite(loss))
      throw std::runtime_error(
          "dre: discriminator training diverged at step " +
          std::to_string(step));
    logit->params() -= options.lr * grad;
  }

  RatioModel m;
  m.kind_ = RatioModel::Kind::Discriminator;
  m.logit_ = std::move(logit);
  return m;
}

RatioModel RatioModel::analytic(
    std::function<double(const Eigen::VectorXd&)> r,
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad) {
  RatioModel m;
  m.kind_ = Kind::Analytic;
  m.fn_ = std::move(r);
  m.fn_grad_ = std::move(grad);
  return m;
}

double RatioModel::operator()(const Eigen::VectorXd& x) const {
  switch (kind_) {
    case Kind::Mmd: {
      const Eigen::Index n = support_.rows();
      const double c = -1.0 / (2.0 * bandwidth_ * bandwidth_);
      double s = 0.0, num = 0.0, best_d2 = 0.0;
      Eigen::Index best = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d2 = (support_.row(i).transpose() - x).squaredNorm();
        const double k = std::exp(c * d2);
        s += k;
        num += values_[i] * k;
        if (i == 0 || d2 < best_d2) {
          best_d2 = d2;
          best = i;
        }
      }
      if (s < kDenominatorTiny) return clamp_output(values_[best]);
      return clamp_output(num / s);
    }
    case Kind::Discriminator: {
      double c = logit_->forward(x)[0];
      c = std::clamp(c, std::log(kRatioModelFloor), std::log(kRatioModelCeil));
      return std::exp(c);
    }
    case Kind::Analytic:
      if (!fn_) throw std::logic_error("dre: evaluating an empty ratio model");
      return clamp_output(fn_(x));
  }
  return 1.0;
}

Eigen::VectorXd RatioModel::eval_batch(const Eigen::MatrixXd& xs) const {
  Eigen::VectorXd out(xs.rows());
  if (kind_ == Kind::Mmd) {
    RowMat k = sqdist(xs, support_);
    simd::active().rbf(k.data(), k.data(), static_cast<std::size_t>(k.size()),
                       -1.0 / (2.0 * bandwidth_ * bandwidth_));
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
      const double s =
          simd::active().sum(k.data() + i * support_.rows(),
                             static_cast<std::size_t>(support_.rows()));
      if (s < kDenominatorTiny) {
        out[i] = (*this)(xs.row(i).transpose());
        continue;
      }
      const double num =
          simd::active().dot(k.data() + i * support_.rows(), values_.data(),
                             static_cast<std::size_t>(support_.rows()));
      out[i] = clamp_output(num / s);
    }
    return out;
  }
  for (Eigen::Index i = 0; i < xs.rows(); ++i)
    out[i] = (*this)(xs.row(i).transpose());
  return out;
}

Eigen::VectorXd RatioModel::grad_x(const Eigen::VectorXd& x) const {
  switch (kind_) {
    case Kind::Mmd: {
      const Eigen::Index n = support_.rows();
      const double inv_h2 = 1.0 / (bandwidth_ * bandwidth_);
      double s = 0.0, num = 0.0;
      Eigen::VectorXd ks(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d2 = (support_.row(i).transpose() - x).squaredNorm();
        ks[i] = std::exp(-0.5 * inv_h2 * d2);
        s += ks[i];
        num += values_[i] * ks[i];
      }
      if (s < kDenominatorTiny) return Eigen::VectorXd::Zero(x.size());
      const double r = num / s;
      if (r <= kRatioModelFloor || r >= kRatioModelCeil)
        return Eigen::VectorXd::Zero(x.size());
      Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
      for (Eigen::Index i = 0; i < n; ++i)
        g += ks[i] * (values_[i] - r) * inv_h2 *
             (support_.row(i).transpose() - x);
      return g / s;
    }
    case Kind::Discriminator: {
      const double c = logit_->forward(x)[0];
      if (c <= std::log(kRatioModelFloor) || c >= std::log(kRatioModelCeil))
        return Eigen::VectorXd::Zero(x.size());
      Eigen::VectorXd scratch = Eigen::VectorXd::Zero(logit_->param_count());
      Eigen::VectorXd d(1);
      d[0] = std::exp(c);  // d exp(C) / dC
      return logit_->backward(x, d, scratch);
    }
    case Kind::Analytic: {
      if (!fn_grad_)
        throw std::logic_error("dre: analytic ratio has no gradient callback");
      const double r = fn_(x);
      if (r <= kRatioModelFloor || r >= kRatioModelCeil)
        return Eigen::VectorXd::Zero(x.size());
      return fn_grad_(x);
    }
  }
  return Eigen::VectorXd::Zero(x.size());
}

const Eigen::VectorXd& RatioModel::values_at_support() const {
  if (kind_ != Kind::Mmd)
    throw std::logic_error("dre: support values only exist for the mmd kind");
  return values_;
}

const Eigen::MatrixXd& RatioModel::support_points() const {
  if (kind_ != Kind::Mmd)
    throw std::logic_error("dre: support points only exist for the mmd kind");
  return support_;
}

double mmd2_biased(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                   double bandwidth) {
  const double h = bandwidth > 0 ? bandwidth : median_heuristic(a, b);
  const RowMat kaa = gram(a, a, h);
  const RowMat kbb = gram(b, b, h);
  const RowMat kab = gram(a, b, h);
  return kaa.mean() + kbb.mean() - 2.0 * kab.mean();
}

}  // namespace bregmn
