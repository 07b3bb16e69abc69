#include "bregmn/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bregmn/simd/kernels.hpp"

namespace bregmn {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

void check_spd(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols())
    throw std::invalid_argument("measure: covariance must be square");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("measure: covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("measure: covariance must be positive definite");
}

bool is_diagonal(const Eigen::MatrixXd& m) {
  const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j)) > 1e-14 * scale) return false;
  return true;
}

}  // namespace

void Measure::init_gaussian() {
  check_spd(cov_);
  Eigen::LLT<Eigen::MatrixXd> llt(cov_);
  chol_ = llt.matrixL();
  cov_inv_ = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
  double log_det = 0.0;
  for (int i = 0; i < dim_; ++i) log_det += 2.0 * std::log(chol_(i, i));
  log_norm_ = -0.5 * dim_ * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;
}

Measure Measure::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  Measure m;
  m.kind_ = Kind::Gaussian;
  m.dim_ = static_cast<int>(mean.size());
  if (m.dim_ < 1) throw std::invalid_argument("measure: empty mean");
  if (cov.rows() != m.dim_)
    throw std::invalid_argument("measure: mean/cov dimension mismatch");
  m.mean_ = std::move(mean);
  m.cov_ = std::move(cov);
  m.init_gaussian();
  return m;
}

Measure Measure::gaussian_iso(Eigen::VectorXd mean, double var) {
  const int d = static_cast<int>(mean.size());
  if (!(var > 0)) throw std::invalid_argument("measure: variance must be positive");
  return gaussian(std::move(mean),
                  var * Eigen::MatrixXd::Identity(d, d));
}

Measure Measure::uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  Measure m;
  m.kind_ = Kind::UniformBox;
  m.dim_ = static_cast<int>(lo.size());
  if (m.dim_ < 1 || hi.size() != m.dim_)
    throw std::invalid_argument("measure: box lo/hi dimension mismatch");
  double vol = 1.0;
  for (int i = 0; i < m.dim_; ++i) {
    if (!(hi[i] > lo[i]))
      throw std::invalid_argument("measure: box must have positive volume");
    vol *= hi[i] - lo[i];
  }
  m.lo_ = std::move(lo);
  m.hi_ = std::move(hi);
  m.inv_vol_ = 1.0 / vol;
  return m;
}

Measure Measure::mixture(std::vector<double> weights,
                         std::vector<Measure> components) {
  Measure m;
  m.kind_ = Kind::Mixture;
  if (weights.empty() || weights.size() != components.size())
    throw std::invalid_argument("measure: mixture weights/components mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0) throw std::invalid_argument("measure: negative mixture weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("measure: mixture weights must sum to 1");
  m.dim_ = components.front().dim();
  for (const Measure& c : components)
    if (c.dim() != m.dim_)
      throw std::invalid_argument("measure: mixture component dim mismatch");
  m.weights_ = std::move(weights);
  m.components_ = std::move(components);
  return m;
}

Measure Measure::empirical(Eigen::MatrixXd samples) {
  Measure m;
  m.kind_ = Kind::Empirical;
  if (samples.rows() < 1)
    throw std::invalid_argument("measure: empirical table is empty");
  m.dim_ = static_cast<int>(samples.cols());
  m.samples_ = std::make_shared<const Eigen::MatrixXd>(std::move(samples));
  return m;
}

Measure Measure::flat(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  Measure m = uniform_box(std::move(lo), std::move(hi));
  m.kind_ = Kind::Flat;
  m.inv_vol_ = 1.0;  // density 1 on the box, deliberately unnormalized
  return m;
}

bool Measure::has_density() const {
  switch (kind_) {
    case Kind::Gaussian:
    case Kind::UniformBox:
    case Kind::Flat:
      return true;
    case Kind::Mixture:
      return std::all_of(components_.begin(), components_.end(),
                         [](const Measure& c) { return c.has_density(); });
    case Kind::Empirical:
      return false;
    case Kind::Convolved:
      return base_->has_density();
  }
  return false;
}

double Measure::density(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("measure: point dimension mismatch");
  switch (kind_) {
    case Kind::Gaussian: {
      const Eigen::VectorXd d = x - mean_;
      return std::exp(log_norm_ - 0.5 * d.dot(cov_inv_ * d));
    }
    case Kind::UniformBox:
    case Kind::Flat: {
      for (int i = 0; i < dim_; ++i)
        if (x[i] < lo_[i] || x[i] > hi_[i]) return 0.0;
      return inv_vol_;
    }
    case Kind::Mixture: {
      double acc = 0.0;
      for (std::size_t i = 0; i < weights_.size(); ++i)
        acc += weights_[i] * components_[i].density(x);
      return acc;
    }
    case Kind::Empirical:
      throw std::logic_error("measure: empirical measures have no density");
    case Kind::Convolved:
      return convolved_density(x);
  }
  return 0.0;
}

double Measure::convolved_density(const Eigen::VectorXd& x) const {
  if (!base_->has_density())
    throw std::logic_error("measure: convolved base has no density");

  if (base_->kind_ == Kind::UniformBox && noise_diagonal_) {
    // (Uniform * N) per axis: [Phi((hi-x)/s) - Phi((lo-x)/s)] / (hi - lo)
    double acc = 1.0;
    for (int a = 0; a < dim_; ++a) {
      const double s = noise_sigma_[a];
      const double t = (normal_cdf((base_->hi_[a] - x[a]) / s) -
                        normal_cdf((base_->lo_[a] - x[a]) / s)) /
                       (base_->hi_[a] - base_->lo_[a]);
      acc *= t;
    }
    return acc;
  }

  // Fallback: integrate base(y) * phi_noise(x - y) over the base support.
  Eigen::VectorXd lo, hi;
  base_->support_box(lo, hi);
  const Measure noise = Measure::gaussian(Eigen::VectorXd::Zero(dim_), noise_cov_);
  const int pts = dim_ == 1 ? 1025 : 129;
  std::vector<std::vector<double>> brk(dim_);
  for (int a = 0; a < dim_; ++a) brk[a] = base_->breakpoints(a);
  const QuadratureGrid g = QuadratureGrid::build(lo, hi, pts, brk);
  double acc = 0.0;
  Eigen::VectorXd y(dim_);
  for (std::size_t i = 0; i < g.size(); ++i) {
    y[0] = g.xs[i];
    if (dim_ == 2) y[1] = g.ys[i];
    acc += g.w[i] * base_->density(y) * noise.density(x - y);
  }
  return acc;
}

Eigen::VectorXd Measure::density_batch(const Eigen::MatrixXd& points) const {
  const Eigen::Index n = points.rows();
  if (points.cols() != dim_)
    throw std::invalid_argument("measure: point dimension mismatch");
  Eigen::VectorXd out(n);

  if (kind_ == Kind::Gaussian) {
    // Exponents in bulk, then one vectorized exp pass.
    std::vector<double> expo(static_cast<std::size_t>(n));
    if (dim_ == 1) {
      const double mu = mean_[0], a = cov_inv_(0, 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = points(i, 0) - mu;
        expo[static_cast<std::size_t>(i)] = log_norm_ - 0.5 * a * d * d;
      }
    } else if (dim_ == 2) {
      const double a = cov_inv_(0, 0), b = cov_inv_(0, 1), c = cov_inv_(1, 1);
      const double mx = mean_[0], my = mean_[1];
      for (Eigen::Index i = 0; i < n; ++i) {
        const double dx = points(i, 0) - mx, dy = points(i, 1) - my;
        expo[static_cast<std::size_t>(i)] =
            log_norm_ - 0.5 * (a * dx * dx + 2.0 * b * dx * dy + c * dy * dy);
      }
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd d = points.row(i).transpose() - mean_;
        expo[static_cast<std::size_t>(i)] = log_norm_ - 0.5 * d.dot(cov_inv_ * d);
      }
    }
    simd::active().vexp(expo.data(), out.data(), expo.size());
    return out;
  }

  if (kind_ == Kind::Mixture) {
    out.setZero();
    for (std::size_t c = 0; c < weights_.size(); ++c)
      out += weights_[c] * components_[c].density_batch(points);
    return out;
  }

  for (Eigen::Index i = 0; i < n; ++i)
    out[i] = density(points.row(i).transpose());
  return out;
}

Eigen::MatrixXd Measure::sample(int n, Rng& rng) const {
  if (n < 1) throw std::invalid_argument("measure: sample count must be positive");
  Eigen::MatrixXd out(n, dim_);
  switch (kind_) {
    case Kind::Gaussian: {
      std::normal_distribution<double> gauss(0.0, 1.0);
      Eigen::VectorXd z(dim_);
      for (int i = 0; i < n; ++i) {
        for (int a = 0; a < dim_; ++a) z[a] = gauss(rng);
        out.row(i) = (mean_ + chol_ * z).transpose();
      }
      return out;
    }
    case Kind::UniformBox: {
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < dim_; ++a) {
          std::uniform_real_distribution<double> u(lo_[a], hi_[a]);
          out(i, a) = u(rng);
        }
      return out;
    }
    case Kind::Mixture: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < n; ++i) {
        const double pick = u(rng);
        double acc = 0.0;
        std::size_t c = weights_.size() - 1;
        for (std::size_t k = 0; k < weights_.size(); ++k) {
          acc += weights_[k];
          if (pick <= acc) {
            c = k;
            break;
          }
        }
        out.row(i) = components_[c].sample(1, rng);
      }
      return out;
    }
    case Kind::Empirical: {
      std::uniform_int_distribution<Eigen::Index> idx(0, samples_->rows() - 1);
      for (int i = 0; i < n; ++i) out.row(i) = samples_->row(idx(rng));
      return out;
    }
    case Kind::Convolved: {
      out = base_->sample(n, rng);
      std::normal_distribution<double> gauss(0.0, 1.0);
      Eigen::VectorXd z(dim_);
      for (int i = 0; i < n; ++i) {
        for (int a = 0; a < dim_; ++a) z[a] = gauss(rng);
        out.row(i) += (noise_chol_ * z).transpose();
      }
      return out;
    }
    case Kind::Flat:
      throw std::logic_error("measure: flat measures cannot be sampled");
  }
  return out;
}

Measure Measure::convolve_gaussian(const Eigen::MatrixXd& cov) const {
  if (cov.rows() != dim_ || cov.cols() != dim_)
    throw std::invalid_argument("measure: noise covariance dim mismatch");
  check_spd(cov);

  switch (kind_) {
    case Kind::Gaussian:
      return gaussian(mean_, cov_ + cov);
    case Kind::Mixture: {
      std::vector<Measure> comps;
      comps.reserve(components_.size());
      for (const Measure& c : components_) comps.push_back(c.convolve_gaussian(cov));
      return mixture(weights_, std::move(comps));
    }
    case Kind::Convolved:
      return base_->convolve_gaussian(noise_cov_ + cov);
    case Kind::Flat:
      throw std::logic_error("measure: cannot convolve a flat measure");
    case Kind::UniformBox:
    case Kind::Empirical: {
      Measure m;
      m.kind_ = Kind::Convolved;
      m.dim_ = dim_;
      m.base_ = std::make_shared<const Measure>(*this);
      m.noise_cov_ = cov;
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      m.noise_chol_ = llt.matrixL();
      m.noise_diagonal_ = is_diagonal(cov);
      if (m.noise_diagonal_) {
        m.noise_sigma_.resize(dim_);
        for (int a = 0; a < dim_; ++a) m.noise_sigma_[a] = std::sqrt(cov(a, a));
      }
      return m;
    }
  }
  throw std::logic_error("measure: unreachable");
}

Measure Measure::convolve_gaussian_iso(double var) const {
  if (!(var > 0)) throw std::invalid_argument("measure: variance must be positive");
  return convolve_gaussian(var * Eigen::MatrixXd::Identity(dim_, dim_));
}

void Measure::support_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
  lo.resize(dim_);
  hi.resize(dim_);
  switch (kind_) {
    case Kind::Gaussian:
      for (int a = 0; a < dim_; ++a) {
        const double s = std::sqrt(cov_(a, a));
        lo[a] = mean_[a] - 6.0 * s;
        hi[a] = mean_[a] + 6.0 * s;
      }
      return;
    case Kind::UniformBox:
    case Kind::Flat:
      lo = lo_;
      hi = hi_;
      return;
    case Kind::Mixture: {
      components_.front().support_box(lo, hi);
      Eigen::VectorXd l2, h2;
      for (std::size_t c = 1; c < components_.size(); ++c) {
        components_[c].support_box(l2, h2);
        lo = lo.cwiseMin(l2);
        hi = hi.cwiseMax(h2);
      }
      return;
    }
    case Kind::Empirical:
      lo = samples_->colwise().minCoeff().transpose();
      hi = samples_->colwise().maxCoeff().transpose();
      return;
    case Kind::Convolved: {
      base_->support_box(lo, hi);
      for (int a = 0; a < dim_; ++a) {
        const double s = std::sqrt(noise_cov_(a, a));
        lo[a] -= 6.0 * s;
        hi[a] += 6.0 * s;
      }
      return;
    }
  }
}

std::vector<double> Measure::breakpoints(int axis) const {
  if (axis < 0 || axis >= dim_)
    throw std::invalid_argument("measure: axis out of range");
  switch (kind_) {
    case Kind::UniformBox:
    case Kind::Flat:
      return {lo_[axis], hi_[axis]};
    case Kind::Mixture: {
      std::vector<double> all;
      for (const Measure& c : components_) {
        auto b = c.breakpoints(axis);
        all.insert(all.end(), b.begin(), b.end());
      }
      return all;
    }
    default:
      return {};
  }
}

const Eigen::VectorXd& Measure::mean() const {
  if (kind_ != Kind::Gaussian)
    throw std::logic_error("measure: mean() requires a gaussian");
  return mean_;
}

const Eigen::MatrixXd& Measure::cov() const {
  if (kind_ != Kind::Gaussian)
    throw std::logic_error("measure: cov() requires a gaussian");
  return cov_;
}

const Eigen::MatrixXd& Measure::samples() const {
  if (kind_ != Kind::Empirical)
    throw std::logic_error("measure: samples() requires an empirical measure");
  return *samples_;
}

QuadratureGrid grid_for(const std::vector<const Measure*>& ms, int pts_per_axis) {
  if (ms.empty()) throw std::invalid_argument("grid_for: no measures");
  const int d = ms.front()->dim();
  Eigen::VectorXd lo, hi, l2, h2;
  ms.front()->support_box(lo, hi);
  for (std::size_t i = 1; i < ms.size(); ++i) {
    if (ms[i]->dim() != d)
      throw std::invalid_argument("grid_for: measure dimension mismatch");
    ms[i]->support_box(l2, h2);
    lo = lo.cwiseMin(l2);
    hi = hi.cwiseMax(h2);
  }
  if (pts_per_axis <= 0) pts_per_axis = d == 1 ? 1024 : 256;
  std::vector<std::vector<double>> brk(d);
  for (int a = 0; a < d; ++a)
    for (const Measure* m : ms) {
      auto b = m->breakpoints(a);
      brk[a].insert(brk[a].end(), b.begin(), b.end());
    }
  return QuadratureGrid::build(lo, hi, pts_per_axis, brk);
}

}  // namespace bregmn
