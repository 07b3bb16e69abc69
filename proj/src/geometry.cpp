#include "bregmn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bregmn/base_measure.hpp"

namespace bregmn {

namespace {

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("geometry: eigendecomposition failed");
  return es.eigenvectors() *
         es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

void require_gaussian(const Measure& m, const char* where) {
  if (m.kind() != Measure::Kind::Gaussian)
    throw std::invalid_argument(std::string("geometry: ") + where +
                                " requires gaussian measures");
}

// Empirical quantile at level u from sorted values, interpolating linearly
// between the plotting positions (i + 1/2) / n.
double quantile(const std::vector<double>& sorted, double u) {
  const auto n = static_cast<double>(sorted.size());
  const double pos = u * n - 0.5;
  if (pos <= 0) return sorted.front();
  if (pos >= n - 1) return sorted.back();
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

double mean_norm(const Measure& m, int n, Rng& rng) {
  const Eigen::MatrixXd x = m.sample(n, rng);
  return x.rowwise().norm().mean();
}

}  // namespace

double w2_gaussian(const Measure& p, const Measure& q) {
  require_gaussian(p, "w2_gaussian");
  require_gaussian(q, "w2_gaussian");
  const Eigen::MatrixXd root_q = sym_sqrt(q.cov());
  const Eigen::MatrixXd cross = sym_sqrt(root_q * p.cov() * root_q);
  const double d2 = (p.mean() - q.mean()).squaredNorm() +
                    (p.cov() + q.cov() - 2.0 * cross).trace();
  return std::sqrt(std::max(0.0, d2));
}

double w2_empirical_1d(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() < 1 || b.size() < 1)
    throw std::invalid_argument("geometry: empty sample set");
  std::vector<double> sa(a.data(), a.data() + a.size());
  std::vector<double> sb(b.data(), b.data() + b.size());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const std::size_t m = std::max(sa.size(), sb.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
    const double d = quantile(sa, u) - quantile(sb, u);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(m));
}

double entropy_gaussian(const Measure& p) {
  require_gaussian(p, "entropy_gaussian");
  Eigen::LLT<Eigen::MatrixXd> llt(p.cov());
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("geometry: covariance must be positive definite");
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < p.cov().rows(); ++i)
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  const double d = static_cast<double>(p.dim());
  return 0.5 * d * std::log(2.0 * std::numbers::pi * std::numbers::e) +
         0.5 * log_det;
}

Prop1Report verify_prop1(const Measure& p, const Measure& q, double sigma2,
                         int n_mc, Rng& rng) {
  require_gaussian(p, "verify_prop1");
  require_gaussian(q, "verify_prop1");
  if (!(sigma2 > 0))
    throw std::invalid_argument("geometry: sigma2 must be positive");
  if (n_mc < 10000)
    throw std::invalid_argument("geometry: n_mc must be at least 10^4");

  Prop1Report r;
  r.sigma2 = sigma2;

  const Measure m0 = symmetric_noisy_base(p, q, sigma2).mixture();

  if (p.dim() == 1) {
    const QuadratureGrid grid = grid_for({&p, &q, &m0}, 2048);
    const Eigen::MatrixXd pts = grid.points();
    const Eigen::VectorXd pv = p.density_batch(pts);
    const Eigen::VectorXd qv = q.density_batch(pts);
    const Eigen::VectorXd mv = m0.density_batch(pts);
    double kl_p = 0.0, kl_q = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      if (pv[k] > 0) kl_p += grid.w[i] * pv[k] * std::log(pv[k] / mv[k]);
      if (qv[k] > 0) kl_q += grid.w[i] * qv[k] * std::log(qv[k] / mv[k]);
    }
    r.lhs = std::abs(kl_p - kl_q);
    r.lhs_se = 0.0;
  } else {
    auto mc_kl = [&](const Measure& side) {
      const Eigen::MatrixXd x = side.sample(n_mc, rng);
      const Eigen::VectorXd num = side.density_batch(x);
      const Eigen::VectorXd den = m0.density_batch(x);
      double mean = 0.0, m2 = 0.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double v = std::log(num[i] / den[i]);
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
      }
      const double var = m2 / static_cast<double>(x.rows() - 1);
      return std::pair<double, double>(
          mean, std::sqrt(var / static_cast<double>(x.rows())));
    };
    const auto [kl_p, se_p] = mc_kl(p);
    const auto [kl_q, se_q] = mc_kl(q);
    r.lhs = std::abs(kl_p - kl_q);
    r.lhs_se = std::sqrt(se_p * se_p + se_q * se_q);
  }

  r.w2 = w2_gaussian(p, q);
  r.entropy_gap = std::abs(entropy_gaussian(q) - entropy_gaussian(p));
  r.e_norm_p = mean_norm(p, 100000, rng);
  r.e_norm_q = mean_norm(q, 100000, rng);
  r.c = 11.0 / (2.0 * sigma2) * (r.e_norm_p + r.e_norm_q);
  r.rhs = r.c * r.w2 + r.entropy_gap;
  r.slack = r.rhs - r.lhs;
  r.violated = r.lhs > r.rhs + 3.0 * r.lhs_se;
  return r;
}

}  // namespace bregmn
