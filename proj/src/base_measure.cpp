#include "bregmn/base_measure.hpp"

#include <cmath>
#include <stdexcept>

#include "bregmn/divergence.hpp"
#include "bregmn/generator.hpp"

namespace bregmn {

namespace {

double checked_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("base: alpha must lie in [0,1]");
  return alpha;
}

}  // namespace

NoisyBase::NoisyBase(Measure p, Measure q, double alpha, Eigen::MatrixXd cov1,
                     Eigen::MatrixXd cov2)
    : alpha_(checked_alpha(alpha)),
      cov1_(std::move(cov1)),
      cov2_(std::move(cov2)),
      p_(std::move(p)),
      q_(std::move(q)),
      noisy_p_(p_.convolve_gaussian(cov1_)),
      noisy_q_(q_.convolve_gaussian(cov2_)),
      mix_(Measure::mixture({alpha, 1.0 - alpha}, {noisy_p_, noisy_q_})),
      analytic_(mix_.has_density()) {}

double NoisyBase::density(const Eigen::VectorXd& x) const {
  if (!analytic_)
    throw std::logic_error(
        "base: density access requires analytic P and Q branches");
  return mix_.density(x);
}

Eigen::VectorXd NoisyBase::density_batch(const Eigen::MatrixXd& points) const {
  if (!analytic_)
    throw std::logic_error(
        "base: density access requires analytic P and Q branches");
  return mix_.density_batch(points);
}

Eigen::MatrixXd NoisyBase::sample(int n, Rng& rng) const {
  return mix_.sample(n, rng);
}

NoisyBase build_noisy_base(const Measure& p, const Measure& q, double alpha,
                           const Eigen::MatrixXd& cov1,
                           const Eigen::MatrixXd& cov2) {
  if (p.dim() != q.dim())
    throw std::invalid_argument("base: P and Q dimensions differ");
  return NoisyBase(p, q, alpha, cov1, cov2);
}

NoisyBase build_noisy_base_iso(const Measure& p, const Measure& q,
                               double alpha, double var1, double var2) {
  const int d = p.dim();
  return build_noisy_base(p, q, alpha,
                          var1 * Eigen::MatrixXd::Identity(d, d),
                          var2 * Eigen::MatrixXd::Identity(d, d));
}

NoisyBase symmetric_noisy_base(const Measure& p, const Measure& q,
                               double sigma2) {
  return build_noisy_base_iso(p, q, 0.5, sigma2, sigma2);
}

namespace {

// Shared grid covering P, every swept Q_(theta +- h), and the noise skirts,
// with every box edge registered as a breakpoint. One grid for the whole
// sweep keeps the centered differences free of discretization jitter.
QuadratureGrid sweep_grid(const Measure& p,
                          const std::function<Measure(double)>& family,
                          const std::vector<double>& thetas, double h,
                          double pad) {
  Eigen::VectorXd lo, hi, l2, h2;
  p.support_box(lo, hi);
  std::vector<std::vector<double>> brk(p.dim());
  for (int a = 0; a < p.dim(); ++a) brk[a] = p.breakpoints(a);

  auto absorb = [&](const Measure& m) {
    m.support_box(l2, h2);
    lo = lo.cwiseMin(l2);
    hi = hi.cwiseMax(h2);
    for (int a = 0; a < p.dim(); ++a) {
      auto b = m.breakpoints(a);
      brk[a].insert(brk[a].end(), b.begin(), b.end());
    }
  };
  for (double t : thetas) {
    for (double s : {-h, 0.0, h}) absorb(family(t + s));
  }
  lo.array() -= pad;
  hi.array() += pad;
  const int pts = p.dim() == 1 ? 1024 : 256;
  return QuadratureGrid::build(lo, hi, pts, brk);
}

double shift_width(const Measure& q) {
  if (q.kind() != Measure::Kind::UniformBox)
    throw std::invalid_argument(
        "base: pipeline signal sweep expects a uniform-box family");
  Eigen::VectorXd lo, hi;
  q.support_box(lo, hi);
  return hi[0] - lo[0];
}

}  // namespace

std::vector<SignalRow> support_signal_check(
    const Measure& p, const std::function<Measure(double)>& family,
    const std::vector<double>& thetas, const ConvexGenerator& f,
    const PipelineConfig& cfg, SignalSource source, std::uint64_t seed,
    double fd_step) {
  if (thetas.empty()) return {};
  if (!(fd_step > 0))
    throw std::invalid_argument("base: fd_step must be positive");

  const ConvexGenerator& js = ConvexGenerator::by_name("js");
  const double pad = 6.0 * std::sqrt(std::max(cfg.sigma2_p, cfg.sigma2_q));
  const QuadratureGrid grid = sweep_grid(p, family, thetas, fd_step, pad);

  std::vector<SignalRow> rows;
  rows.reserve(thetas.size());
  for (double theta : thetas) {
    SignalRow row;
    row.theta = theta;

    const Measure q_plus = family(theta + fd_step);
    const Measure q_minus = family(theta - fd_step);
    row.js_grad = std::abs(f_divergence(js, p, q_plus, grid) -
                           f_divergence(js, p, q_minus, grid)) /
                  (2.0 * fd_step);

    if (source == SignalSource::Quadrature) {
      auto breg_at = [&](const Measure& q) {
        const NoisyBase base =
            build_noisy_base_iso(p, q, cfg.alpha, cfg.sigma2_p, cfg.sigma2_q);
        return scaled_bregman(f, base.noisy_p(), base.noisy_q(),
                              base.mixture(), grid);
      };
      row.breg_grad =
          std::abs(breg_at(q_plus) - breg_at(q_minus)) / (2.0 * fd_step);
      row.breg_value = breg_at(family(theta));
    } else {
      GeneratorModel gen =
          GeneratorModel::uniform_shift(theta, shift_width(family(theta)));
      PipelineConfig c = cfg;
      c.fd_step = fd_step;
      double value = 0.0;
      const Eigen::VectorXd g =
          estimate_gradient(f, gen, p, c, seed, nullptr, &value);
      row.breg_grad = std::abs(g[0]);
      row.breg_value = value;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bregmn
