#include "bregmn/divergence.hpp"

#include <vector>

#include "bregmn/simd/kernels.hpp"

namespace bregmn {

namespace {

void check_dims(const QuadratureGrid& grid, std::initializer_list<const Measure*> ms) {
  for (const Measure* m : ms)
    if (m->dim() != grid.dim)
      throw std::invalid_argument("divergence: grid/measure dimension mismatch");
}

}  // namespace

double bregman_term(const ConvexGenerator& f, double rp, double rq) {
  rp = clamp_ratio(rp);
  rq = clamp_ratio(rq);
  return f.f(rp) - f.f(rq) - f.df(rq) * (rp - rq);
}

double separable_bregman(const ConvexGenerator& f, const Measure& P,
                         const Measure& Q, const QuadratureGrid& grid) {
  check_dims(grid, {&P, &Q});
  const Eigen::MatrixXd pts = grid.points();
  const Eigen::VectorXd pv = P.density_batch(pts);
  const Eigen::VectorXd qv = Q.density_batch(pts);
  const std::size_t n = grid.size();

  std::vector<double> a(n), b(n), fa(n), fb(n), dfb(n), integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = clamp_ratio(pv[static_cast<Eigen::Index>(i)]);
    b[i] = clamp_ratio(qv[static_cast<Eigen::Index>(i)]);
  }
  f.f_batch(a.data(), fa.data(), n);
  f.f_batch(b.data(), fb.data(), n);
  f.df_batch(b.data(), dfb.data(), n);
  for (std::size_t i = 0; i < n; ++i)
    integrand[i] = fa[i] - fb[i] - dfb[i] * (a[i] - b[i]);
  return simd::active().dot(grid.w.data(), integrand.data(), n);
}

double f_divergence(const ConvexGenerator& f, const Measure& P,
                    const Measure& Q, const QuadratureGrid& grid) {
  check_dims(grid, {&P, &Q});
  const Eigen::MatrixXd pts = grid.points();
  const Eigen::VectorXd pv = P.density_batch(pts);
  const Eigen::VectorXd qv = Q.density_batch(pts);
  const std::size_t n = grid.size();

  std::vector<double> t(n), ft(n), integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = qv[static_cast<Eigen::Index>(i)];
    t[i] = q > 0 ? clamp_ratio(pv[static_cast<Eigen::Index>(i)] / q) : 1.0;
  }
  f.f_batch(t.data(), ft.data(), n);
  for (std::size_t i = 0; i < n; ++i)
    integrand[i] = qv[static_cast<Eigen::Index>(i)] * ft[i];
  return simd::active().dot(grid.w.data(), integrand.data(), n);
}

double scaled_bregman(const ConvexGenerator& f, const Measure& P,
                      const Measure& Q, const Measure& M,
                      const QuadratureGrid& grid) {
  check_dims(grid, {&P, &Q, &M});
  const Eigen::MatrixXd pts = grid.points();
  const Eigen::VectorXd pv = P.density_batch(pts);
  const Eigen::VectorXd qv = Q.density_batch(pts);
  const Eigen::VectorXd mv = M.density_batch(pts);
  const std::size_t n = grid.size();

  std::vector<double> rp(n), rq(n), frp(n), frq(n), dfrq(n), mass(n),
      integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double m = mv[k];
    if (m < kRatioFloor) {
      if (pv[k] > 1e-6 || qv[k] > 1e-6)
        throw IllPosedBaseMeasure(
            "ill-posed base measure: zero base density at a node carrying "
            "p or q mass (node " +
            std::to_string(i) + ")");
      rp[i] = rq[i] = 1.0;
      mass[i] = 0.0;
      continue;
    }
    rp[i] = clamp_ratio(pv[k] / m);
    rq[i] = clamp_ratio(qv[k] / m);
    mass[i] = m;
  }
  f.f_batch(rp.data(), frp.data(), n);
  f.f_batch(rq.data(), frq.data(), n);
  f.df_batch(rq.data(), dfrq.data(), n);
  for (std::size_t i = 0; i < n; ++i)
    integrand[i] = mass[i] * (frp[i] - frq[i] - dfrq[i] * (rp[i] - rq[i]));
  return simd::active().dot(grid.w.data(), integrand.data(), n);
}

}  // namespace bregmn
