#include "bregmn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bregmn {

namespace {

std::vector<double> axis_nodes(double lo, double hi, int n,
                               const std::vector<double>& brk) {
  if (!(hi > lo)) throw std::invalid_argument("grid: hi must exceed lo");
  if (n < 64) throw std::invalid_argument("grid: need at least 64 points per axis");

  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n) + 2 * brk.size());
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) xs.push_back(lo + h * i);
  xs.back() = hi;

  for (double b : brk) {
    if (!(b > lo && b < hi)) continue;
    const double delta = std::max(1e-11, 8.0 * 2.22e-16 * std::abs(b));
    xs.push_back(b - delta);
    xs.push_back(b + delta);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<double> trapezoid_weights(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<double> w(n, 0.0);
  if (n < 2) throw std::invalid_argument("grid: degenerate axis");
  w[0] = 0.5 * (xs[1] - xs[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (xs[i + 1] - xs[i - 1]);
  w[n - 1] = 0.5 * (xs[n - 1] - xs[n - 2]);
  return w;
}

}  // namespace

Eigen::VectorXd QuadratureGrid::lo() const {
  Eigen::VectorXd v(dim);
  for (int a = 0; a < dim; ++a) v[a] = nodes[a].front();
  return v;
}

Eigen::VectorXd QuadratureGrid::hi() const {
  Eigen::VectorXd v(dim);
  for (int a = 0; a < dim; ++a) v[a] = nodes[a].back();
  return v;
}

Eigen::MatrixXd QuadratureGrid::points() const {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(size()), dim);
  for (std::size_t i = 0; i < size(); ++i) {
    pts(static_cast<Eigen::Index>(i), 0) = xs[i];
    if (dim == 2) pts(static_cast<Eigen::Index>(i), 1) = ys[i];
  }
  return pts;
}

QuadratureGrid QuadratureGrid::build(
    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int pts_per_axis,
    const std::vector<std::vector<double>>& breakpoints) {
  const int d = static_cast<int>(lo.size());
  if (d < 1 || d > 2) throw std::invalid_argument("grid: dim must be 1 or 2");
  if (hi.size() != d) throw std::invalid_argument("grid: lo/hi dim mismatch");

  QuadratureGrid g;
  g.dim = d;
  for (int a = 0; a < d; ++a) {
    const std::vector<double> brk =
        a < static_cast<int>(breakpoints.size()) ? breakpoints[a]
                                                 : std::vector<double>{};
    g.nodes[a] = axis_nodes(lo[a], hi[a], pts_per_axis, brk);
    g.weights[a] = trapezoid_weights(g.nodes[a]);
  }

  if (d == 1) {
    g.xs = g.nodes[0];
    g.w = g.weights[0];
  } else {
    const std::size_t n0 = g.nodes[0].size(), n1 = g.nodes[1].size();
    g.xs.resize(n0 * n1);
    g.ys.resize(n0 * n1);
    g.w.resize(n0 * n1);
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t j = 0; j < n1; ++j) {
        const std::size_t k = i * n1 + j;
        g.xs[k] = g.nodes[0][i];
        g.ys[k] = g.nodes[1][j];
        g.w[k] = g.weights[0][i] * g.weights[1][j];
      }
  }
  return g;
}

}  // namespace bregmn
