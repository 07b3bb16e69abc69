#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <vector>

namespace bregmn {

/// Composite-trapezoid quadrature grid over an axis-aligned box, dims 1-2.
///
/// Density discontinuities (uniform-box edges) are handled by inserting a
/// node pair straddling each breakpoint at distance delta ~ 1e-11, so box
/// indicators integrate exactly up to O(delta) instead of O(spacing).
struct QuadratureGrid {
  int dim = 0;
  std::array<std::vector<double>, 2> nodes;    // per axis, strictly increasing
  std::array<std::vector<double>, 2> weights;  // per axis trapezoid weights

  // Flattened tensor grid (row-major over axis 0 then axis 1). ys is empty
  // in 1D. w holds the product weights.
  std::vector<double> xs, ys, w;

  std::size_t size() const { return w.size(); }

  Eigen::VectorXd lo() const;
  Eigen::VectorXd hi() const;

  /// Grid points as an n x dim matrix (rows are points).
  Eigen::MatrixXd points() const;

  /// pts_per_axis >= 64. breakpoints may be empty; entries outside (lo, hi)
  /// are ignored.
  static QuadratureGrid build(
      const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int pts_per_axis,
      const std::vector<std::vector<double>>& breakpoints = {});
};

}  // namespace bregmn
