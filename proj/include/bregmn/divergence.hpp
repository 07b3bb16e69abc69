#pragma once

#include <stdexcept>
#include <string>

#include "bregmn/convex.hpp"
#include "bregmn/grid.hpp"
#include "bregmn/measure.hpp"

namespace bregmn {

// Density ratios are clamped to [kRatioFloor, kRatioCeil] before any generator
// is applied; the log-based generators blow up on exact zeros otherwise.
inline constexpr double kRatioFloor = 1e-12;
inline constexpr double kRatioCeil = 1e12;

// Thrown when a base measure has (numerically) zero density on a region that
// still carries P or Q mass: the ratios p/m, q/m are meaningless there.
class IllPosedBaseMeasure : public std::runtime_error {
 public:
  explicit IllPosedBaseMeasure(const std::string& what)
      : std::runtime_error(what) {}
};

inline double clamp_ratio(double t) {
  if (t < kRatioFloor) return kRatioFloor;
  if (t > kRatioCeil) return kRatioCeil;
  return t;
}

// Pointwise Bregman increment f(rp) - f(rq) - f'(rq) (rp - rq) on clamped
// ratios. Nonnegative for convex f.
double bregman_term(const ConvexGenerator& f, double rp, double rq);

// Trapezoid quadrature of f(p) - f(q) - f'(q)(p - q) over the grid.
double separable_bregman(const ConvexGenerator& f, const Measure& P,
                         const Measure& Q, const QuadratureGrid& grid);

// Trapezoid quadrature of q f(p/q). Nodes with q = 0 contribute zero, so on
// disjoint supports this evaluates the usual saturated f-divergence value.
double f_divergence(const ConvexGenerator& f, const Measure& P,
                    const Measure& Q, const QuadratureGrid& grid);

// Trapezoid quadrature of [f(p/m) - f(q/m) - f'(q/m)(p/m - q/m)] m.
// Nodes where m vanishes are skipped when p and q are also negligible there;
// otherwise IllPosedBaseMeasure is thrown.
double scaled_bregman(const ConvexGenerator& f, const Measure& P,
                      const Measure& Q, const Measure& M,
                      const QuadratureGrid& grid);

}  // namespace bregmn
