#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sfi/types.hpp"

//! B-spline basis on a breakpoint grid, per-interval Gauss-Legendre
//! quadrature and Galerkin matrix assembly. Everything downstream
//! (radial atoms, two-centre orbitals) is built on top of this.

namespace sfi::bspline {

//! Open knot vector of order k (polynomial degree k-1). The endpoint
//! breakpoints are repeated k times so that exactly n_splines splines
//! live on [x_min, x_max]. Interval widths may start as a geometric
//! progression (factor `progression` for the first `geometric_count`
//! intervals) and stay constant at the width reached afterwards; this
//! concentrates resolution near the left edge where potentials are deep.
struct KnotSequence {
  std::vector<double> knots;  // size n_splines + order, nondecreasing
  int order = 0;
  int geometric_count = 0;
  double progression = 1.0;

  int num_splines() const { return static_cast<int>(knots.size()) - order; }
  int num_intervals() const { return num_splines() - order + 1; }
  double x_min() const { return knots.front(); }
  double x_max() const { return knots.back(); }

  //! Distinct breakpoints, endpoints included.
  std::vector<double> breakpoints() const;
};

KnotSequence build_knots(int n_splines, int order, double x_min, double x_max,
                         int geometric_count = 0, double progression = 1.0);

//! A knot sequence together with the boundary-condition bookkeeping.
//! drop_first / drop_last remove the single spline with nonzero value at
//! the corresponding endpoint (Dirichlet zero). Indices reported by
//! evaluation routines refer to the *kept* splines, 0-based.
struct BSplineBasis {
  KnotSequence knots;
  bool drop_first = false;
  bool drop_last = false;

  int size() const {
    return knots.num_splines() - (drop_first ? 1 : 0) - (drop_last ? 1 : 0);
  }
  int order() const { return knots.order; }
  double x_min() const { return knots.x_min(); }
  double x_max() const { return knots.x_max(); }
};

BSplineBasis make_basis(int n_splines, int order, double x_min, double x_max,
                        int geometric_count = 0, double progression = 1.0,
                        bool drop_first = false, bool drop_last = false);

//! Values of the <= order splines that are nonzero at x, as
//! (kept-index, value) pairs. Splines removed by the boundary flags are
//! skipped. x must lie in [x_min, x_max].
std::vector<std::pair<int, double>> eval_splines(const BSplineBasis& basis, double x);

//! Values and derivatives of the nonzero splines at x.
//! ders(d, j) = d-th derivative of the spline with kept-index first + j;
//! columns corresponding to dropped splines are removed, so the column
//! count can be order-1 at the edges.
struct LocalSplines {
  int first = 0;           // kept-index of the first column
  Eigen::MatrixXd ders;    // (n_deriv + 1) x (number of local splines)
};
LocalSplines eval_splines_deriv(const BSplineBasis& basis, double x, int n_deriv);

//! Per-interval Gauss-Legendre rule over the breakpoints of a basis.
//! Row i of `nodes`/`weights` covers breakpoint interval i.
struct QuadratureRule {
  std::vector<double> breaks;
  Matrix nodes;    // n_intervals x points_per_interval
  Matrix weights;  // same shape
  int points_per_interval() const { return static_cast<int>(nodes.cols()); }
};

//! points_per_interval defaults to the spline order, which integrates
//! products of two splines times a linear weight exactly.
QuadratureRule gauss_rule(const BSplineBasis& basis, int points_per_interval = 0);

//! Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

//! Galerkin matrix  M_ij = int w(x) B_i^(da)(x) B_j^(db)(x) dx  over the
//! kept splines. Symmetric banded (half bandwidth order-1) when da == db.
Matrix assemble_matrix(const BSplineBasis& basis, const QuadratureRule& rule,
                       const std::function<double(double)>& weight,
                       int deriv_bra = 0, int deriv_ket = 0);

}  // namespace sfi::bspline
