#include "sfi/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sfi::bspline {

std::vector<double> KnotSequence::breakpoints() const {
  std::vector<double> out;
  out.reserve(num_intervals() + 1);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (out.empty() || knots[i] > out.back()) out.push_back(knots[i]);
  }
  return out;
}

KnotSequence build_knots(int n_splines, int order, double x_min, double x_max,
                         int geometric_count, double progression) {
  if (order < 1) throw std::invalid_argument("build_knots: order must be >= 1");
  if (n_splines < order)
    throw std::invalid_argument("build_knots: need at least `order` splines");
  if (!(x_max > x_min)) throw std::invalid_argument("build_knots: x_max <= x_min");
  if (progression < 1.0)
    throw std::invalid_argument("build_knots: progression must be >= 1");

  const int n_int = n_splines - order + 1;
  if (geometric_count < 0 || geometric_count > n_int)
    throw std::invalid_argument("build_knots: geometric_count out of range");

  // Interval widths: d, d*g, ..., d*g^(m-1), then constant at the width
  // reached. Solve the total span for the first width d.
  const int m = geometric_count;
  const double g = progression;
  const double span = x_max - x_min;
  double d;
  if (m < 2 || g == 1.0) {
    d = span / n_int;
  } else {
    const double geo_sum = (std::pow(g, m) - 1.0) / (g - 1.0);
    const double tail = (n_int - m) * std::pow(g, m - 1);
    d = span / (geo_sum + tail);
  }

  KnotSequence ks;
  ks.order = order;
  ks.geometric_count = m;
  ks.progression = g;
  ks.knots.reserve(n_splines + order);

  for (int i = 0; i < order; ++i) ks.knots.push_back(x_min);
  double x = x_min;
  double w = d;
  for (int i = 0; i < n_int - 1; ++i) {
    x += w;
    ks.knots.push_back(x);
    if (m >= 2 && i + 1 < m) w *= g;
  }
  for (int i = 0; i < order; ++i) ks.knots.push_back(x_max);
  return ks;
}

BSplineBasis make_basis(int n_splines, int order, double x_min, double x_max,
                        int geometric_count, double progression,
                        bool drop_first, bool drop_last) {
  BSplineBasis b;
  b.knots = build_knots(n_splines, order, x_min, x_max, geometric_count, progression);
  b.drop_first = drop_first;
  b.drop_last = drop_last;
  return b;
}

namespace {

// Index i of the knot span with knots[i] <= x < knots[i+1]; x == x_max maps
// to the last nonempty span.
int find_span(const KnotSequence& ks, double x) {
  const auto& t = ks.knots;
  const int p = ks.order - 1;
  const int n = ks.num_splines();
  if (x >= t[n]) return n - 1;  // right edge
  if (x <= t[p]) return p;
  auto it = std::upper_bound(t.begin() + p, t.begin() + n + 1, x);
  return static_cast<int>(it - t.begin()) - 1;
}

// Values of the `order` splines nonzero on the span of x (Cox-de Boor).
void basis_funs(const KnotSequence& ks, int span, double x, double* N) {
  const int p = ks.order - 1;
  const auto& t = ks.knots;
  double left[64], right[64];
  N[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    N[j] = saved;
  }
}

// Values and derivatives of the nonzero splines at x; ders is
// (n_deriv+1) x order. Standard triangular-table algorithm.
void basis_funs_deriv(const KnotSequence& ks, int span, double x, int n_deriv,
                      Eigen::MatrixXd& ders) {
  const int p = ks.order - 1;
  const auto& t = ks.knots;
  Eigen::MatrixXd ndu(p + 1, p + 1);
  double left[64], right[64];
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double tmp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    ndu(j, j) = saved;
  }

  ders.setZero(n_deriv + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= n_deriv && k <= p; ++k) {
      double dd = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        dd = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        dd += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        dd += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = dd;
      std::swap(s1, s2);
    }
  }
  double fac = p;
  for (int k = 1; k <= n_deriv && k <= p; ++k) {
    for (int j = 0; j <= p; ++j) ders(k, j) *= fac;
    fac *= (p - k);
  }
}

void check_range(const BSplineBasis& basis, double x, const char* who) {
  if (x < basis.x_min() || x > basis.x_max())
    throw std::domain_error(std::string(who) + ": x outside basis range");
}

}  // namespace

std::vector<std::pair<int, double>> eval_splines(const BSplineBasis& basis, double x) {
  check_range(basis, x, "eval_splines");
  const auto& ks = basis.knots;
  const int k = ks.order;
  if (k > 60) throw std::invalid_argument("eval_splines: order too large");
  const int span = find_span(ks, x);
  double N[64];
  basis_funs(ks, span, x, N);

  std::vector<std::pair<int, double>> out;
  out.reserve(k);
  const int shift = basis.drop_first ? 1 : 0;
  const int last_kept = basis.size() - 1;
  for (int j = 0; j < k; ++j) {
    const int full = span - k + 1 + j;
    const int kept = full - shift;
    if (kept < 0 || kept > last_kept) continue;
    out.emplace_back(kept, N[j]);
  }
  return out;
}

LocalSplines eval_splines_deriv(const BSplineBasis& basis, double x, int n_deriv) {
  check_range(basis, x, "eval_splines_deriv");
  const auto& ks = basis.knots;
  const int k = ks.order;
  if (k > 60) throw std::invalid_argument("eval_splines_deriv: order too large");
  if (n_deriv < 0) throw std::invalid_argument("eval_splines_deriv: n_deriv < 0");
  const int span = find_span(ks, x);
  Eigen::MatrixXd ders;
  basis_funs_deriv(ks, span, x, n_deriv, ders);

  const int shift = basis.drop_first ? 1 : 0;
  const int last_kept = basis.size() - 1;
  int first_col = 0;
  while (first_col < k && (span - k + 1 + first_col) - shift < 0) ++first_col;
  int last_col = k - 1;
  while (last_col >= 0 && (span - k + 1 + last_col) - shift > last_kept) --last_col;

  LocalSplines loc;
  loc.first = (span - k + 1 + first_col) - shift;
  loc.ders = ders.middleCols(first_col, last_col - first_col + 1);
  return loc;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

QuadratureRule gauss_rule(const BSplineBasis& basis, int points_per_interval) {
  int p = points_per_interval > 0 ? points_per_interval : basis.order();
  QuadratureRule rule;
  rule.breaks = basis.knots.breakpoints();
  const int n_int = static_cast<int>(rule.breaks.size()) - 1;
  rule.nodes.resize(n_int, p);
  rule.weights.resize(n_int, p);

  std::vector<double> x, w;
  gauss_legendre(p, x, w);
  for (int i = 0; i < n_int; ++i) {
    const double a = rule.breaks[i];
    const double b = rule.breaks[i + 1];
    const double mid = 0.5 * (a + b);
    const double hal = 0.5 * (b - a);
    for (int q = 0; q < p; ++q) {
      rule.nodes(i, q) = mid + hal * x[q];
      rule.weights(i, q) = hal * w[q];
    }
  }
  return rule;
}

Matrix assemble_matrix(const BSplineBasis& basis, const QuadratureRule& rule,
                       const std::function<double(double)>& weight,
                       int deriv_bra, int deriv_ket) {
  const int n = basis.size();
  const int nd = std::max(deriv_bra, deriv_ket);
  Matrix M = Matrix::Zero(n, n);

  const int n_int = static_cast<int>(rule.nodes.rows());
  const int p = rule.points_per_interval();
  for (int i = 0; i < n_int; ++i) {
    for (int q = 0; q < p; ++q) {
      const double x = rule.nodes(i, q);
      const double wq = rule.weights(i, q) * weight(x);
      if (wq == 0.0) continue;
      const LocalSplines loc = eval_splines_deriv(basis, x, nd);
      const int nloc = static_cast<int>(loc.ders.cols());
      for (int a = 0; a < nloc; ++a) {
        const double va = loc.ders(deriv_bra, a) * wq;
        if (va == 0.0) continue;
        for (int b = 0; b < nloc; ++b) {
          M(loc.first + a, loc.first + b) += va * loc.ders(deriv_ket, b);
        }
      }
    }
  }
  return M;
}

}  // namespace sfi::bspline
