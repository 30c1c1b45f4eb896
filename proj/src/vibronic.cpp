#include "sfi/vibronic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace sfi::vibronic {

CubicSpline build_spline(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size())
    throw std::invalid_argument("build_spline: need at least two samples");
  for (int i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1]))
      throw std::invalid_argument("build_spline: abscissae must increase strictly");

  CubicSpline s;
  s.x = x;
  s.y = y;
  s.m.assign(n, 0.0);
  if (n == 2) return s;  // linear

  // Tridiagonal system for natural-spline second derivatives.
  std::vector<double> diag(n - 2), rhs(n - 2), sub(n - 2);
  for (int i = 1; i < n - 1; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    diag[i - 1] = 2.0 * (h0 + h1);
    sub[i - 1] = h1;
    rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
  }
  for (int i = 1; i < n - 2; ++i) {
    const double h = x[i + 1] - x[i];
    const double w = h / diag[i - 1];
    diag[i] -= w * sub[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (int i = n - 3; i >= 0; --i) {
    const double upper = (i < n - 3) ? (x[i + 2] - x[i + 1]) * s.m[i + 2] : 0.0;
    s.m[i + 1] = (rhs[i] - upper) / diag[i];
  }
  return s;
}

double CubicSpline::operator()(double xq) const {
  if (xq <= x.front()) return y.front();
  if (xq >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  const int i = static_cast<int>(it - x.begin()) - 1;
  const double h = x[i + 1] - x[i];
  const double a = (x[i + 1] - xq) / h;
  const double b = (xq - x[i]) / h;
  return a * y[i] + b * y[i + 1] +
         ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
}

VibrationalState solve_vibrational(const PotentialCurve& curve, double reduced_mass,
                                   int nu, double r_min, double r_max, double step) {
  if (!(reduced_mass > 0.0))
    throw std::invalid_argument("solve_vibrational: reduced mass must be positive");
  if (nu < 0) throw std::invalid_argument("solve_vibrational: nu < 0");
  if (curve.R.size() < 4 || curve.R.size() != curve.V.size())
    throw std::invalid_argument("solve_vibrational: curve too short");
  if (curve.R.front() > r_min || curve.R.back() < r_max)
    throw std::invalid_argument("solve_vibrational: curve does not cover the grid");

  const auto spline = build_spline(curve.R, curve.V);
  const int n_pts = static_cast<int>(std::round((r_max - r_min) / step)) + 1;
  const int n = n_pts - 2;  // interior points, phi = 0 at the ends
  if (n < 10) throw std::invalid_argument("solve_vibrational: grid too coarse");

  Vector grid(n_pts), v(n_pts);
  for (int i = 0; i < n_pts; ++i) {
    grid[i] = r_min + i * step;
    v[i] = spline(grid[i]);
  }

  // The well must actually close within the grid.
  const double vmin = v.minCoeff();
  if (v[0] < vmin + 1e-6 || v[n_pts - 1] < vmin + 1e-6)
    throw std::invalid_argument("solve_vibrational: potential does not rise at the edges");

  // Numerov form: (-1/2mu) D2 phi + B V phi = E B phi with
  // B = I + (h^2/12) D2; keeps the three-point bandwidth but upgrades the
  // eigenvalue error to O(h^4).
  const double h2 = step * step;
  const double kin = -1.0 / (2.0 * reduced_mass * h2);
  Matrix A = Matrix::Zero(n, n), B = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double vi = v[i + 1];
    A(i, i) = -2.0 * kin + vi * (1.0 - 2.0 / 12.0);
    B(i, i) = 1.0 - 2.0 / 12.0;
    if (i + 1 < n) {
      A(i, i + 1) = kin + v[i + 2] / 12.0;
      A(i + 1, i) = kin + v[i + 1] / 12.0;
      B(i, i + 1) = 1.0 / 12.0;
      B(i + 1, i) = 1.0 / 12.0;
    }
  }
  // Symmetrize the off-diagonal potential weights; the asymmetry is
  // O(h^2 V') and would otherwise break the solver's symmetry contract.
  for (int i = 0; i + 1 < n; ++i) {
    const double off = 0.5 * (A(i, i + 1) + A(i + 1, i));
    A(i, i + 1) = A(i + 1, i) = off;
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(
      A, B, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solve_vibrational: eigensolve failed");
  if (nu >= n) throw std::invalid_argument("solve_vibrational: nu too large for grid");

  VibrationalState st;
  st.nu = nu;
  st.reduced_mass = reduced_mass;
  st.energy = es.eigenvalues()[nu];
  if (st.energy > std::min(v[0], v[n_pts - 1]))
    throw std::invalid_argument("solve_vibrational: requested level is not bound");

  st.grid = grid;
  Vector phi = Vector::Zero(n_pts);
  phi.segment(1, n) = es.eigenvectors().col(nu);
  // Normalize the density with the trapezoidal rule used downstream.
  Vector dens = phi.cwiseAbs2();
  double norm = 0.0;
  for (int i = 0; i + 1 < n_pts; ++i) norm += 0.5 * step * (dens[i] + dens[i + 1]);
  st.density = dens / norm;
  return st;
}

WeightedYieldCurve weight_yield(const std::vector<std::pair<double, double>>& samples,
                                const VibrationalState& state) {
  if (samples.size() < 4)
    throw std::invalid_argument("weight_yield: need at least four samples");
  std::vector<double> xs, ys;
  xs.reserve(samples.size());
  ys.reserve(samples.size());
  for (const auto& [R, Y] : samples) {
    if (!xs.empty() && R <= xs.back())
      throw std::invalid_argument("weight_yield: samples must be sorted in R");
    xs.push_back(R);
    ys.push_back(Y);
  }

  WeightedYieldCurve out;
  out.depletion_warning =
      std::any_of(ys.begin(), ys.end(), [](double y) { return y > 0.2; });

  const auto spline = build_spline(xs, ys);
  const int n = static_cast<int>(state.grid.size());
  out.R = state.grid;
  out.values.resize(n);
  for (int i = 0; i < n; ++i) out.values[i] = spline(state.grid[i]) * state.density[i];

  // Density mass in the constant-extrapolation region.
  const double step = state.grid[1] - state.grid[0];
  double outside = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double mid = 0.5 * (state.grid[i] + state.grid[i + 1]);
    if (mid < xs.front() || mid > xs.back())
      outside += 0.5 * step * (state.density[i] + state.density[i + 1]);
  }
  out.excluded_mass = outside;
  out.coverage_warning = outside > 0.01;
  return out;
}

double integrate_yield(const WeightedYieldCurve& curve) {
  const int n = static_cast<int>(curve.R.size());
  double sum = 0.0;
  for (int i = 0; i + 1 < n; ++i)
    sum += 0.5 * (curve.R[i + 1] - curve.R[i]) * (curve.values[i] + curve.values[i + 1]);
  return sum;
}

}  // namespace sfi::vibronic
