#include "sfi/model_atom.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace sfi::model_atom {

double potential_value(const ModelPotentialSpec& spec, double r) {
  if (r <= 0.0) throw std::domain_error("potential_value: r must be positive");
  const double a = spec.alpha;
  if (a == 0.0) return -1.0 / r;
  const double s = a > 0.0 ? 1.0 : -1.0;
  return -(1.0 + s * std::exp(-2.0 * r / std::sqrt(std::abs(a)))) / r;
}

RadialEigenbasis solve_radial(const ModelPotentialSpec& spec, int ell,
                              const bspline::BSplineBasis& basis) {
  if (ell < 0) throw std::invalid_argument("solve_radial: ell < 0");
  if (!basis.drop_first || !basis.drop_last)
    throw std::invalid_argument("solve_radial: basis must impose u(0) = u(box) = 0");

  // A couple of extra points per interval: the integrands carry 1/r and
  // 1/r^2 factors that are not polynomial.
  const auto rule = bspline::gauss_rule(basis, basis.order() + 2);

  const double lfac = 0.5 * ell * (ell + 1);
  const Matrix kin = assemble_matrix(
      basis, rule, [](double) { return 0.5; }, 1, 1);
  const Matrix pot = assemble_matrix(basis, rule, [&](double r) {
    return lfac / (r * r) + potential_value(spec, r);
  });
  const Matrix S = assemble_matrix(basis, rule, [](double) { return 1.0; });

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(kin + pot, S,
                                                      Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solve_radial: generalized eigensolve failed (singular overlap?)");

  RadialEigenbasis out;
  out.ell = ell;
  out.energies = es.eigenvalues();
  out.coefficients = es.eigenvectors();
  out.basis = basis;
  return out;
}

bspline::BSplineBasis default_basis(double box, int n_splines, int order) {
  return bspline::make_basis(n_splines, order, 0.0, box, 40, 1.06, true, true);
}

bspline::BSplineBasis calibration_basis() {
  return bspline::make_basis(160, 8, 0.0, 40.0, 40, 1.07, true, true);
}

double ground_ip(double alpha, const bspline::BSplineBasis& basis) {
  ModelPotentialSpec spec{alpha};
  const auto eb = solve_radial(spec, 0, basis);
  return -eb.energies[0];
}

double alpha_from_ip(double ip) { return alpha_from_ip(ip, calibration_basis()); }

double alpha_from_ip(double ip, const bspline::BSplineBasis& basis) {
  if (!(ip > 0.0)) throw std::invalid_argument("alpha_from_ip: ip must be positive");

  double lo = -5.0, hi = 20.0;
  // f(alpha) = Ip(alpha) - ip is increasing in alpha.
  double flo = ground_ip(lo, basis) - ip;
  double fhi = ground_ip(hi, basis) - ip;
  if (flo > 0.0 || fhi < 0.0)
    throw std::domain_error("alpha_from_ip: requested ip not bracketed by alpha in [-5, 20]");

  // Bisect until the bracket is small, then let secant finish. Keep the
  // bracket as a safety net for the secant iterates.
  double a = lo, b = hi, fa = flo, fb = fhi;
  for (int it = 0; it < 80; ++it) {
    double mid;
    const bool nearly = std::abs(b - a) < 1e-2;
    if (nearly && fb != fa) {
      mid = b - fb * (b - a) / (fb - fa);
      if (!(mid > a && mid < b)) mid = 0.5 * (a + b);
    } else {
      mid = 0.5 * (a + b);
    }
    const double fm = ground_ip(mid, basis) - ip;
    if (std::abs(fm) < 1e-10) return mid;
    if (fm < 0.0) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
      fb = fm;
    }
    if (std::abs(b - a) < 1e-13 * std::max(1.0, std::abs(b))) break;
  }
  return 0.5 * (a + b);
}

AlphaCurve build_alpha_curve(const std::vector<std::pair<double, double>>& ip_table) {
  AlphaCurve curve;
  const auto basis = calibration_basis();
  for (const auto& [R, ip] : ip_table) {
    if (!(ip > 0.0))
      throw std::invalid_argument("build_alpha_curve: nonpositive Ip in table");
    curve.R.push_back(R);
    curve.ip.push_back(ip);
    curve.alpha.push_back(alpha_from_ip(ip, basis));
  }
  return curve;
}

}  // namespace sfi::model_atom
