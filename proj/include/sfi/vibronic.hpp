#pragma once

#include <utility>
#include <vector>

#include "sfi/types.hpp"

//! Vibrational levels on a Born-Oppenheimer curve and averaging of
//! R-dependent ionization yields over the nuclear density,
//!   Y(nu) = int dR Y(R) |phi_nu(R)|^2 ,
//! which is the frozen-nuclei weighting appropriate when the pulse is
//! short against the vibrational period.

namespace sfi::vibronic {

inline constexpr double kReducedMassH2 = 918.076;   // m_e
inline constexpr double kReducedMassD2 = 1835.24;

struct PotentialCurve {
  std::vector<double> R;  // bohr, strictly increasing
  std::vector<double> V;  // hartree
};

struct VibrationalState {
  int nu = 0;
  double reduced_mass = 0.0;
  double energy = 0.0;  // hartree, same origin as the curve
  Vector grid;          // bohr, uniform
  Vector density;       // |phi|^2 on the grid, integrates to 1
};

//! Solve the radial nuclear problem on [r_min, r_max] with a uniform
//! grid (default step 0.005 bohr) using the Numerov-corrected
//! three-point finite-difference generalized eigenproblem; O(h^4)
//! eigenvalues. The curve is interpolated onto the grid by cubic spline.
VibrationalState solve_vibrational(const PotentialCurve& curve, double reduced_mass,
                                   int nu = 0, double r_min = 0.4, double r_max = 6.0,
                                   double step = 0.005);

struct WeightedYieldCurve {
  Vector R;
  Vector values;         // Y(R) |phi(R)|^2 on the vibrational grid
  double excluded_mass = 0.0;  // nuclear density outside the sampled R range
  bool coverage_warning = false;
  bool depletion_warning = false;  // some sample had Y > 0.2
};

//! Weight yield samples (R, Y) by the nuclear density. Y(R) is cubic
//! spline interpolated between samples and held constant beyond them;
//! the fraction of density in that extrapolated region is reported and,
//! above 1%, flagged as a coverage warning.
WeightedYieldCurve weight_yield(const std::vector<std::pair<double, double>>& samples,
                                const VibrationalState& state);

//! Trapezoidal integral of the weighted curve over R.
double integrate_yield(const WeightedYieldCurve& curve);

//! Natural cubic spline through (x, y); evaluation clamps to the end
//! values outside the data range.
struct CubicSpline {
  std::vector<double> x, y, m;  // m: second derivatives
  double operator()(double xq) const;
};
CubicSpline build_spline(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sfi::vibronic
