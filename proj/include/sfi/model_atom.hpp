#pragma once

#include <vector>

#include "sfi/bspline.hpp"
#include "sfi/types.hpp"

//! Single-active-electron model atom. The potential
//!   V(r) = -(1/r) * (1 + sign(alpha) * exp(-2 r / sqrt(|alpha|)))
//! interpolates between a bare Coulomb core (alpha = 0), a deeper
//! short-range-attractive core (alpha > 0) and a screened one
//! (alpha < 0). alpha is calibrated so that the ground state matches a
//! prescribed ionization potential; a table Ip(R) then yields an R
//! dependent family of atoms mimicking a stretched molecule.

namespace sfi::model_atom {

struct ModelPotentialSpec {
  double alpha = 0.0;
};

double potential_value(const ModelPotentialSpec& spec, double r);

//! Eigenpairs of the radial Hamiltonian for one angular momentum ell,
//! expanded over B-splines for the reduced radial function u(r) = r R(r)
//! with u(0) = u(box) = 0.
struct RadialEigenbasis {
  int ell = 0;
  Vector energies;       // ascending, hartree
  Matrix coefficients;   // basis.size() x n_states, S-orthonormal columns
  bspline::BSplineBasis basis;
};

RadialEigenbasis solve_radial(const ModelPotentialSpec& spec, int ell,
                              const bspline::BSplineBasis& basis);

//! Shipped default for propagation work: box 200 bohr, 300 splines of
//! order 8, knots geometric near the origin.
bspline::BSplineBasis default_basis(double box = 200.0, int n_splines = 300,
                                    int order = 8);

//! Small-box basis used when root-finding alpha; the ground state is
//! compact, so a 40 bohr box already gives it to machine accuracy.
bspline::BSplineBasis calibration_basis();

//! Ground-state ionization potential -E_0(alpha) on the given basis.
double ground_ip(double alpha, const bspline::BSplineBasis& basis);

//! Invert Ip(alpha) by bracketed bisection refined with secant steps.
//! Root located to |E_0 + ip| < 1e-9. alpha is searched in [-5, 20].
double alpha_from_ip(double ip);
double alpha_from_ip(double ip, const bspline::BSplineBasis& basis);

//! alpha(R) built pointwise from an (R, Ip) table.
struct AlphaCurve {
  std::vector<double> R;
  std::vector<double> ip;
  std::vector<double> alpha;
};

AlphaCurve build_alpha_curve(const std::vector<std::pair<double, double>>& ip_table);

}  // namespace sfi::model_atom
