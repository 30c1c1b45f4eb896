#pragma once

#include <utility>
#include <vector>

#include "sfi/bspline.hpp"
#include "sfi/types.hpp"

//! One-electron two-centre Coulomb problem in prolate spheroidal
//! coordinates xi = (r_a + r_b)/R in [1, xi_max], eta = (r_a - r_b)/R in
//! [-1, 1], with the nuclei on the z axis at +-R/2.
//!
//! An orbital with axial angular momentum Lambda is written
//!   psi = [(xi^2-1)(1-eta^2)]^(Lambda/2) u(xi, eta) exp(i Lambda phi),
//! and u is expanded over a tensor product of B-splines in xi and
//! parity-adapted B-spline combinations in eta. With that prefactor the
//! centrifugal terms cancel and every Galerkin integrand is polynomial
//! times smooth, so the assembly is a short sum of Kronecker products of
//! 1d banded matrices.
//!
//! Kinetic + potential + overlap quadratic forms used below (charges
//! Z_a = Z_b = Z, p = xi^2-1, q = 1-eta^2, w = (pq)^Lambda):
//!   T[u,v] = (R/4)   int w (p u_xi v_xi + q u_eta v_eta)
//!   V[u,v] = -(Z R^2/2) int w xi u v
//!   S[u,v] = (R/2)^3 int w (xi^2 - eta^2) u v
//! The xi = 1 and eta = +-1 edges are natural boundaries; only the box
//! edge xi_max carries a Dirichlet zero.

namespace sfi::two_center {

enum class Parity { gerade, ungerade };

inline int parity_sign(Parity p) { return p == Parity::gerade ? +1 : -1; }
const char* parity_tag(Parity p);  // "g" / "u"

struct TwoCenterBasis {
  double R = 0.0;
  double box = 0.0;  // linear box radius; xi_max = 2 box / R
  int Lambda = 0;
  Parity parity = Parity::gerade;

  bspline::BSplineBasis xi;   // on [1, xi_max], last spline dropped
  bspline::BSplineBasis eta;  // on [-1, 1], all splines kept
  Matrix eta_adapt;           // n_eta_splines x n_eta_funcs, +-1 entries

  double xi_max() const { return 2.0 * box / R; }
  int n_xi() const { return xi.size(); }
  int n_eta() const { return static_cast<int>(eta_adapt.cols()); }
  int size() const { return n_xi() * n_eta(); }
  //! Parity of the eta factor of u (the prefactor and exp(i Lambda phi)
  //! carry the rest of the inversion symmetry).
  int eta_sign() const { return parity_sign(parity) * (Lambda % 2 == 0 ? 1 : -1); }
};

TwoCenterBasis build_two_center_basis(double R, int Lambda, Parity parity, double box,
                                      int xi_splines, int xi_order, int eta_splines,
                                      int eta_order, int xi_geometric = 40,
                                      double xi_progression = 1.05);

struct OrbitalSet {
  TwoCenterBasis basis;
  Vector energies;      // electronic only (no Z_a Z_b / R), ascending
  Matrix coefficients;  // basis.size() x n_states, S-orthonormal
  std::vector<int> eta_node_counts;
};

//! Solve the generalized eigenproblem for one (Lambda, parity) block.
//! Only homonuclear charges are supported.
OrbitalSet solve_orbitals(const TwoCenterBasis& basis,
                          std::pair<double, double> charges = {1.0, 1.0});

//! Keep orbitals whose eta profile has at most max_nodes sign changes.
OrbitalSet filter_by_eta_nodes(const OrbitalSet& set, int max_nodes);

//! u(xi, eta) for one orbital (no prefactor, no phi factor).
double eval_orbital(const OrbitalSet& set, int state, double xi, double eta);

enum class DipoleComponent { parallel, perpendicular };

//! Selection rule: parallel couples equal Lambda and opposite parity,
//! perpendicular couples |dLambda| = 1 and opposite parity.
bool dipole_coupled(int lam_a, Parity par_a, int lam_b, Parity par_b,
                    DipoleComponent comp);

struct DipoleBlock {
  int bra = 0, ket = 0;  // indices into the orbital-set list
  Matrix elements;       // <bra_i | z or x | ket_j >, bohr
};

//! All symmetry-allowed blocks among the given orbital sets, each pair
//! reported once with bra < ket. Blocks forbidden by the selection rules
//! are omitted (they vanish identically, not just numerically).
std::vector<DipoleBlock> dipole_blocks(const std::vector<OrbitalSet>& sets,
                                       DipoleComponent comp);

}  // namespace sfi::two_center
