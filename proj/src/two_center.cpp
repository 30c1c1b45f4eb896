#include "sfi/two_center.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace sfi::two_center {

const char* parity_tag(Parity p) { return p == Parity::gerade ? "g" : "u"; }

namespace {

// Parity-adapted combinations of eta splines. On a symmetric knot
// sequence the mirror of spline j is spline n-1-j, so even/odd functions
// are B_j +- B_{n-1-j}; an odd spline count contributes its symmetric
// middle spline to the even set.
Matrix eta_adapt_matrix(int n, int sign) {
  const int pairs = n / 2;
  const int cols = sign > 0 ? (n + 1) / 2 : n / 2;
  Matrix Q = Matrix::Zero(n, cols);
  for (int j = 0; j < pairs; ++j) {
    Q(j, j) = 1.0;
    Q(n - 1 - j, j) = sign > 0 ? 1.0 : -1.0;
  }
  if (sign > 0 && n % 2 == 1) Q(pairs, cols - 1) = 1.0;
  return Q;
}

struct BlockMatrices {
  // 1d weighted Galerkin matrices entering the Kronecker assembly.
  Matrix X0, X1, X2, Xd;  // xi: p^L, p^L xi, p^L xi^2, p^(L+1) d/dxi
  Matrix H0, H2, Hd;      // eta (adapted): q^L, q^L eta^2, q^(L+1) d/deta
};

Matrix xi_weighted(const TwoCenterBasis& b, const bspline::QuadratureRule& rule,
                   int p_power, int moment, int deriv) {
  return assemble_matrix(
      b.xi, rule,
      [p_power, moment](double xi) {
        return std::pow(xi * xi - 1.0, p_power) * std::pow(xi, moment);
      },
      deriv, deriv);
}

Matrix eta_weighted_full(const bspline::BSplineBasis& eta,
                         const bspline::QuadratureRule& rule, int q_power, int moment,
                         int deriv) {
  return assemble_matrix(
      eta, rule,
      [q_power, moment](double e) {
        return std::pow(1.0 - e * e, q_power) * std::pow(e, moment);
      },
      deriv, deriv);
}

// M += c * kron(X, H) with eta fastest in the flattened index.
void add_kron(Matrix& M, double c, const Matrix& X, const Matrix& H) {
  const int nx = static_cast<int>(X.rows());
  const int ne_r = static_cast<int>(H.rows());
  const int ne_c = static_cast<int>(H.cols());
  for (int i = 0; i < nx; ++i) {
    for (int k = 0; k < static_cast<int>(X.cols()); ++k) {
      const double x = X(i, k);
      if (x == 0.0) continue;
      M.block(i * ne_r, k * ne_c, ne_r, ne_c) += (c * x) * H;
    }
  }
}

}  // namespace

TwoCenterBasis build_two_center_basis(double R, int Lambda, Parity parity, double box,
                                      int xi_splines, int xi_order, int eta_splines,
                                      int eta_order, int xi_geometric,
                                      double xi_progression) {
  if (!(R > 0.0)) throw std::invalid_argument("build_two_center_basis: R must be positive");
  if (box <= R)
    throw std::invalid_argument("build_two_center_basis: box must exceed R");
  if (Lambda < 0) throw std::invalid_argument("build_two_center_basis: Lambda < 0");
  if (eta_splines < 4)
    throw std::invalid_argument("build_two_center_basis: too few eta splines");

  TwoCenterBasis b;
  b.R = R;
  b.box = box;
  b.Lambda = Lambda;
  b.parity = parity;
  b.xi = bspline::make_basis(xi_splines, xi_order, 1.0, 2.0 * box / R, xi_geometric,
                             xi_progression, false, true);
  b.eta = bspline::make_basis(eta_splines, eta_order, -1.0, 1.0);
  b.eta_adapt = eta_adapt_matrix(eta_splines, b.eta_sign());
  return b;
}

OrbitalSet solve_orbitals(const TwoCenterBasis& b, std::pair<double, double> charges) {
  if (charges.first != charges.second)
    throw std::invalid_argument("solve_orbitals: only homonuclear systems supported");
  const double Z = charges.first;
  const double R = b.R;
  const int L = b.Lambda;

  // Weights are polynomials of degree <= 2L + 3; size the rules so all
  // assembled integrals are exact.
  const auto xi_rule = bspline::gauss_rule(b.xi, b.xi.order() + L + 3);
  const auto eta_rule = bspline::gauss_rule(b.eta, b.eta.order() + L + 3);

  BlockMatrices m;
  m.X0 = xi_weighted(b, xi_rule, L, 0, 0);
  m.X1 = xi_weighted(b, xi_rule, L, 1, 0);
  m.X2 = xi_weighted(b, xi_rule, L, 2, 0);
  m.Xd = xi_weighted(b, xi_rule, L + 1, 0, 1);
  const Matrix& Q = b.eta_adapt;
  m.H0 = Q.transpose() * eta_weighted_full(b.eta, eta_rule, L, 0, 0) * Q;
  m.H2 = Q.transpose() * eta_weighted_full(b.eta, eta_rule, L, 2, 0) * Q;
  m.Hd = Q.transpose() * eta_weighted_full(b.eta, eta_rule, L + 1, 0, 1) * Q;

  const int N = b.size();
  const double half_R = 0.5 * R;
  Matrix S = Matrix::Zero(N, N);
  add_kron(S, std::pow(half_R, 3), m.X2, m.H0);
  add_kron(S, -std::pow(half_R, 3), m.X0, m.H2);

  Matrix H = Matrix::Zero(N, N);
  add_kron(H, 0.25 * R, m.Xd, m.H0);
  add_kron(H, 0.25 * R, m.X0, m.Hd);
  add_kron(H, -0.5 * Z * R * R, m.X1, m.H0);

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(
      H, S, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solve_orbitals: eigensolve failed");

  OrbitalSet set;
  set.basis = b;
  set.energies = es.eigenvalues();
  set.coefficients = es.eigenvectors();

  // eta node counts, used to emulate a truncated eta expansion: sample
  // u along eta at a few xi stations and take the best-resolved profile.
  const int n_states = static_cast<int>(set.energies.size());
  set.eta_node_counts.resize(n_states);

  const int n_grid = 501;
  Matrix eta_vals(n_grid, b.n_eta());
  for (int g = 0; g < n_grid; ++g) {
    const double e = -1.0 + 2.0 * g / (n_grid - 1);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(b.eta.size());
    for (const auto& [idx, v] : eval_splines(b.eta, e)) row[idx] = v;
    eta_vals.row(g) = row * Q;
  }

  const double xi_span = b.xi_max() - 1.0;
  const double fracs[] = {0.02, 0.06, 0.15, 0.30, 0.50};
  std::vector<Eigen::RowVectorXd> xi_rows;
  for (double f : fracs) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(b.n_xi());
    for (const auto& [idx, v] : eval_splines(b.xi, 1.0 + f * xi_span)) row[idx] = v;
    xi_rows.push_back(row);
  }

  for (int s = 0; s < n_states; ++s) {
    Eigen::Map<const Matrix> coef(set.coefficients.col(s).data(), b.n_eta(), b.n_xi());
    Vector best;
    double best_amp = -1.0;
    for (const auto& row : xi_rows) {
      Vector slice = coef * row.transpose();          // eta-function weights
      Vector profile = eta_vals * slice;              // u(xi*, eta_g)
      const double amp = profile.cwiseAbs().maxCoeff();
      if (amp > best_amp) {
        best_amp = amp;
        best = profile;
      }
    }
    int nodes = 0;
    if (best_amp > 0.0) {
      double prev = 0.0;
      for (int g = 0; g < n_grid; ++g) {
        const double v = best[g];
        if (std::abs(v) < 1e-8 * best_amp) continue;
        if (prev != 0.0 && v * prev < 0.0) ++nodes;
        prev = v;
      }
    }
    set.eta_node_counts[s] = nodes;
  }
  return set;
}

OrbitalSet filter_by_eta_nodes(const OrbitalSet& set, int max_nodes) {
  std::vector<int> keep;
  for (int s = 0; s < static_cast<int>(set.energies.size()); ++s) {
    if (set.eta_node_counts[s] <= max_nodes) keep.push_back(s);
  }
  OrbitalSet out;
  out.basis = set.basis;
  out.energies.resize(keep.size());
  out.coefficients.resize(set.coefficients.rows(), keep.size());
  out.eta_node_counts.resize(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.energies[i] = set.energies[keep[i]];
    out.coefficients.col(i) = set.coefficients.col(keep[i]);
    out.eta_node_counts[i] = set.eta_node_counts[keep[i]];
  }
  return out;
}

double eval_orbital(const OrbitalSet& set, int state, double xi, double eta) {
  const auto& b = set.basis;
  if (state < 0 || state >= set.energies.size())
    throw std::out_of_range("eval_orbital: state index");
  Eigen::RowVectorXd xrow = Eigen::RowVectorXd::Zero(b.n_xi());
  for (const auto& [idx, v] : eval_splines(b.xi, xi)) xrow[idx] = v;
  Eigen::RowVectorXd erow_full = Eigen::RowVectorXd::Zero(b.eta.size());
  for (const auto& [idx, v] : eval_splines(b.eta, eta)) erow_full[idx] = v;
  Eigen::RowVectorXd erow = erow_full * b.eta_adapt;
  Eigen::Map<const Matrix> coef(set.coefficients.col(state).data(), b.n_eta(), b.n_xi());
  return erow * coef * xrow.transpose();
}

bool dipole_coupled(int lam_a, Parity par_a, int lam_b, Parity par_b,
                    DipoleComponent comp) {
  if (par_a == par_b) return false;
  const int d = std::abs(lam_a - lam_b);
  return comp == DipoleComponent::parallel ? d == 0 : d == 1;
}

namespace {

// <bra | X kron H | ket> over all orbital pairs. Coefficient columns are
// flattened with eta fastest, so a column reshapes to (n_eta x n_xi).
Matrix contract_pairs(const OrbitalSet& bra, const OrbitalSet& ket, const Matrix& X,
                      const Matrix& H) {
  const int nx = bra.basis.n_xi();
  const int ne_b = bra.basis.n_eta();
  const int ne_k = ket.basis.n_eta();
  const int n_ket = static_cast<int>(ket.energies.size());
  Matrix W(bra.basis.size(), n_ket);
  Matrix tmp(ne_b, nx);
  for (int s = 0; s < n_ket; ++s) {
    Eigen::Map<const Matrix> V(ket.coefficients.col(s).data(), ne_k, nx);
    tmp.noalias() = H * V * X.transpose();
    W.col(s) = Eigen::Map<const Vector>(tmp.data(), tmp.size());
  }
  return bra.coefficients.transpose() * W;
}

}  // namespace

std::vector<DipoleBlock> dipole_blocks(const std::vector<OrbitalSet>& sets,
                                       DipoleComponent comp) {
  std::vector<DipoleBlock> blocks;
  for (int a = 0; a < static_cast<int>(sets.size()); ++a) {
    for (int bi = a + 1; bi < static_cast<int>(sets.size()); ++bi) {
      const auto& A = sets[a];
      const auto& B = sets[bi];
      if (!dipole_coupled(A.basis.Lambda, A.basis.parity, B.basis.Lambda,
                          B.basis.parity, comp))
        continue;
      if (A.basis.R != B.basis.R || A.basis.box != B.basis.box)
        throw std::invalid_argument("dipole_blocks: orbital sets on different geometries");

      const double R = A.basis.R;
      const int L = std::min(A.basis.Lambda, B.basis.Lambda);
      const auto xi_rule = bspline::gauss_rule(A.basis.xi, A.basis.xi.order() + L + 4);
      const auto eta_rule = bspline::gauss_rule(A.basis.eta, A.basis.eta.order() + L + 4);
      const Matrix& Qa = A.basis.eta_adapt;
      const Matrix& Qb = B.basis.eta_adapt;
      const double scale = std::pow(0.5 * R, 4);

      DipoleBlock blk;
      blk.bra = a;
      blk.ket = bi;
      if (comp == DipoleComponent::parallel) {
        // z = (R/2) xi eta; integrand (pq)^L xi eta (xi^2 - eta^2).
        const Matrix X3 = xi_weighted(A.basis, xi_rule, L, 3, 0);
        const Matrix X1 = xi_weighted(A.basis, xi_rule, L, 1, 0);
        const Matrix H1 =
            Qa.transpose() * eta_weighted_full(A.basis.eta, eta_rule, L, 1, 0) * Qb;
        const Matrix H3 =
            Qa.transpose() * eta_weighted_full(A.basis.eta, eta_rule, L, 3, 0) * Qb;
        blk.elements =
            scale * (contract_pairs(A, B, X3, H1) - contract_pairs(A, B, X1, H3));
      } else {
        // x = (R/2) sqrt(pq) cos(phi); the azimuthal integral in the real
        // (cosine) basis gives 1/sqrt(2) for the sigma-pi step and 1/2
        // beyond, and the prefactors merge into integer powers of p, q.
        const double kappa = (L == 0) ? 1.0 / std::sqrt(2.0) : 0.5;
        const Matrix X2 = xi_weighted(A.basis, xi_rule, L + 1, 2, 0);
        const Matrix X0 = xi_weighted(A.basis, xi_rule, L + 1, 0, 0);
        const Matrix H0 =
            Qa.transpose() * eta_weighted_full(A.basis.eta, eta_rule, L + 1, 0, 0) * Qb;
        const Matrix H2 =
            Qa.transpose() * eta_weighted_full(A.basis.eta, eta_rule, L + 1, 2, 0) * Qb;
        blk.elements = kappa * scale *
                       (contract_pairs(A, B, X2, H0) - contract_pairs(A, B, X0, H2));
      }
      blocks.push_back(std::move(blk));
    }
  }
  return blocks;
}

}  // namespace sfi::two_center
