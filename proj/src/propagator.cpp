#include "sfi/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sfi/ode.hpp"

namespace sfi::propagator {

std::string BlockLabel::str() const {
  if (!molecular) return "l=" + std::to_string(sym);
  static const char* greek[] = {"sigma", "pi", "delta", "phi"};
  std::string base = sym < 4 ? greek[sym] : "L" + std::to_string(sym);
  return base + (parity > 0 ? "_g" : "_u");
}

int FieldFreeBasis::ground_state() const {
  if (blocks.empty() || blocks.front().count == 0)
    throw std::invalid_argument("ground_state: empty basis");
  return blocks.front().offset;  // energies ascend within a block
}

namespace {

int count_below(const Vector& energies, double emax) {
  int n = 0;
  while (n < energies.size() && energies[n] <= emax) ++n;
  return n;
}

}  // namespace

FieldFreeBasis build_field_free_basis(
    const std::vector<model_atom::RadialEigenbasis>& radial, double cutoff) {
  if (radial.empty())
    throw std::invalid_argument("build_field_free_basis: no radial blocks");
  if (cutoff < 0.0) throw std::invalid_argument("build_field_free_basis: negative cutoff");

  FieldFreeBasis fb;
  fb.threshold = 0.0;
  fb.cutoff = cutoff;

  std::vector<int> kept(radial.size());
  int total = 0;
  for (std::size_t i = 0; i < radial.size(); ++i) {
    if (radial[i].ell != static_cast<int>(i))
      throw std::invalid_argument("build_field_free_basis: blocks must be ell = 0,1,...");
    kept[i] = count_below(radial[i].energies, fb.threshold + cutoff);
    SymmetryBlock blk;
    blk.label = {static_cast<int>(i), 0, false};
    blk.offset = total;
    blk.count = kept[i];
    fb.blocks.push_back(blk);
    total += kept[i];
  }
  fb.energies.resize(total);
  for (std::size_t i = 0; i < radial.size(); ++i)
    fb.energies.segment(fb.blocks[i].offset, kept[i]) = radial[i].energies.head(kept[i]);

  // r matrix over the shared radial spline basis, contracted with the
  // eigenvectors; angular factor <l,0|cos|l+1,0>.
  const auto& basis0 = radial[0].basis;
  const auto rule = bspline::gauss_rule(basis0, basis0.order() + 2);
  const Matrix rmat = assemble_matrix(basis0, rule, [](double r) { return r; });
  for (std::size_t l = 0; l + 1 < radial.size(); ++l) {
    if (kept[l] == 0 || kept[l + 1] == 0) continue;
    const double ang =
        (l + 1.0) / std::sqrt((2.0 * l + 1.0) * (2.0 * l + 3.0));
    CouplingBlock cb;
    cb.bra = static_cast<int>(l);
    cb.ket = static_cast<int>(l + 1);
    cb.d = ang * (radial[l].coefficients.leftCols(kept[l]).transpose() * rmat *
                  radial[l + 1].coefficients.leftCols(kept[l + 1]));
    fb.couplings.push_back(std::move(cb));
  }
  return fb;
}

FieldFreeBasis build_field_free_basis(const std::vector<two_center::OrbitalSet>& sets,
                                      const std::vector<two_center::DipoleBlock>& dip,
                                      double cutoff, laser::Orientation orientation) {
  if (sets.empty()) throw std::invalid_argument("build_field_free_basis: no orbital sets");
  if (cutoff < 0.0) throw std::invalid_argument("build_field_free_basis: negative cutoff");

  FieldFreeBasis fb;
  fb.threshold = 0.0;
  fb.cutoff = cutoff;
  fb.orientation = orientation;

  std::vector<int> kept(sets.size());
  int total = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    kept[i] = count_below(sets[i].energies, fb.threshold + cutoff);
    SymmetryBlock blk;
    blk.label = {sets[i].basis.Lambda,
                 two_center::parity_sign(sets[i].basis.parity), true};
    blk.offset = total;
    blk.count = kept[i];
    fb.blocks.push_back(blk);
    total += kept[i];
  }
  fb.energies.resize(total);
  for (std::size_t i = 0; i < sets.size(); ++i)
    fb.energies.segment(fb.blocks[i].offset, kept[i]) = sets[i].energies.head(kept[i]);

  const auto want = orientation == laser::Orientation::parallel
                        ? two_center::DipoleComponent::parallel
                        : two_center::DipoleComponent::perpendicular;
  for (const auto& blk : dip) {
    const auto& A = sets[blk.bra];
    const auto& B = sets[blk.ket];
    if (!two_center::dipole_coupled(A.basis.Lambda, A.basis.parity, B.basis.Lambda,
                                    B.basis.parity, want))
      throw std::invalid_argument(
          "build_field_free_basis: dipole block does not match the orientation");
    if (kept[blk.bra] == 0 || kept[blk.ket] == 0) continue;
    CouplingBlock cb;
    cb.bra = blk.bra;
    cb.ket = blk.ket;
    cb.d = blk.elements.topLeftCorner(kept[blk.bra], kept[blk.ket]);
    fb.couplings.push_back(std::move(cb));
  }
  if (fb.couplings.empty() && fb.blocks.size() > 1)
    throw std::invalid_argument("build_field_free_basis: no couplings between blocks");
  return fb;
}

namespace {

// RHS of the interaction-picture amplitudes, viewed as 2n real ODEs:
//   da/dt = -i E(t) P(t) D P(t)^* a,   P = diag(exp(i E_j t)).
struct InteractionRhs {
  const FieldFreeBasis& basis;
  const std::function<double(double)>& field;
  // scratch
  mutable ComplexVector phase, work, out;

  InteractionRhs(const FieldFreeBasis& b, const std::function<double(double)>& f)
      : basis(b), field(f) {
    const int n = b.size();
    phase.resize(n);
    work.resize(n);
    out.resize(n);
  }

  void operator()(double t, const Vector& y, Vector& dydt) const {
    const int n = basis.size();
    const double ef = field(t);
    if (ef == 0.0) {
      dydt.setZero();
      return;
    }
    const auto a = Eigen::Map<const ComplexVector>(
        reinterpret_cast<const Complex*>(y.data()), n);
    for (int j = 0; j < n; ++j) {
      const double ph = basis.energies[j] * t;
      phase[j] = Complex(std::cos(ph), std::sin(ph));  // e^{+i E t}
    }
    work = a.cwiseProduct(phase.conjugate());
    out.setZero();
    for (const auto& cb : basis.couplings) {
      const auto& bb = basis.blocks[cb.bra];
      const auto& kb = basis.blocks[cb.ket];
      out.segment(bb.offset, bb.count).noalias() +=
          cb.d * work.segment(kb.offset, kb.count);
      out.segment(kb.offset, kb.count).noalias() +=
          cb.d.transpose() * work.segment(bb.offset, bb.count);
    }
    // -i * (-E(t)) => +i E(t): interaction is -E(t) D.
    const Complex fac(0.0, ef);
    auto d = Eigen::Map<ComplexVector>(reinterpret_cast<Complex*>(dydt.data()), n);
    d = fac * phase.cwiseProduct(out);
  }
};

}  // namespace

PropagationResult propagate_driven(const FieldFreeBasis& basis,
                                   const std::function<double(double)>& field,
                                   double t0, double t1, const ComplexVector& c0,
                                   double rel_tol, double abs_tol) {
  if (c0.size() != basis.size())
    throw std::invalid_argument("propagate_driven: amplitude size mismatch");
  if (!(rel_tol > 0.0) || rel_tol > 1e-4)
    throw std::invalid_argument("propagate_driven: rel_tol outside (0, 1e-4]");

  const int n = basis.size();
  const double norm0 = c0.squaredNorm();

  // Interaction picture referenced to t = 0: a_j(t) = e^{+i E_j t} c_j(t).
  Vector y(2 * n);
  {
    auto a = Eigen::Map<ComplexVector>(reinterpret_cast<Complex*>(y.data()), n);
    for (int j = 0; j < n; ++j) {
      const double ph = basis.energies[j] * t0;
      a[j] = c0[j] * Complex(std::cos(ph), std::sin(ph));
    }
  }

  InteractionRhs rhs(basis, field);
  ode::Options opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = abs_tol;
  ode::Stats st;
  try {
    st = ode::integrate_dopri5(
        [&rhs](double t, const Vector& yy, Vector& dd) { rhs(t, yy, dd); }, t0, t1, y,
        opt);
  } catch (const ode::StepSizeError& e) {
    throw PropagationError("propagate: step size underflow at t = " + std::to_string(e.t),
                           e.t);
  }

  PropagationResult res;
  res.final.time = t1;
  res.final.amplitudes.resize(n);
  {
    auto a = Eigen::Map<const ComplexVector>(reinterpret_cast<const Complex*>(y.data()), n);
    for (int j = 0; j < n; ++j) {
      const double ph = basis.energies[j] * t1;
      res.final.amplitudes[j] = a[j] * Complex(std::cos(ph), -std::sin(ph));
    }
  }
  res.norm_defect = std::abs(res.final.amplitudes.squaredNorm() - norm0);
  res.n_steps = st.n_steps;
  res.n_rhs = st.n_rhs;
  return res;
}

PropagationResult propagate(const FieldFreeBasis& basis, const laser::PulseSpec& pulse,
                            int initial_state, double rel_tol, double abs_tol) {
  const int n = basis.size();
  if (n == 0) throw std::invalid_argument("propagate: empty basis");
  const int init = initial_state < 0 ? basis.ground_state() : initial_state;
  if (init >= n) throw std::invalid_argument("propagate: initial state out of range");

  const double tol = 1e-9;
  const double theta = pulse.orientation_angle;
  const bool molecular = !basis.blocks.empty() && basis.blocks.front().label.molecular;
  if (molecular) {
    const bool para = std::abs(theta) < tol;
    const bool perp = std::abs(theta - 0.5 * std::numbers::pi) < tol;
    if (!para && !perp)
      throw std::invalid_argument("propagate: only parallel or perpendicular orientations");
    const auto want = para ? laser::Orientation::parallel : laser::Orientation::perpendicular;
    if (want != basis.orientation)
      throw std::invalid_argument("propagate: basis was built for the other orientation");
  }

  ComplexVector c0 = ComplexVector::Zero(n);
  c0[init] = 1.0;
  const double half = 0.5 * pulse.total_duration();
  return propagate_driven(
      basis, [&pulse](double t) { return laser::field_at(pulse, t); }, -half, half, c0,
      rel_tol, abs_tol);
}

YieldData ionization_yield(const Expansion& psi, const FieldFreeBasis& basis) {
  if (psi.amplitudes.size() != basis.size())
    throw std::invalid_argument("ionization_yield: size mismatch");
  YieldData out;
  double total = 0.0;
  for (const auto& blk : basis.blocks) {
    double bound = 0.0;
    for (int j = 0; j < blk.count; ++j) {
      const int g = blk.offset + j;
      const double pop = std::norm(psi.amplitudes[g]);
      total += pop;
      if (basis.energies[g] > basis.threshold)
        out.yield += pop;
      else
        bound += pop;
    }
    out.bound_populations[blk.label.str()] = bound;
  }
  out.norm_defect = std::abs(total - 1.0);
  return out;
}

Spectrum photoelectron_spectrum(const Expansion& psi, const FieldFreeBasis& basis,
                                double bin_width) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("photoelectron_spectrum: bin width must be positive");
  if (psi.amplitudes.size() != basis.size())
    throw std::invalid_argument("photoelectron_spectrum: size mismatch");

  double emax = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    const double e = basis.energies[j] - basis.threshold;
    if (e > emax) emax = e;
  }
  const int n_bins = std::max(1, static_cast<int>(std::ceil(emax / bin_width)));
  Spectrum sp;
  sp.bin_width = bin_width;
  sp.energy.resize(n_bins);
  sp.density = Vector::Zero(n_bins);
  for (int b = 0; b < n_bins; ++b) sp.energy[b] = (b + 0.5) * bin_width;
  for (int j = 0; j < basis.size(); ++j) {
    const double e = basis.energies[j] - basis.threshold;
    if (e <= 0.0) continue;
    int b = static_cast<int>(e / bin_width);
    if (b >= n_bins) b = n_bins - 1;
    sp.density[b] += std::norm(psi.amplitudes[j]) / bin_width;
  }
  return sp;
}

}  // namespace sfi::propagator
