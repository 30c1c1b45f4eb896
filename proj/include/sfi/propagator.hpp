#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfi/laser.hpp"
#include "sfi/model_atom.hpp"
#include "sfi/two_center.hpp"
#include "sfi/types.hpp"

//! Spectral propagation: the wavefunction is expanded over the bound and
//! discretized-continuum eigenstates of the field-free Hamiltonian and
//! the time-dependent Schroedinger equation becomes a coupled system of
//! real first-order ODEs for the expansion amplitudes. The interaction
//! is applied in the length gauge through symmetry-resolved dipole
//! blocks; working in the interaction picture removes the stiff
//! field-free phases, so a zero field propagates exactly.

namespace sfi::propagator {

struct BlockLabel {
  int sym = 0;           // ell for an atom, Lambda for a molecule
  int parity = 0;        // +1 gerade, -1 ungerade; 0 for an atom
  bool molecular = false;
  std::string str() const;
};

struct SymmetryBlock {
  BlockLabel label;
  int offset = 0;  // first global state index
  int count = 0;
};

struct CouplingBlock {
  int bra = 0, ket = 0;  // block indices, bra < ket
  Matrix d;              // dipole elements between kept states
};

struct FieldFreeBasis {
  std::vector<SymmetryBlock> blocks;
  Vector energies;  // global, blockwise contiguous, ascending per block
  std::vector<CouplingBlock> couplings;
  double threshold = 0.0;  // continuum edge (orbital energy zero)
  double cutoff = 0.0;     // states kept up to threshold + cutoff
  laser::Orientation orientation = laser::Orientation::parallel;

  int size() const { return static_cast<int>(energies.size()); }
  //! Global index of the lowest-energy state of the first block.
  int ground_state() const;
};

//! Atom: blocks are ell = 0 .. ell_max with analytic angular factors for
//! the dl = +-1 couplings; both orientations are equivalent.
FieldFreeBasis build_field_free_basis(
    const std::vector<model_atom::RadialEigenbasis>& radial, double cutoff);

//! Molecule: blocks follow the supplied orbital sets; the dipole blocks
//! must belong to the requested orientation's component.
FieldFreeBasis build_field_free_basis(const std::vector<two_center::OrbitalSet>& sets,
                                      const std::vector<two_center::DipoleBlock>& dip,
                                      double cutoff, laser::Orientation orientation);

struct PropagationError : std::runtime_error {
  double t;
  PropagationError(const std::string& what, double t_)
      : std::runtime_error(what), t(t_) {}
};

struct Expansion {
  ComplexVector amplitudes;
  double time = 0.0;
};

struct PropagationResult {
  Expansion final;
  double norm_defect = 0.0;  // |1 - <psi|psi>|
  long n_steps = 0;
  long n_rhs = 0;
};

//! Propagate an initial eigenstate through a pulse, t from -T/2 to T/2.
//! Final amplitudes carry the full Schroedinger-picture phase
//! exp(-i E_j T_total) on top of the field-driven dynamics.
PropagationResult propagate(const FieldFreeBasis& basis, const laser::PulseSpec& pulse,
                            int initial_state = -1, double rel_tol = 1e-8,
                            double abs_tol = 1e-12);

//! Same machinery with an arbitrary scalar drive E(t); used for checks
//! against closed-form two-level dynamics and time-reversal tests.
PropagationResult propagate_driven(const FieldFreeBasis& basis,
                                   const std::function<double(double)>& field,
                                   double t0, double t1, const ComplexVector& c0,
                                   double rel_tol = 1e-8, double abs_tol = 1e-12);

struct YieldData {
  double yield = 0.0;
  double norm_defect = 0.0;
  std::map<std::string, double> bound_populations;  // per symmetry block
};

YieldData ionization_yield(const Expansion& psi, const FieldFreeBasis& basis);

struct Spectrum {
  Vector energy;   // bin centres above threshold
  Vector density;  // population per unit energy
  double bin_width = 0.0;
};

//! Histogram of continuum populations; integrates back to the yield.
Spectrum photoelectron_spectrum(const Expansion& psi, const FieldFreeBasis& basis,
                                double bin_width);

}  // namespace sfi::propagator
