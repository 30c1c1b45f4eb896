#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "sfi/model_atom.hpp"
#include "sfi/propagator.hpp"

using namespace sfi;
using namespace sfi::propagator;

namespace {

std::vector<model_atom::RadialEigenbasis> small_atom(int ell_max, double alpha = 0.0,
                                                     double box = 60.0,
                                                     int n_splines = 100) {
  const auto basis = model_atom::default_basis(box, n_splines, 8);
  std::vector<model_atom::RadialEigenbasis> blocks;
  for (int ell = 0; ell <= ell_max; ++ell)
    blocks.push_back(model_atom::solve_radial({alpha}, ell, basis));
  return blocks;
}

// Two levels split by `gap`, coupled by a unit dipole element; the
// analytic Rabi populations are the oracle for the driven propagation.
FieldFreeBasis two_level(double gap) {
  FieldFreeBasis b;
  b.blocks.resize(2);
  b.blocks[0].label = {0, 0, false};
  b.blocks[0].offset = 0;
  b.blocks[0].count = 1;
  b.blocks[1].label = {1, 0, false};
  b.blocks[1].offset = 1;
  b.blocks[1].count = 1;
  b.energies = Vector(2);
  b.energies << 0.0, gap;
  CouplingBlock c;
  c.bra = 0;
  c.ket = 1;
  c.d = Matrix::Ones(1, 1);
  b.couplings.push_back(c);
  b.threshold = 0.0;
  b.cutoff = 100.0;
  return b;
}

}  // namespace

TEST_SUITE_BEGIN("propagator");

TEST_CASE("cutoff keeps exactly the states below threshold plus cutoff") {
  const auto radial = small_atom(2);

  const auto b10 = build_field_free_basis(radial, 10.0);
  for (int i = 0; i < b10.size(); ++i) CHECK(b10.energies[i] < 10.0);

  const auto b0 = build_field_free_basis(radial, 0.0);
  for (int i = 0; i < b0.size(); ++i) CHECK(b0.energies[i] < 0.0);
  int bound = 0;
  for (const auto& block : radial)
    for (int i = 0; i < block.energies.size(); ++i)
      if (block.energies[i] < 0.0) ++bound;
  CHECK(b0.size() == bound);

  const auto b5 = build_field_free_basis(radial, 5.0);
  CHECK(b5.size() <= b10.size());
  CHECK(b0.size() <= b5.size());
  // monotone filter: each block's kept states form a prefix, so sizes say it all
  for (std::size_t k = 0; k < b5.blocks.size(); ++k)
    CHECK(b5.blocks[k].count <= b10.blocks[k].count);
}

TEST_CASE("the ground state sits in the first symmetry block") {
  const auto radial = small_atom(2);
  const auto basis = build_field_free_basis(radial, 5.0);
  const int g = basis.ground_state();
  CHECK(g >= basis.blocks[0].offset);
  CHECK(g < basis.blocks[0].offset + basis.blocks[0].count);
  for (int i = 0; i < basis.blocks[0].count; ++i)
    CHECK(basis.energies[g] <= basis.energies[basis.blocks[0].offset + i]);
}

TEST_CASE("zero field leaves populations alone and advances free phases") {
  const auto radial = small_atom(1);
  const auto basis = build_field_free_basis(radial, 2.0);
  const auto pulse = laser::make_pulse(400.0, 0.0, 10);
  const auto res = propagate(basis, pulse);

  const int g = basis.ground_state();
  CHECK(std::abs(std::abs(res.final.amplitudes[g]) - 1.0) < 1e-10);
  const Complex expected =
      std::exp(Complex(0.0, -basis.energies[g] * pulse.total_duration()));
  CHECK(std::abs(res.final.amplitudes[g] - expected) < 1e-8);
  CHECK(res.norm_defect < 1e-10);

  // same from an excited initial state
  const int excited = basis.blocks[1].offset;
  const auto res2 = propagate(basis, pulse, excited);
  const Complex expected2 =
      std::exp(Complex(0.0, -basis.energies[excited] * pulse.total_duration()));
  CHECK(std::abs(res2.final.amplitudes[excited] - expected2) < 1e-8);
}

TEST_CASE("constant drive reproduces the analytic Rabi populations") {
  auto rabi = [](double gap, double drive, double t) {
    const double om = std::hypot(drive, 0.5 * gap);
    const double s = std::sin(om * t);
    return drive * drive / (om * om) * s * s;
  };

  for (const auto& [gap, drive] : {std::pair{0.0, 0.04}, {0.02, 0.05}}) {
    const auto basis = two_level(gap);
    ComplexVector c0(2);
    c0 << 1.0, 0.0;
    for (double t_final : {20.0, 57.0, 130.0}) {
      const auto res = propagate_driven(
          basis, [&](double) { return drive; }, 0.0, t_final, c0, 1e-10, 1e-14);
      const double p1 = std::norm(res.final.amplitudes[1]);
      CHECK(std::abs(p1 - rabi(gap, drive, t_final)) < 1e-6);
      CHECK(res.norm_defect < 1e-8);
    }
  }
}

TEST_CASE("propagation through a real pulse conserves the norm") {
  const auto radial = small_atom(3);
  const auto basis = build_field_free_basis(radial, 3.0);
  const auto pulse = laser::make_pulse(400.0, 2e13, 10);
  const auto res = propagate(basis, pulse);
  CHECK(res.norm_defect < 1e-8);
  CHECK(res.n_steps > 0);

  const auto yd = ionization_yield(res.final, basis);
  CHECK(yd.yield > 0.0);
  CHECK(yd.yield < 1.0);
  double bound_total = 0.0;
  for (const auto& [label, pop] : yd.bound_populations) bound_total += pop;
  CHECK(std::abs(yd.yield + bound_total - 1.0) < 1e-8);
}

TEST_CASE("backward integration undoes the forward pass") {
  const auto radial = small_atom(2);
  const auto basis = build_field_free_basis(radial, 5.0);
  const auto pulse = laser::make_pulse(400.0, 5e13, 6);
  const double half = 0.5 * pulse.total_duration();

  ComplexVector c0 = ComplexVector::Zero(basis.size());
  c0[basis.ground_state()] = 1.0;
  auto field = [&](double t) { return laser::field_at(pulse, t); };

  const auto fwd = propagate_driven(basis, field, -half, half, c0, 1e-10, 1e-14);
  const auto back =
      propagate_driven(basis, field, half, -half, fwd.final.amplitudes, 1e-10, 1e-14);
  CHECK(std::abs(std::norm(back.final.amplitudes[basis.ground_state()]) - 1.0) <
        1e-6);
}

TEST_CASE("yield sums the populations above threshold") {
  const auto radial = small_atom(1);
  const auto basis = build_field_free_basis(radial, 5.0);

  Expansion psi;
  psi.amplitudes = ComplexVector::Zero(basis.size());

  // all population bound
  psi.amplitudes[basis.ground_state()] = 1.0;
  CHECK(ionization_yield(psi, basis).yield == 0.0);

  // 0.9 bound / 0.1 continuum
  int continuum = -1;
  for (int i = 0; i < basis.size(); ++i)
    if (basis.energies[i] > 0.0) {
      continuum = i;
      break;
    }
  REQUIRE(continuum >= 0);
  psi.amplitudes[basis.ground_state()] = std::sqrt(0.9);
  psi.amplitudes[continuum] = std::sqrt(0.1);
  CHECK(std::abs(ionization_yield(psi, basis).yield - 0.1) < 1e-12);

  // everything in the continuum
  psi.amplitudes.setZero();
  psi.amplitudes[continuum] = 1.0;
  CHECK(std::abs(ionization_yield(psi, basis).yield - 1.0) < 1e-12);
}

TEST_CASE("spectrum rebinning conserves the ionization yield") {
  const auto radial = small_atom(3);
  const auto basis = build_field_free_basis(radial, 2.0);
  const auto pulse = laser::make_pulse(400.0, 4e13, 10);
  const auto res = propagate(basis, pulse);
  const auto yd = ionization_yield(res.final, basis);

  for (double bin : {0.01, 0.05}) {
    const auto spec = photoelectron_spectrum(res.final, basis, bin);
    CHECK(spec.bin_width == bin);
    double integral = 0.0;
    for (int i = 0; i < spec.density.size(); ++i) {
      integral += spec.density[i] * bin;
      CHECK(spec.energy[i] >= 0.0);  // measured from threshold
    }
    CHECK(std::abs(integral - yd.yield) < 1e-12);
  }
}

TEST_CASE("zero field produces an empty spectrum") {
  const auto radial = small_atom(1);
  const auto basis = build_field_free_basis(radial, 5.0);
  const auto res = propagate(basis, laser::make_pulse(400.0, 0.0, 10));
  const auto spec = photoelectron_spectrum(res.final, basis, 0.02);
  double integral = 0.0;
  for (int i = 0; i < spec.density.size(); ++i) integral += spec.density[i];
  CHECK(integral * spec.bin_width < 1e-14);
}

TEST_CASE("ATI comb peaks are spaced by the photon energy") {
  // the box sets the continuum level spacing; 150 bohr keeps it below
  // the bin width over the first few ATI orders
  const auto radial = small_atom(4, 0.0, 150.0, 180);
  const auto basis = build_field_free_basis(radial, 1.5);
  const auto pulse = laser::make_pulse(400.0, 2e13, 20);
  const auto res = propagate(basis, pulse);
  const double bin = 0.025;
  const auto spec = photoelectron_spectrum(res.final, basis, bin);

  // local maxima above a hundredth of the strongest bin
  std::vector<double> peaks;
  double top = 0.0;
  for (int i = 0; i < spec.density.size(); ++i) top = std::max(top, spec.density[i]);
  for (int i = 1; i + 1 < spec.density.size(); ++i)
    if (spec.density[i] > spec.density[i - 1] &&
        spec.density[i] > spec.density[i + 1] && spec.density[i] > 0.01 * top)
      peaks.push_back(spec.energy[i]);

  REQUIRE(peaks.size() >= 2);
  const double omega = pulse.omega();
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
    const double spacing = peaks[i + 1] - peaks[i];
    const double off = std::abs(spacing / omega - std::round(spacing / omega)) * omega;
    CHECK(off <= bin + 1e-12);
  }
}

TEST_CASE("propagation rejects bad requests up front") {
  const auto radial = small_atom(1);
  const auto basis = build_field_free_basis(radial, 5.0);
  const auto pulse = laser::make_pulse(400.0, 1e13, 10);
  CHECK_THROWS_AS(propagate(basis, pulse, basis.size() + 5), std::invalid_argument);
  CHECK_THROWS_AS(propagate(basis, pulse, -1, 1e-3), std::invalid_argument);

  CHECK_THROWS_AS(build_field_free_basis(radial, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_field_free_basis({}, 10.0), std::invalid_argument);
}

TEST_SUITE_END();
