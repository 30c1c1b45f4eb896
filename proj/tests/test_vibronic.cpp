#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sfi/io.hpp"
#include "sfi/vibronic.hpp"

using namespace sfi;
using namespace sfi::vibronic;

namespace {

PotentialCurve harmonic_curve(double k, double r0) {
  PotentialCurve c;
  for (int i = 0; i <= 640; ++i) {
    const double R = (20 + i) / 100.0;
    c.R.push_back(R);
    c.V.push_back(0.5 * k * (R - r0) * (R - r0));
  }
  return c;
}

double trapezoid(const Vector& grid, const Vector& f) {
  const double h = grid[1] - grid[0];
  double s = 0.0;
  for (int i = 0; i + 1 < f.size(); ++i) s += 0.5 * h * (f[i] + f[i + 1]);
  return s;
}

double density_mean(const VibrationalState& st) {
  return trapezoid(st.grid, (st.grid.array() * st.density.array()).matrix());
}

double density_variance(const VibrationalState& st) {
  const double mu = density_mean(st);
  const Vector dev = (st.grid.array() - mu).square() * st.density.array();
  return trapezoid(st.grid, dev);
}

int count_peaks(const Vector& f) {
  const double floor = 1e-10 * f.maxCoeff();
  int peaks = 0;
  for (int i = 1; i + 1 < f.size(); ++i)
    if (f[i] > floor && f[i] > f[i - 1] && f[i] >= f[i + 1]) ++peaks;
  return peaks;
}

PotentialCurve shipped_curve() {
  PotentialCurve c;
  for (const auto& [R, V] : io::read_table(SFI_DATA_DIR "/h2_potential_x1sg.dat")) {
    c.R.push_back(R);
    c.V.push_back(V);
  }
  return c;
}

// Bound levels of V = Vmin + De (1 - e^{-a(R-Re)})^2 in closed form.
double morse_level(double De, double a, double mu, int nu) {
  const double w = a * std::sqrt(2.0 * De / mu);
  const double x = w * (nu + 0.5);
  return x - x * x / (4.0 * De);
}

}  // namespace

TEST_SUITE_BEGIN("vibronic");

TEST_CASE("harmonic well reproduces the closed-form levels and width") {
  const double k = 0.37, r0 = 2.0, mu = kReducedMassH2;
  const auto curve = harmonic_curve(k, r0);
  const double omega = std::sqrt(k / mu);

  const auto g = solve_vibrational(curve, mu, 0);
  CHECK(std::abs(g.energy - 0.5 * omega) < 1e-8);
  CHECK(std::abs(density_mean(g) - r0) < 1e-8);
  // eigenvalues are O(h^4) but the discrete density is only O(h^2)
  CHECK(std::abs(density_variance(g) - 1.0 / (2.0 * mu * omega)) <
        1e-4 / (2.0 * mu * omega));

  const auto e1 = solve_vibrational(curve, mu, 1);
  CHECK(std::abs(e1.energy - 1.5 * omega) < 1e-8);
}

TEST_CASE("halving the step leaves the energy put") {
  const auto curve = harmonic_curve(0.37, 2.0);
  const auto a = solve_vibrational(curve, kReducedMassH2, 0, 0.4, 6.0, 0.005);
  const auto b = solve_vibrational(curve, kReducedMassH2, 0, 0.4, 6.0, 0.0025);
  CHECK(std::abs(a.energy - b.energy) < 1e-8);
}

TEST_CASE("densities come back normalized and non-negative") {
  const auto curve = harmonic_curve(0.5, 1.8);
  for (int nu : {0, 1, 3}) {
    const auto st = solve_vibrational(curve, kReducedMassD2, nu);
    CHECK(st.nu == nu);
    CHECK(std::abs(trapezoid(st.grid, st.density) - 1.0) < 1e-12);
    CHECK(st.density.minCoeff() >= 0.0);
    const double h0 = st.grid[1] - st.grid[0];
    CHECK(std::abs((st.grid[st.grid.size() - 1] - st.grid[0]) -
                   h0 * (st.grid.size() - 1)) < 1e-9);
  }
}

TEST_CASE("the nodeless ground density has one lobe, nu = 1 has two") {
  const auto curve = harmonic_curve(0.37, 2.0);
  CHECK(count_peaks(solve_vibrational(curve, kReducedMassH2, 0).density) == 1);
  CHECK(count_peaks(solve_vibrational(curve, kReducedMassH2, 1).density) == 2);
}

TEST_CASE("shipped curve: isotope ordering and closed-form check") {
  const auto curve = shipped_curve();
  const double De = 0.174476, a = 1.0287, vmin = -1.0 - De;

  const auto h2 = solve_vibrational(curve, kReducedMassH2, 0);
  const auto d2 = solve_vibrational(curve, kReducedMassD2, 0);

  // the curve is an analytic Morse form, so its levels are known exactly
  CHECK(std::abs(h2.energy - vmin - morse_level(De, a, kReducedMassH2, 0)) < 1e-6);
  CHECK(std::abs(d2.energy - vmin - morse_level(De, a, kReducedMassD2, 0)) < 1e-6);

  // heavier isotope: lower zero-point energy, tighter density
  CHECK(d2.energy < h2.energy);
  CHECK(density_variance(d2) < density_variance(h2));

  for (const auto& st : {h2, d2}) {
    int imax = 0;
    st.density.maxCoeff(&imax);
    CHECK(std::abs(st.grid[imax] - 1.40) < 0.05);
  }
}

TEST_CASE("weighting a constant yield integrates back to the constant") {
  const auto st = solve_vibrational(harmonic_curve(0.37, 2.0), kReducedMassH2, 0);
  const double c = 0.037;
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i <= 24; ++i) samples.emplace_back(0.8 + 0.1 * i, c);

  const auto w = weight_yield(samples, st);
  CHECK(!w.coverage_warning);
  CHECK(!w.depletion_warning);
  CHECK(w.excluded_mass < 1e-10);
  CHECK(std::abs(integrate_yield(w) - c) < 1e-10);

  for (auto& s : samples) s.second = 0.0;
  CHECK(integrate_yield(weight_yield(samples, st)) == 0.0);
}

TEST_CASE("weighting is linear in the yield samples") {
  const auto st = solve_vibrational(harmonic_curve(0.37, 2.0), kReducedMassH2, 0);
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 0.1);

  std::vector<std::pair<double, double>> s1, s2, mix;
  const double a = 0.7, b = -0.3;
  for (int i = 0; i <= 24; ++i) {
    const double R = 0.8 + 0.1 * i;
    const double y1 = u(rng), y2 = u(rng);
    s1.emplace_back(R, y1);
    s2.emplace_back(R, y2);
    mix.emplace_back(R, a * y1 + b * y2);
  }
  const double lhs = integrate_yield(weight_yield(mix, st));
  const double rhs = a * integrate_yield(weight_yield(s1, st)) +
                     b * integrate_yield(weight_yield(s2, st));
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("sampling the standard R window of the shipped curve is enough") {
  const auto st = solve_vibrational(shipped_curve(), kReducedMassH2, 0);
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 25; ++i) samples.emplace_back(1.0 + 0.05 * i, 1e-4);
  const auto w = weight_yield(samples, st);
  CHECK(!w.coverage_warning);
  CHECK(w.excluded_mass < 0.01);
  CHECK(w.excluded_mass > 0.0);

  // a much narrower window misses real density
  std::vector<std::pair<double, double>> narrow(samples.begin() + 8,
                                                samples.begin() + 13);
  const auto wn = weight_yield(narrow, st);
  CHECK(wn.coverage_warning);
  CHECK(wn.excluded_mass > 0.1);
}

TEST_CASE("a strongly depleted sample raises the flag") {
  const auto st = solve_vibrational(harmonic_curve(0.37, 2.0), kReducedMassH2, 0);
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i <= 24; ++i) samples.emplace_back(0.8 + 0.1 * i, 0.2);
  CHECK(!weight_yield(samples, st).depletion_warning);
  samples[12].second = 0.25;
  CHECK(weight_yield(samples, st).depletion_warning);
}

TEST_CASE("solver rejects unusable requests") {
  const auto curve = harmonic_curve(0.37, 2.0);
  CHECK_THROWS_AS(solve_vibrational(curve, -1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(solve_vibrational(curve, kReducedMassH2, -1), std::invalid_argument);
  CHECK_THROWS_AS(solve_vibrational(curve, kReducedMassH2, 0, 0.1, 6.0),
                  std::invalid_argument);

  PotentialCurve flat;
  for (int i = 0; i <= 640; ++i) {
    flat.R.push_back((20 + i) / 100.0);
    flat.V.push_back(0.5);
  }
  CHECK_THROWS_AS(solve_vibrational(flat, kReducedMassH2, 0), std::invalid_argument);

  // a well a thousandth of a hartree deep holds no level for mu = 1
  PotentialCurve shallow;
  for (int i = 0; i <= 640; ++i) {
    const double R = (20 + i) / 100.0;
    shallow.R.push_back(R);
    shallow.V.push_back(5e-7 * (R - 3.0) * (R - 3.0));
  }
  CHECK_THROWS_AS(solve_vibrational(shallow, 1.0, 0), std::invalid_argument);
}

TEST_CASE("weighting rejects short or unsorted sample sets") {
  const auto st = solve_vibrational(harmonic_curve(0.37, 2.0), kReducedMassH2, 0);
  std::vector<std::pair<double, double>> three = {{1.0, 0.1}, {1.5, 0.1}, {2.0, 0.1}};
  CHECK_THROWS_AS(weight_yield(three, st), std::invalid_argument);
  std::vector<std::pair<double, double>> jumbled = {
      {1.0, 0.1}, {2.0, 0.1}, {1.5, 0.1}, {2.5, 0.1}};
  CHECK_THROWS_AS(weight_yield(jumbled, st), std::invalid_argument);
}

TEST_CASE("cubic spline interpolates, clamps, and validates") {
  std::vector<double> x, y;
  for (int i = 0; i <= 10; ++i) {
    x.push_back(0.3 * i);
    y.push_back(2.0 * x.back() + 1.0);
  }
  const auto lin = build_spline(x, y);
  CHECK(std::abs(lin(1.234) - (2.0 * 1.234 + 1.0)) < 1e-12);
  CHECK(lin(-5.0) == y.front());
  CHECK(lin(99.0) == y.back());

  x.clear();
  y.clear();
  for (int i = 0; i <= 200; ++i) {
    x.push_back(std::numbers::pi * i / 200.0);
    y.push_back(std::sin(x.back()));
  }
  const auto s = build_spline(x, y);
  CHECK(std::abs(s(1.0) - std::sin(1.0)) < 1e-6);

  CHECK_THROWS_AS(build_spline({1.0}, {2.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_spline({1.0, 1.0, 2.0}, {0.0, 0.0, 0.0}),
                  std::invalid_argument);
}

TEST_SUITE_END();
