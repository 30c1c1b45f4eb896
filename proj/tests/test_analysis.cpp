#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sfi/analysis.hpp"
#include "sfi/laser.hpp"

using namespace sfi;
using namespace sfi::analysis;

namespace {
double photon_energy(double wavelength_nm) {
  return laser::make_pulse(wavelength_nm, 1e12, 10).omega();
}
}  // namespace

TEST_SUITE_BEGIN("analysis");

TEST_CASE("shift models evaluate as slope * Up + offset") {
  const double omega = photon_energy(400.0);
  const double up_ref = 1.0 / (4.0 * omega * omega);

  CHECK(std::abs(ShiftModel::ponderomotive()(kIntensityAu, omega) - up_ref) < 1e-12);
  CHECK(ShiftModel::ponderomotive()(0.0, omega) == 0.0);

  const auto affine = ShiftModel::affine(0.9, -0.002);
  CHECK(std::abs(affine(kIntensityAu, omega) - (0.9 * up_ref - 0.002)) < 1e-12);
  CHECK(affine(0.0, omega) == -0.002);
}

TEST_CASE("minimum photon count is the ceiling of Ip over omega") {
  CHECK(min_photons(0.6045, photon_energy(400.0)) == 6);
  CHECK(min_photons(0.5, 0.25) == 2);     // exact multiple stays put
  CHECK(min_photons(0.501, 0.25) == 3);
  CHECK(min_photons(0.05, 0.25) == 1);
  CHECK_THROWS_AS(min_photons(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(min_photons(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("channel closings follow the closed form and nest with n") {
  const double omega = photon_energy(400.0);
  const std::vector<std::pair<double, double>> ip_curve = {
      {1.4, 0.6045}, {2.0, 0.5349}, {2.6, 0.4954}};

  const auto curves = channel_thresholds(ip_curve, omega, 5, 8);
  REQUIRE(!curves.empty());
  for (const auto& c : curves) {
    REQUIRE(c.R.size() == c.intensity.size());
    for (std::size_t i = 0; i < c.R.size(); ++i) {
      double ip = 0.0;
      for (const auto& [R, v] : ip_curve)
        if (R == c.R[i]) ip = v;
      const double expect =
          4.0 * omega * omega * (c.n_photons * omega - ip) * kIntensityAu;
      CHECK(std::abs(c.intensity[i] - expect) < 1e-9 * expect);
      CHECK(c.intensity[i] > 0.0);
    }
  }

  // 5 photons (0.5695 Ha) cannot reach the R = 1.4 threshold, 6 can
  const auto& first = curves.front();
  CHECK(first.n_photons == 5);
  CHECK(first.R.size() == 2);
  CHECK(curves[1].R.size() == 3);

  // curves for larger n close at higher intensity, R by R
  for (std::size_t k = 1; k < curves.size(); ++k)
    for (std::size_t i = 0; i < curves[k].R.size(); ++i)
      for (std::size_t j = 0; j < curves[k - 1].R.size(); ++j)
        if (curves[k - 1].R[j] == curves[k].R[i])
          CHECK(curves[k - 1].intensity[j] < curves[k].intensity[i]);

  CHECK_THROWS_AS(channel_thresholds({}, omega, 5, 8), std::invalid_argument);
  CHECK_THROWS_AS(channel_thresholds(ip_curve, omega, 0, 8), std::invalid_argument);
  CHECK_THROWS_AS(channel_thresholds(ip_curve, omega, 8, 5), std::invalid_argument);
}

TEST_CASE("resonance locus vs R inverts the shift model") {
  const double omega = photon_energy(400.0);
  const std::vector<std::pair<double, double>> excitation = {
      {1.3, 0.430}, {1.4, 0.442}, {1.5, 0.450}, {1.8, 0.510}};
  const int n = 4;

  const auto pred =
      rempi_locus_vs_r(excitation, n, omega, ShiftModel::ponderomotive(), "test");
  CHECK(pred.label == "test");
  CHECK(!pred.vs_wavelength);
  // dE(1.8) = 0.510 already exceeds 4 omega = 0.4556: dropped
  REQUIRE(pred.locus.size() == 3);
  for (std::size_t i = 0; i < pred.locus.size(); ++i) {
    const auto& [R, intensity] = pred.locus[i];
    CHECK(R == excitation[i].first);
    const double expect =
        4.0 * omega * omega * (n * omega - excitation[i].second) * kIntensityAu;
    CHECK(std::abs(intensity - expect) < 1e-9 * expect);
  }

  CHECK_THROWS_AS(rempi_locus_vs_r({}, n, omega, ShiftModel::ponderomotive(), "x"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      rempi_locus_vs_r(excitation, n, omega, ShiftModel::affine(0.0, 0.01), "x"),
      std::invalid_argument);
}

TEST_CASE("calibrated resonance tracks into the expected wavelength window") {
  // calibrate the excitation energy so a five-photon resonance sits at
  // 407 nm for a 5e12 pulse under the affine shift model
  const auto shift = ShiftModel::affine(0.9, -0.002);
  const double w_cal = photon_energy(407.0);
  const double i_cal = 5e12;
  const double delta_e = 5.0 * w_cal - shift(i_cal, w_cal);
  CHECK(std::abs(delta_e - 0.559187) < 5e-6);

  const auto pred = rempi_locus_vs_wavelength(delta_e, 5, {i_cal, 7e13}, shift, "cal");
  CHECK(pred.vs_wavelength);
  REQUIRE(pred.locus.size() == 2);
  CHECK(std::abs(pred.locus[0].first - 407.0) < 1e-6);

  const double lam = pred.locus[1].first;
  CHECK(std::abs(lam - 387.0) < 2.0);

  // the reported wavelength satisfies the cubic it was solved from
  const double w = photon_energy(lam);
  const double res = 5.0 * w * w * w - (delta_e + shift.offset) * w * w -
                     shift.slope * (7e13 / kIntensityAu) / 4.0;
  CHECK(std::abs(res) < 1e-12);

  // stronger field, larger blue shift: the locus moves to shorter waves
  CHECK(lam < pred.locus[0].first);
}

TEST_CASE("without a shift the resonant wavelength ignores intensity") {
  const auto pred = rempi_locus_vs_wavelength(0.5, 4, {1e12, 1e13, 1e14},
                                              ShiftModel::affine(0.0, 0.0), "flat");
  REQUIRE(pred.locus.size() == 3);
  const double expect = 2.0 * std::numbers::pi * kSpeedOfLight / 0.125 * kBohrInNm;
  for (const auto& [lam, intensity] : pred.locus)
    CHECK(std::abs(lam - expect) < 1e-9);

  CHECK_THROWS_AS(rempi_locus_vs_wavelength(-0.5, 4, {1e12}, ShiftModel::ponderomotive(), "x"),
                  std::invalid_argument);
  CHECK_THROWS_AS(rempi_locus_vs_wavelength(0.5, 0, {1e12}, ShiftModel::ponderomotive(), "x"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      rempi_locus_vs_wavelength(0.5, 4, {1e12}, ShiftModel::affine(1.0, -0.6), "x"),
      std::invalid_argument);
}

TEST_CASE("power-law fit recovers synthetic rate constants exactly") {
  const double rate = 2.5e5, k = 3.7;
  std::vector<std::array<double, 3>> records;
  for (int i = 0; i < 8; ++i) {
    const double intensity = 1e13 * std::pow(10.0, i / 7.0);
    const double duration = (i % 2 == 0) ? 413.4 : 826.8;
    records.push_back(
        {intensity, duration,
         rate * duration * std::pow(intensity / kIntensityAu, k)});
  }
  const auto fit = fit_power_law(records);
  CHECK(std::abs(fit.omega_rate - rate) < 1e-10 * rate);
  CHECK(std::abs(fit.exponent - k) < 1e-10);
  CHECK(fit.residual_norm < 1e-12);

  const double y = power_law_yield(fit, 5e13, 600.0);
  CHECK(std::abs(y - rate * 600.0 * std::pow(5e13 / kIntensityAu, k)) < 1e-10 * y);
}

TEST_CASE("reference rate constants put the saturation yield near 3e-2") {
  FitResult fit;
  fit.omega_rate = 1.55e6;
  fit.exponent = 4.17;
  const double y = power_law_yield(fit, 1e14, 826.8);
  CHECK(std::abs(y - 0.0311) < 5e-4);
}

TEST_CASE("power-law fit validates its input") {
  std::vector<std::array<double, 3>> two = {{1e13, 400.0, 1e-4}, {2e13, 400.0, 1e-3}};
  CHECK_THROWS_AS(fit_power_law(two), std::invalid_argument);

  std::vector<std::array<double, 3>> same = {
      {1e13, 400.0, 1e-4}, {1e13, 800.0, 2e-4}, {1e13, 400.0, 1.1e-4}};
  CHECK_THROWS_AS(fit_power_law(same), std::invalid_argument);

  std::vector<std::array<double, 3>> bad = {
      {1e13, 400.0, 1e-4}, {2e13, 400.0, 0.0}, {4e13, 400.0, 1e-3}};
  CHECK_THROWS_AS(fit_power_law(bad), std::invalid_argument);
}

TEST_CASE("orientation ratios divide pointwise and flag empty denominators") {
  std::vector<std::pair<double, double>> par = {{1e13, 2e-6}, {2e13, 4e-5}, {4e13, 0.01}};
  std::vector<std::pair<double, double>> perp = {{1e13, 1e-6}, {2e13, 0.0}, {4e13, 0.002}};

  const auto pts = orientation_ratio(par, perp);
  REQUIRE(pts.size() == 3);
  CHECK(std::abs(pts[0].ratio - 2.0) < 1e-12);
  CHECK(pts[0].valid);
  CHECK(!pts[1].valid);
  CHECK(std::abs(pts[2].ratio - 5.0) < 1e-12);

  const auto ones = orientation_ratio(par, par);
  for (const auto& p : ones) CHECK(std::abs(p.ratio - 1.0) < 1e-12);

  CHECK_THROWS_AS(orientation_ratio(par, {perp[0], perp[1]}), std::invalid_argument);
  std::vector<std::pair<double, double>> shifted = {{1.5e13, 1e-6}, {2e13, 1.0}, {4e13, 1.0}};
  CHECK_THROWS_AS(orientation_ratio(par, shifted), std::invalid_argument);
}

TEST_CASE("one-electron yields double, out-of-range inputs refuse") {
  const auto ok = atomic_comparison({0.0, 1e-4, 0.05});
  CHECK(!ok.validity_warning);
  CHECK(ok.values == std::vector<double>{0.0, 2e-4, 0.1});

  CHECK(atomic_comparison({0.2}).validity_warning);
  CHECK_THROWS_AS(atomic_comparison({-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(atomic_comparison({1.0}), std::invalid_argument);
}

TEST_CASE("log-scale peak finding keeps the comb, drops the ripple") {
  // three decades of comb over a rippled background
  std::vector<double> y(60, 1e-9);
  for (int i = 1; i + 1 < 60; ++i) y[i] = 1e-9 * (1.0 + 0.2 * ((i % 3) == 0));
  y[10] = 1e-5;
  y[25] = 3e-6;
  y[40] = 1e-6;
  const auto peaks = find_peaks_log(y);
  CHECK(peaks == std::vector<int>{10, 25, 40});

  // two maxima: no noise floor to vote against, both come back
  std::vector<double> two(20, 1e-9);
  two[5] = 1e-8;
  two[12] = 2e-6;
  CHECK(find_peaks_log(two) == std::vector<int>{5, 12});

  CHECK(find_peaks_log({1.0, 2.0}).empty());
  std::vector<double> ramp = {1.0, 2.0, 4.0, 8.0, 16.0};
  CHECK(find_peaks_log(ramp).empty());
}

TEST_SUITE_END();
