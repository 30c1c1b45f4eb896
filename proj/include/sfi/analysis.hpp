#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "sfi/types.hpp"

//! Multiphoton bookkeeping on top of computed yields: channel-closing
//! thresholds, intensity-dependent resonance loci (REMPI), power-law
//! fits of yield vs intensity, orientation ratios, and the scaled
//! one-electron comparison.

namespace sfi::analysis {

//! AC Stark shift of an excitation energy, modeled as linear in the
//! ponderomotive energy: dE(I) = slope * Up(I) + offset. A free
//! (Rydberg-like) upper level shifts by the full Up; tightly bound
//! states shift less, hence the adjustable slope.
struct ShiftModel {
  double slope = 1.0;
  double offset = 0.0;  // hartree

  static ShiftModel ponderomotive() { return {1.0, 0.0}; }
  static ShiftModel affine(double slope, double offset) { return {slope, offset}; }

  //! dE in hartree at the given peak intensity (W/cm^2) and photon
  //! energy (hartree).
  double operator()(double intensity_wcm2, double omega) const;
};

//! Smallest photon count that bridges the gap at zero intensity.
int min_photons(double ip, double omega);

struct ThresholdCurve {
  int n_photons = 0;
  std::vector<double> R;          // bohr
  std::vector<double> intensity;  // W/cm^2 at which the channel closes
};

//! Channel-closing intensities: the n-photon route is open while
//! n*omega >= Ip(R) + Up(I), so each (n, R) pair has the closing
//! intensity I = I0 * 4 omega^2 (n omega - Ip). Points where n photons
//! cannot reach the threshold even at zero field are omitted.
std::vector<ThresholdCurve> channel_thresholds(
    const std::vector<std::pair<double, double>>& ip_curve, double omega,
    int n_min, int n_max);

struct RempiPrediction {
  std::string label;       // which intermediate state
  int n_photons = 0;
  bool vs_wavelength = false;
  //! (R in bohr, I in W/cm^2) pairs, or (wavelength in nm, I) when
  //! vs_wavelength is set.
  std::vector<std::pair<double, double>> locus;
};

//! Fixed photon energy: for each tabulated (R, dE) find the intensity
//! at which n*omega = dE(R) + shift(I). Entries needing negative
//! intensity are dropped.
RempiPrediction rempi_locus_vs_r(
    const std::vector<std::pair<double, double>>& excitation_curve, int n_photons,
    double omega, const ShiftModel& shift, const std::string& label);

//! Fixed excitation energy: for each intensity find the resonant
//! wavelength, i.e. the root of n w^3 - (dE + b) w^2 - a I/4 = 0 in w.
RempiPrediction rempi_locus_vs_wavelength(
    double excitation_energy, int n_photons, const std::vector<double>& intensities,
    const ShiftModel& shift, const std::string& label);

struct FitResult {
  double omega_rate = 0.0;   // 1/a.u. of time
  double exponent = 0.0;
  double residual_norm = 0.0;  // in log space
};

//! Fit Y = Omega * T * (I / I0)^k to (intensity W/cm^2, duration a.u.,
//! yield) records by unweighted least squares on the logged form.
//! Needs at least three records spanning more than one intensity.
FitResult fit_power_law(const std::vector<std::array<double, 3>>& records);

//! Evaluate the fitted form at one (intensity, duration) point.
double power_law_yield(const FitResult& fit, double intensity_wcm2, double duration_au);

struct RatioPoint {
  double intensity = 0.0;
  double ratio = 0.0;
  bool valid = true;  // false where the perpendicular yield vanished
};

//! Pointwise parallel/perpendicular ratio on a shared intensity grid.
std::vector<RatioPoint> orientation_ratio(
    const std::vector<std::pair<double, double>>& parallel,
    const std::vector<std::pair<double, double>>& perpendicular);

struct ScaledYields {
  std::vector<double> values;
  bool validity_warning = false;
};

//! Double the one-electron yields to stand in for two equivalent
//! electrons. The scaling is only trustworthy while ionization stays
//! a small perturbation, so inputs above 10% raise the warning flag.
ScaledYields atomic_comparison(const std::vector<double>& atom_yields);

//! Indices of local maxima whose prominence on the log scale clears
//! 3x the median prominence of all maxima. With two or fewer maxima
//! there is no noise floor to compare against and all are returned.
std::vector<int> find_peaks_log(const std::vector<double>& y);

}  // namespace sfi::analysis
