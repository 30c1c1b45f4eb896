#include "sfi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace sfi::analysis {

using std::numbers::pi;

double ShiftModel::operator()(double intensity_wcm2, double omega) const {
  const double up = (intensity_wcm2 / kIntensityAu) / (4.0 * omega * omega);
  return slope * up + offset;
}

int min_photons(double ip, double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("min_photons: omega must be positive");
  return static_cast<int>(std::ceil(ip / omega - 1e-12));
}

std::vector<ThresholdCurve> channel_thresholds(
    const std::vector<std::pair<double, double>>& ip_curve, double omega,
    int n_min, int n_max) {
  if (ip_curve.empty()) throw std::invalid_argument("channel_thresholds: empty table");
  if (!(omega > 0.0) || n_min < 1 || n_max < n_min)
    throw std::invalid_argument("channel_thresholds: bad photon range");

  std::vector<ThresholdCurve> out;
  for (int n = n_min; n <= n_max; ++n) {
    ThresholdCurve c;
    c.n_photons = n;
    for (const auto& [R, ip] : ip_curve) {
      const double i_au = 4.0 * omega * omega * (n * omega - ip);
      if (i_au <= 0.0) continue;
      c.R.push_back(R);
      c.intensity.push_back(i_au * kIntensityAu);
    }
    if (!c.R.empty()) out.push_back(std::move(c));
  }
  return out;
}

RempiPrediction rempi_locus_vs_r(
    const std::vector<std::pair<double, double>>& excitation_curve, int n_photons,
    double omega, const ShiftModel& shift, const std::string& label) {
  if (excitation_curve.empty())
    throw std::invalid_argument("rempi_locus: empty excitation table");
  if (shift.slope == 0.0)
    throw std::invalid_argument("rempi_locus: zero slope cannot single out an intensity");

  RempiPrediction pred;
  pred.label = label;
  pred.n_photons = n_photons;
  pred.vs_wavelength = false;
  for (const auto& [R, de] : excitation_curve) {
    const double up = (n_photons * omega - de - shift.offset) / shift.slope;
    if (up < 0.0) continue;
    pred.locus.emplace_back(R, 4.0 * omega * omega * up * kIntensityAu);
  }
  return pred;
}

RempiPrediction rempi_locus_vs_wavelength(
    double excitation_energy, int n_photons, const std::vector<double>& intensities,
    const ShiftModel& shift, const std::string& label) {
  if (!(excitation_energy > 0.0) || n_photons < 1)
    throw std::invalid_argument("rempi_locus: bad excitation energy or photon count");

  RempiPrediction pred;
  pred.label = label;
  pred.n_photons = n_photons;
  pred.vs_wavelength = true;

  const double eb = excitation_energy + shift.offset;
  if (!(eb > 0.0))
    throw std::invalid_argument("rempi_locus: shifted excitation energy not positive");

  for (const double intensity : intensities) {
    const double i_au = intensity / kIntensityAu;
    if (i_au < 0.0) continue;
    const double drive = shift.slope * i_au / 4.0;
    // n w^3 - eb w^2 = drive; left side increases through zero at
    // w = eb/n, so the physical root sits at or above it.
    const auto f = [&](double w) { return w * w * (n_photons * w - eb) - drive; };
    double lo = eb / n_photons;
    if (drive < 0.0) lo *= 0.1;  // attractive shift pulls the root below eb/n
    double hi = eb / n_photons;
    while (f(hi) < 0.0) hi *= 1.5;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < 0.0 ? lo : hi) = mid;
    }
    const double w = 0.5 * (lo + hi);
    pred.locus.emplace_back(2.0 * pi * kSpeedOfLight / w * kBohrInNm, intensity);
  }
  return pred;
}

FitResult fit_power_law(const std::vector<std::array<double, 3>>& records) {
  const int n = static_cast<int>(records.size());
  if (n < 3) throw std::invalid_argument("fit_power_law: need at least three records");

  Matrix design(n, 2);
  Vector target(n);
  for (int i = 0; i < n; ++i) {
    const auto& [intensity, duration, yield] = records[i];
    if (!(intensity > 0.0) || !(duration > 0.0) || !(yield > 0.0))
      throw std::invalid_argument("fit_power_law: records must be positive");
    design(i, 0) = 1.0;
    design(i, 1) = std::log(intensity / kIntensityAu);
    target[i] = std::log(yield / duration);
  }

  const double x_mean = design.col(1).mean();
  const double x_var = (design.col(1).array() - x_mean).square().sum();
  if (x_var < 1e-20)
    throw std::invalid_argument("fit_power_law: all records share one intensity");

  const Vector beta = design.colPivHouseholderQr().solve(target);
  FitResult fit;
  fit.omega_rate = std::exp(beta[0]);
  fit.exponent = beta[1];
  fit.residual_norm = (design * beta - target).norm();
  return fit;
}

double power_law_yield(const FitResult& fit, double intensity_wcm2, double duration_au) {
  return fit.omega_rate * duration_au *
         std::pow(intensity_wcm2 / kIntensityAu, fit.exponent);
}

std::vector<RatioPoint> orientation_ratio(
    const std::vector<std::pair<double, double>>& parallel,
    const std::vector<std::pair<double, double>>& perpendicular) {
  if (parallel.size() != perpendicular.size())
    throw std::invalid_argument("orientation_ratio: grids differ in length");

  std::vector<RatioPoint> out;
  out.reserve(parallel.size());
  for (std::size_t i = 0; i < parallel.size(); ++i) {
    const auto& [ip, yp] = parallel[i];
    const auto& [iq, yq] = perpendicular[i];
    if (std::abs(ip - iq) > 1e-9 * std::max(std::abs(ip), 1.0))
      throw std::invalid_argument("orientation_ratio: intensity grids do not match");
    RatioPoint pt;
    pt.intensity = ip;
    if (yq == 0.0) {
      pt.valid = false;
    } else {
      pt.ratio = yp / yq;
    }
    out.push_back(pt);
  }
  return out;
}

ScaledYields atomic_comparison(const std::vector<double>& atom_yields) {
  ScaledYields out;
  out.values.reserve(atom_yields.size());
  for (const double y : atom_yields) {
    if (!(y >= 0.0) || y >= 1.0)
      throw std::invalid_argument("atomic_comparison: yields must lie in [0, 1)");
    if (y > 0.1) out.validity_warning = true;
    out.values.push_back(2.0 * y);
  }
  return out;
}

std::vector<int> find_peaks_log(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  if (n < 3) return {};

  double top = 0.0;
  for (const double v : y) top = std::max(top, v);
  if (top <= 0.0) return {};
  const double floor_val = 1e-300 * top;
  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) z[i] = std::log(std::max(y[i], floor_val));

  std::vector<int> maxima;
  for (int i = 1; i + 1 < n; ++i)
    if (z[i] > z[i - 1] && z[i] > z[i + 1]) maxima.push_back(i);
  if (maxima.size() <= 2) return maxima;

  // Prominence: drop from the peak to the highest of the two valley
  // floors that separate it from taller terrain (or the series edge).
  std::vector<double> prom(maxima.size());
  for (std::size_t k = 0; k < maxima.size(); ++k) {
    const int i = maxima[k];
    double left_min = z[i];
    for (int j = i - 1; j >= 0 && z[j] <= z[i]; --j) left_min = std::min(left_min, z[j]);
    double right_min = z[i];
    for (int j = i + 1; j < n && z[j] <= z[i]; ++j) right_min = std::min(right_min, z[j]);
    prom[k] = z[i] - std::max(left_min, right_min);
  }

  std::vector<double> sorted = prom;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];

  std::vector<int> keep;
  for (std::size_t k = 0; k < maxima.size(); ++k)
    if (prom[k] > 3.0 * median) keep.push_back(maxima[k]);
  return keep;
}

}  // namespace sfi::analysis
