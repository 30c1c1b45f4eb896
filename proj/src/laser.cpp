#include "sfi/laser.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfi::laser {

using std::numbers::pi;

double PulseSpec::omega() const {
  const double lambda_au = wavelength_nm / kBohrInNm;
  return 2.0 * pi * kSpeedOfLight / lambda_au;
}

double PulseSpec::field_amplitude() const {
  return std::sqrt(peak_intensity / kIntensityAu);
}

double PulseSpec::total_duration() const {
  return n_cycles * 2.0 * pi / omega();
}

double PulseSpec::fwhm_intensity() const {
  // Intensity envelope cos^4; half maximum where cos^2 = 1/sqrt(2).
  return total_duration() * (2.0 / pi) * std::acos(std::pow(2.0, -0.25));
}

PulseSpec make_pulse(double wavelength_nm, double peak_intensity_Wcm2, int n_cycles,
                     double orientation_angle, double carrier_phase) {
  if (!(wavelength_nm > 0.0))
    throw std::invalid_argument("make_pulse: wavelength must be positive");
  if (!(peak_intensity_Wcm2 >= 0.0))
    throw std::invalid_argument("make_pulse: negative intensity");
  if (n_cycles < 2) throw std::invalid_argument("make_pulse: need at least 2 cycles");

  PulseSpec p;
  p.wavelength_nm = wavelength_nm;
  p.peak_intensity = peak_intensity_Wcm2;
  p.n_cycles = n_cycles;
  p.orientation_angle = orientation_angle;
  p.carrier_phase = carrier_phase;
  return p;
}

double vector_potential_at(const PulseSpec& pulse, double t) {
  const double T = pulse.total_duration();
  if (std::abs(t) >= 0.5 * T) return 0.0;
  const double w = pulse.omega();
  const double env = std::cos(pi * t / T);
  return pulse.field_amplitude() / w * env * env * std::sin(w * t + pulse.carrier_phase);
}

double field_at(const PulseSpec& pulse, double t) {
  const double T = pulse.total_duration();
  if (std::abs(t) >= 0.5 * T) return 0.0;
  const double w = pulse.omega();
  const double E0 = pulse.field_amplitude();
  const double ph = w * t + pulse.carrier_phase;
  const double c = std::cos(pi * t / T);

  if (!pulse.envelope_on_vector_potential) {
    // Envelope directly on E. Simpler, but the field area is then not
    // exactly zero; kept for comparisons only.
    return E0 * c * c * std::cos(ph);
  }
  // E = -dA/dt.
  const double s = std::sin(pi * t / T);
  return E0 * ((pi / (w * T)) * 2.0 * c * s * std::sin(ph) - c * c * std::cos(ph));
}

PonderomotiveQuantities ponderomotive(const PulseSpec& pulse) {
  PonderomotiveQuantities q;
  q.omega = pulse.omega();
  const double i_au = pulse.peak_intensity / kIntensityAu;
  q.up = i_au / (4.0 * q.omega * q.omega);
  return q;
}

PonderomotiveQuantities ponderomotive(const PulseSpec& pulse, double ip) {
  if (!(ip > 0.0)) throw std::invalid_argument("ponderomotive: ip must be positive");
  PonderomotiveQuantities q = ponderomotive(pulse);
  q.n_min = static_cast<int>(std::ceil((ip + q.up) / q.omega - 1e-12));
  return q;
}

}  // namespace sfi::laser
