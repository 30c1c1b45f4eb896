#pragma once

#include "sfi/types.hpp"

namespace sfi::laser {

enum class Orientation { parallel, perpendicular };

//! N-cycle pulse with a cos^2 envelope on the *vector potential*:
//!   A(t) = (E0/w) cos^2(pi t / T) sin(w t + cep),   t in [-T/2, T/2],
//!   E(t) = -dA/dt,
//! which makes the electric field integrate to zero exactly. T is the
//! total duration n_cycles * 2 pi / w.
struct PulseSpec {
  double wavelength_nm = 0.0;
  double peak_intensity = 0.0;  // W/cm^2
  int n_cycles = 0;
  double orientation_angle = 0.0;  // radians; 0 parallel, pi/2 perpendicular
  double carrier_phase = 0.0;
  bool envelope_on_vector_potential = true;

  double omega() const;            // hartree
  double field_amplitude() const;  // E0 in a.u.
  double total_duration() const;   // a.u. of time
  double fwhm_intensity() const;   // a.u. of time
};

PulseSpec make_pulse(double wavelength_nm, double peak_intensity_Wcm2, int n_cycles,
                     double orientation_angle = 0.0, double carrier_phase = 0.0);

//! Electric field at time t; zero outside [-T/2, T/2].
double field_at(const PulseSpec& pulse, double t);
double vector_potential_at(const PulseSpec& pulse, double t);

struct PonderomotiveQuantities {
  double up = 0.0;     // quiver energy, hartree
  double omega = 0.0;  // photon energy, hartree
  int n_min = -1;      // minimum photon number, set when an Ip was given
};

PonderomotiveQuantities ponderomotive(const PulseSpec& pulse);
PonderomotiveQuantities ponderomotive(const PulseSpec& pulse, double ip);

}  // namespace sfi::laser
