#pragma once

#include <functional>
#include <stdexcept>

#include "sfi/types.hpp"

namespace sfi::ode {

struct Options {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double h_initial = 0.0;  // 0 -> chosen automatically
  double h_max = 0.0;      // 0 -> |t1 - t0|
  long max_steps = 100'000'000;
};

struct Stats {
  long n_steps = 0;
  long n_rejected = 0;
  long n_rhs = 0;
};

//! Thrown when the controller drives the step below the resolution of t.
struct StepSizeError : std::runtime_error {
  double t;
  explicit StepSizeError(double t_) : std::runtime_error("ode: step size underflow"), t(t_) {}
};

using Rhs = std::function<void(double t, const Vector& y, Vector& dydt)>;

//! Integrate y' = f(t, y) from t0 to t1 in place with the embedded
//! Dormand-Prince 5(4) pair. Error is controlled per component against
//! abs_tol + rel_tol * |y|.
Stats integrate_dopri5(const Rhs& f, double t0, double t1, Vector& y,
                       const Options& opt = {});

}  // namespace sfi::ode
