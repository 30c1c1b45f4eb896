#include "sfi/ode.hpp"

#include <algorithm>
#include <cmath>

namespace sfi::ode {

namespace {

// Dormand-Prince RK5(4)7M tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Stats integrate_dopri5(const Rhs& f, double t0, double t1, Vector& y, const Options& opt) {
  Stats st;
  if (t1 == t0) return st;
  if (!(opt.rel_tol > 0.0) || !(opt.abs_tol >= 0.0))
    throw std::invalid_argument("integrate_dopri5: bad tolerances");

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  const double hmax = opt.h_max > 0.0 ? opt.h_max : span;
  const long n = y.size();

  Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

  double t = t0;
  f(t, y, k1);
  ++st.n_rhs;

  double h;
  if (opt.h_initial > 0.0) {
    h = std::min(opt.h_initial, hmax);
  } else {
    // Crude but serviceable first guess from the initial slope.
    const double ny = y.cwiseAbs().maxCoeff() + opt.abs_tol;
    const double nk = k1.cwiseAbs().maxCoeff() + 1e-300;
    h = std::clamp(0.01 * ny / nk, 1e-8 * span, 1e-2 * span);
  }

  while (dir * (t1 - t) > 0.0) {
    if (st.n_steps + st.n_rejected >= opt.max_steps)
      throw StepSizeError(t);
    h = std::min(h, hmax);
    if (dir * (t + dir * h - t1) > 0.0) h = std::abs(t1 - t);
    const double hd = dir * h;
    if (t + hd == t) throw StepSizeError(t);

    ytmp = y + hd * (a21 * k1);
    f(t + c2 * hd, ytmp, k2);
    ytmp = y + hd * (a31 * k1 + a32 * k2);
    f(t + c3 * hd, ytmp, k3);
    ytmp = y + hd * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * hd, ytmp, k4);
    ytmp = y + hd * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * hd, ytmp, k5);
    ytmp = y + hd * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + hd, ytmp, k6);
    ynew = y + hd * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + hd, ynew, k7);
    st.n_rhs += 6;

    // Scaled RMS of the embedded error estimate.
    double err2 = 0.0;
    for (long i = 0; i < n; ++i) {
      const double ei = hd * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                              e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.abs_tol +
                        opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double r = ei / sc;
      err2 += r * r;
    }
    const double err = std::sqrt(err2 / n);

    if (err <= 1.0) {
      t += hd;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      ++st.n_steps;
      const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      ++st.n_rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  return st;
}

}  // namespace sfi::ode
