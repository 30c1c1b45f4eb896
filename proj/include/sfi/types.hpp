#pragma once

#include <Eigen/Dense>
#include <complex>

namespace sfi {

using Real = double;
using Complex = std::complex<double>;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Atomic units used throughout: hartree, bohr, hbar = m_e = e = 1.
// Time in hbar/hartree, intensity converted through kIntensityAu.

inline constexpr double kSpeedOfLight = 137.035999;      // c in a.u.
inline constexpr double kIntensityAu = 3.5094452e16;     // W/cm^2 of one a.u. of intensity
inline constexpr double kBohrInNm = 0.0529177210903;     // nm per bohr
inline constexpr double kFsPerAtomicTime = 2.4188843265e-2;  // fs per a.u. of time

}  // namespace sfi
