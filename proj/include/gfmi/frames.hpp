#pragma once

#include <cmath>
#include <stdexcept>

namespace gfmi {

// Instantaneous three-phase quantities (V or A).
struct ThreePhase {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// Stationary two-axis (alpha-beta) quantities.
struct TwoAxis {
  double alpha = 0.0;
  double beta = 0.0;
};

// Rotating-frame quantities.
struct DqPair {
  double d = 0.0;
  double q = 0.0;
};

// Amplitude-invariant Clarke transform, zero-sequence discarded.
inline TwoAxis clarke(const ThreePhase& x) {
  constexpr double k = 2.0 / 3.0;
  constexpr double half_sqrt3 = 0.86602540378443864676;
  return {k * (x.a - 0.5 * x.b - 0.5 * x.c),
          k * (half_sqrt3 * x.b - half_sqrt3 * x.c)};
}

// Inverse Clarke under the zero-sequence-free assumption; outputs sum to 0.
inline ThreePhase inverse_clarke(const TwoAxis& x) {
  constexpr double half_sqrt3 = 0.86602540378443864676;
  return {x.alpha,
          -0.5 * x.alpha + half_sqrt3 * x.beta,
          -0.5 * x.alpha - half_sqrt3 * x.beta};
}

// Rotation alpha-beta -> dq by the electrical angle theta.
inline DqPair park(const TwoAxis& x, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * x.alpha + s * x.beta, -s * x.alpha + c * x.beta};
}

// Rotation dq -> alpha-beta (transpose of park).
inline TwoAxis inverse_park(const DqPair& x, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * x.d - s * x.q, s * x.d + c * x.q};
}

// Four-quadrant electrical angle of a stationary-frame voltage vector, in (-pi, pi].
inline double theta_from_voltage(const TwoAxis& x) {
  if (x.alpha == 0.0 && x.beta == 0.0)
    throw std::domain_error("theta_from_voltage: zero voltage vector has no angle");
  return std::atan2(x.beta, x.alpha);
}

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double theta) {
  constexpr double two_pi = 6.28318530717958647693;
  double w = std::remainder(theta, two_pi);
  if (w <= -3.14159265358979323846) w += two_pi;
  return w;
}

}  // namespace gfmi
