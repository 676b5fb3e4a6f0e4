#include "qsafe/dynamics.hpp"

#include <cctype>
#include <cmath>

#include "qsafe/errors.hpp"

namespace qsafe {

double wrap_pi(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double wrap_two_pi(double angle) {
  double a = std::fmod(angle, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a = 0.0;
  return a;
}

double turn_rate_deg(Advisory a) {
  switch (a) {
    case Advisory::Coc: return 0.0;
    case Advisory::WeakLeft: return 1.5;
    case Advisory::WeakRight: return -1.5;
    case Advisory::StrongLeft: return 3.0;
    case Advisory::StrongRight: return -3.0;
  }
  fail(ErrorCode::InvalidArgument, "unknown advisory");
}

double turn_rate_rad(Advisory a) { return deg2rad(turn_rate_deg(a)); }

const char* advisory_name(Advisory a) {
  switch (a) {
    case Advisory::Coc: return "COC";
    case Advisory::WeakLeft: return "WL";
    case Advisory::WeakRight: return "WR";
    case Advisory::StrongLeft: return "SL";
    case Advisory::StrongRight: return "SR";
  }
  return "?";
}

const char* advisory_name_lower(Advisory a) {
  switch (a) {
    case Advisory::Coc: return "coc";
    case Advisory::WeakLeft: return "wl";
    case Advisory::WeakRight: return "wr";
    case Advisory::StrongLeft: return "sl";
    case Advisory::StrongRight: return "sr";
  }
  return "?";
}

Advisory advisory_from_name(const std::string& name) {
  std::string up;
  for (char c : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (Advisory a : kAllAdvisories)
    if (up == advisory_name(a)) return a;
  fail(ErrorCode::InvalidArgument, "unknown advisory name: " + name);
}

Eigen::Matrix<double, 8, 1> PlantState::vec() const {
  Eigen::Matrix<double, 8, 1> v;
  v << x_own, y_own, vx_own, vy_own, x_int, y_int, vx_int, vy_int;
  return v;
}

PlantState PlantState::from_vec(const Eigen::Matrix<double, 8, 1>& v) {
  return {v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7)};
}

StateMatrix step_matrix(Advisory a, double dt) {
  const double c = turn_rate_rad(a);
  // Integrals of the velocity rotation: s = sin(c dt)/c, p = (1 - cos(c dt))/c,
  // with series fallbacks so COC degenerates to pure translation.
  double s, p, cosw, sinw;
  const double w = c * dt;
  if (std::abs(c) < 1e-9) {
    s = dt - c * c * dt * dt * dt / 6.0;
    p = c * dt * dt / 2.0;
    cosw = std::cos(w);
    sinw = std::sin(w);
  } else {
    s = std::sin(w) / c;
    p = (1.0 - std::cos(w)) / c;
    cosw = std::cos(w);
    sinw = std::sin(w);
  }
  StateMatrix m = StateMatrix::Identity();
  m(0, 2) = s;
  m(0, 3) = -p;
  m(1, 2) = p;
  m(1, 3) = s;
  m(2, 2) = cosw;
  m(2, 3) = -sinw;
  m(3, 2) = sinw;
  m(3, 3) = cosw;
  m(4, 6) = dt;
  m(5, 7) = dt;
  return m;
}

StateMatrix back_step_matrix(Advisory a) { return step_matrix(a, -1.0); }

PlantState propagate(const PlantState& s, Advisory a, double dt) {
  return PlantState::from_vec(step_matrix(a, dt) * s.vec());
}

double ownship_speed(const PlantState& s) { return std::hypot(s.vx_own, s.vy_own); }
double intruder_speed(const PlantState& s) { return std::hypot(s.vx_int, s.vy_int); }
double separation(const PlantState& s) {
  return std::hypot(s.x_int - s.x_own, s.y_int - s.y_own);
}

NetworkInput state_to_network_inputs(const PlantState& s) {
  double v_own = ownship_speed(s);
  if (v_own <= 0.0)
    fail(ErrorCode::InvalidArgument, "ownship heading undefined at zero speed");
  double heading_own = std::atan2(s.vy_own, s.vx_own);
  double v_int = intruder_speed(s);
  double heading_int = v_int > 0.0 ? std::atan2(s.vy_int, s.vx_int) : 0.0;
  double dx = s.x_int - s.x_own;
  double dy = s.y_int - s.y_own;
  NetworkInput in;
  in.rho = std::hypot(dx, dy);
  in.theta = in.rho > 0.0 ? wrap_pi(std::atan2(dy, dx) - heading_own) : 0.0;
  in.psi = wrap_pi(heading_int - heading_own);
  in.v_own = v_own;
  in.v_int = v_int;
  return in;
}

}  // namespace qsafe
