#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

namespace qsafe {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kCollisionRange = 500.0;     // ft, near mid-air collision
inline constexpr double kSensorRange = 60760.0;      // ft, advisory system cutoff

constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

// Wraps into (-pi, pi].
double wrap_pi(double angle);
// Wraps into [0, 2*pi).
double wrap_two_pi(double angle);

// Advisories in network output order; "left" turns counterclockwise.
enum class Advisory : int {
  Coc = 0,
  WeakLeft = 1,
  WeakRight = 2,
  StrongLeft = 3,
  StrongRight = 4,
};
inline constexpr int kAdvisoryCount = 5;
inline constexpr std::array<Advisory, kAdvisoryCount> kAllAdvisories = {
    Advisory::Coc, Advisory::WeakLeft, Advisory::WeakRight,
    Advisory::StrongLeft, Advisory::StrongRight};

double turn_rate_deg(Advisory a);            // deg/s, left positive
double turn_rate_rad(Advisory a);
const char* advisory_name(Advisory a);       // "COC", "WL", ...
const char* advisory_name_lower(Advisory a); // "coc", "wl", ...
Advisory advisory_from_name(const std::string& name);  // case-insensitive

// Ownship at (x_own, y_own) turning per advisory; intruder at (x_int, y_int)
// flying straight. Velocities are ground-frame ft/s.
struct PlantState {
  double x_own = 0, y_own = 0, vx_own = 0, vy_own = 0;
  double x_int = 0, y_int = 0, vx_int = 0, vy_int = 0;

  Eigen::Matrix<double, 8, 1> vec() const;
  static PlantState from_vec(const Eigen::Matrix<double, 8, 1>& v);
};

// Polar encounter features fed to the advisory networks.
struct NetworkInput {
  double rho = 0;     // ft, horizontal separation
  double theta = 0;   // rad, intruder bearing relative to ownship heading
  double psi = 0;     // rad, intruder heading relative to ownship heading
  double v_own = 0;   // ft/s
  double v_int = 0;   // ft/s
};

using StateMatrix = Eigen::Matrix<double, 8, 8>;

// Exact matrix exponential of the turn dynamics over dt seconds. Valid for
// negative dt, which gives the inverse map.
StateMatrix step_matrix(Advisory a, double dt);
StateMatrix back_step_matrix(Advisory a);  // inverse of a one-second step

PlantState propagate(const PlantState& s, Advisory a, double dt);

// Throws Error{InvalidArgument} when the ownship speed is zero (heading
// undefined). A stationary intruder is treated as heading east.
NetworkInput state_to_network_inputs(const PlantState& s);

double ownship_speed(const PlantState& s);
double intruder_speed(const PlantState& s);
double separation(const PlantState& s);

}  // namespace qsafe
