#pragma once

#include <Eigen/Dense>
#include <compare>
#include <optional>
#include <vector>

#include "qsafe/dynamics.hpp"
#include "qsafe/geometry.hpp"

namespace qsafe {

// Grid resolution for the quantized closed loop. Speeds may be pinned to a
// single exact value (degenerate one-point ranges), in which case the speed
// axis is not discretized at all.
struct QuantParams {
  double q_pos = 500.0;                // ft
  double q_vel = 100.0;                // ft/s
  double q_theta = deg2rad(1.5);       // rad; must divide the full circle
  std::optional<double> v_own_fixed;
  std::optional<double> v_int_fixed;

  int heading_sectors() const;
  void validate() const;  // Error{InvalidArgument} on bad quanta
};

// Cell indices: relative position (intruder minus ownship) uses floor cells,
// the ownship heading lives on [0, 2pi) sectors, speeds use floor cells.
struct QuantizedState {
  long dx = 0;
  long dy = 0;
  long sector = 0;
  long v_own = 0;
  long v_int = 0;
  auto operator<=>(const QuantizedState&) const = default;
};

QuantizedState quantize_state(const PlantState& s, const QuantParams& qp);

// Cell-center encounter features: positions at cell midpoints, heading at the
// sector midline, speeds at cell midpoints (or the pinned exact values). The
// intruder is assumed to fly east, so psi is minus the ownship heading.
NetworkInput dequantize_to_inputs(const QuantizedState& q, const QuantParams& qp);

struct HalfspaceSet {
  Eigen::MatrixXd lhs;
  Eigen::VectorXd rhs;
};

// The set of ground-frame states quantizing into (or, for the heading/speed
// axes, covered by the polygon overapproximation of) the given cell, as
// halfspaces over the 8-d plant state.
HalfspaceSet cell_halfspaces(const QuantizedState& q, const QuantParams& qp);
AhPolytope cell_polytope(const QuantizedState& q, const QuantParams& qp);

// All cells whose closed polytope meets the given region, sorted by
// (dx, dy, sector, v_own, v_int). The region must be bounded in relative
// position, ownship velocity and intruder speed.
std::vector<QuantizedState> possible_quantized_states(const AhPolytope& region,
                                                      const QuantParams& qp);

// Smallest separation any state in the cell can have.
double rho_min(const QuantizedState& q, const QuantParams& qp);

}  // namespace qsafe
