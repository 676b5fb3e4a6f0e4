#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsafe/quant.hpp"

namespace qsafe {

// Convex cover of the annular heading sector {v_min <= |v| <= v_max,
// angle in [theta_lb, theta_ub]} over (vx, vy): two wedge sides, two outer
// tangents, and an inner chord (dropped when v_min is 0). At most 5 rows.
// Requires 0 <= v_min <= v_max, v_max > 0 and a wedge width in (0, pi/2].
HalfspaceSet velocity_polygon(double theta_lb, double theta_ub, double v_min,
                              double v_max);

// Grid cells [ix*q,(ix+1)*q] x [iy*q,(iy+1)*q] that meet the open disk of the
// given radius around the origin, sorted lexicographically.
std::vector<std::pair<long, long>> disk_cover_cells(double radius, double q_pos);

struct SpeedInterval {
  double lo = 0, hi = 0;
};

// Ceiling-division split of [lo, hi] into width-q intervals (last one
// clipped); a one-point range yields the single degenerate interval.
std::vector<SpeedInterval> partition_speed_range(double lo, double hi, double q);

enum class TauDotMode { Zero, MinusOne, Both };

// One element of the unsafe-state cover: a position cell, speed intervals,
// a heading sector, plus the discrete previous-advisory and tau-rate labels.
// The region is an 8-d polytope over a 6-parameter basis (intruder y-position
// and y-velocity are identically zero: the intruder flies east through the
// origin at the moment of collision).
struct UnsafePartition {
  std::uint64_t index = 0;
  long pos_ix = 0, pos_iy = 0;
  int vown_idx = 0, vint_idx = 0;
  long sector = 0;
  Advisory alpha_prev = Advisory::Coc;
  int tau_dot = 0;
  AhPolytope region;

  std::string descriptor() const;
};

// Rotates the ground frame so the intruder flies due east (no-op for a
// stationary intruder). Quantization and partition lookup assume this frame.
PlantState canonicalize_frame(const PlantState& s);

class PartitionScheme {
public:
  static PartitionScheme make(const QuantParams& qp, double vown_lo, double vown_hi,
                              double vint_lo, double vint_hi, TauDotMode mode);

  std::uint64_t count() const;
  UnsafePartition at(std::uint64_t index) const;

  // Index of the partition the quantized closed loop would attribute this
  // canonical-frame state to; empty when outside the scheme.
  std::optional<std::uint64_t> locate(const PlantState& canonical, Advisory a_prev,
                                      int tau_dot) const;
  // Every partition whose closed region contains the state, so callers can
  // treat cell-boundary states fairly.
  std::vector<std::uint64_t> locate_all(const PlantState& canonical, Advisory a_prev,
                                        int tau_dot) const;

  const QuantParams& params() const { return params_; }
  const std::vector<std::pair<long, long>>& pos_cells() const { return pos_cells_; }
  const std::vector<SpeedInterval>& vown_intervals() const { return vown_; }
  const std::vector<SpeedInterval>& vint_intervals() const { return vint_; }
  const std::vector<int>& tau_dots() const { return tau_dots_; }

private:
  QuantParams params_;
  std::vector<std::pair<long, long>> pos_cells_;
  std::vector<SpeedInterval> vown_, vint_;
  std::vector<int> tau_dots_;
  double vown_lo_ = 0, vint_lo_ = 0;
};

}  // namespace qsafe
