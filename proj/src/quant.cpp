#include "qsafe/quant.hpp"

#include <algorithm>
#include <cmath>

#include "qsafe/errors.hpp"
#include "qsafe/partition.hpp"

namespace qsafe {
namespace {

constexpr double kPosSlack = 1e-6;   // ft, cell-boundary admission slack
constexpr double kAngleSlack = 1e-9;

long floor_cell(double value, double q) {
  return static_cast<long>(std::floor(value / q));
}

// Does the circular arc [b_lo, b_hi] (width <= 2*pi) meet [a_lo, a_hi]?
bool arcs_overlap(double a_lo, double a_hi, double b_lo, double b_hi) {
  double wa = a_hi - a_lo, wb = b_hi - b_lo;
  double d1 = wrap_two_pi(b_lo - a_lo);
  double d2 = wrap_two_pi(a_lo - b_lo);
  return d1 <= wa + kAngleSlack || d2 <= wb + kAngleSlack;
}

struct Range {
  double lo = 0, hi = 0;
};

// Support interval of the region along `dir`; empty optional when the region
// is infeasible. Unbounded directions are a caller bug.
std::optional<Range> support_range(const AhPolytope& p, const Eigen::VectorXd& dir) {
  if ((p.basis().transpose() * dir).isZero(0.0)) {
    double v = dir.dot(p.center());
    return Range{v, v};
  }
  SupportResult lo = minimize(p, dir);
  if (lo.status == LpStatus::Infeasible) return std::nullopt;
  SupportResult hi = maximize(p, dir);
  if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
    fail(ErrorCode::InvalidArgument,
         "possible_quantized_states: region unbounded along a quantized axis");
  return Range{lo.value, hi.value};
}

}  // namespace

int QuantParams::heading_sectors() const {
  return static_cast<int>(std::llround(2.0 * kPi / q_theta));
}

void QuantParams::validate() const {
  if (!(q_pos > 0.0) || !(q_vel > 0.0) || !(q_theta > 0.0))
    fail(ErrorCode::InvalidArgument, "quantization steps must be positive");
  double sectors = 2.0 * kPi / q_theta;
  if (std::abs(sectors - std::round(sectors)) > 1e-9 || sectors < 1.0)
    fail(ErrorCode::InvalidArgument, "heading step must divide the full circle");
  if (v_own_fixed && !(*v_own_fixed > 0.0))
    fail(ErrorCode::InvalidArgument, "fixed ownship speed must be positive");
  if (v_int_fixed && !(*v_int_fixed >= 0.0))
    fail(ErrorCode::InvalidArgument, "fixed intruder speed must be nonnegative");
}

QuantizedState quantize_state(const PlantState& s, const QuantParams& qp) {
  QuantizedState q;
  q.dx = floor_cell(s.x_int - s.x_own, qp.q_pos);
  q.dy = floor_cell(s.y_int - s.y_own, qp.q_pos);
  double heading = wrap_two_pi(std::atan2(s.vy_own, s.vx_own));
  long sectors = qp.heading_sectors();
  q.sector = std::min(static_cast<long>(heading / qp.q_theta), sectors - 1);
  q.v_own = floor_cell(ownship_speed(s), qp.q_vel);
  q.v_int = floor_cell(intruder_speed(s), qp.q_vel);
  return q;
}

NetworkInput dequantize_to_inputs(const QuantizedState& q, const QuantParams& qp) {
  double dx = (static_cast<double>(q.dx) + 0.5) * qp.q_pos;
  double dy = (static_cast<double>(q.dy) + 0.5) * qp.q_pos;
  double heading = (static_cast<double>(q.sector) + 0.5) * qp.q_theta;
  NetworkInput in;
  in.rho = std::hypot(dx, dy);
  in.theta = in.rho > 0.0 ? wrap_pi(std::atan2(dy, dx) - heading) : 0.0;
  in.psi = wrap_pi(-heading);
  in.v_own = qp.v_own_fixed ? *qp.v_own_fixed
                            : (static_cast<double>(q.v_own) + 0.5) * qp.q_vel;
  in.v_int = qp.v_int_fixed ? *qp.v_int_fixed
                            : (static_cast<double>(q.v_int) + 0.5) * qp.q_vel;
  return in;
}

HalfspaceSet cell_halfspaces(const QuantizedState& q, const QuantParams& qp) {
  // State order: x_own y_own vx_own vy_own x_int y_int vx_int vy_int.
  double vo_lo = qp.v_own_fixed ? *qp.v_own_fixed : q.v_own * qp.q_vel;
  double vo_hi = qp.v_own_fixed ? *qp.v_own_fixed : (q.v_own + 1) * qp.q_vel;
  double vi_lo = qp.v_int_fixed ? *qp.v_int_fixed : q.v_int * qp.q_vel;
  double vi_hi = qp.v_int_fixed ? *qp.v_int_fixed : (q.v_int + 1) * qp.q_vel;
  HalfspaceSet poly = velocity_polygon(q.sector * qp.q_theta, (q.sector + 1) * qp.q_theta,
                                       vo_lo, vo_hi);
  int pm = static_cast<int>(poly.rhs.size());
  int rows = 4 + pm + 2 + 2;
  HalfspaceSet out;
  out.lhs = Eigen::MatrixXd::Zero(rows, 8);
  out.rhs.resize(rows);
  int r = 0;
  // relative position cell
  out.lhs(r, 4) = 1;  out.lhs(r, 0) = -1;  out.rhs(r++) = (q.dx + 1) * qp.q_pos;
  out.lhs(r, 0) = 1;  out.lhs(r, 4) = -1;  out.rhs(r++) = -q.dx * qp.q_pos;
  out.lhs(r, 5) = 1;  out.lhs(r, 1) = -1;  out.rhs(r++) = (q.dy + 1) * qp.q_pos;
  out.lhs(r, 1) = 1;  out.lhs(r, 5) = -1;  out.rhs(r++) = -q.dy * qp.q_pos;
  // ownship velocity polygon
  out.lhs.block(r, 2, pm, 2) = poly.lhs;
  out.rhs.segment(r, pm) = poly.rhs;
  r += pm;
  // intruder flies east
  out.lhs(r, 7) = 1;   out.rhs(r++) = 0.0;
  out.lhs(r, 7) = -1;  out.rhs(r++) = 0.0;
  out.lhs(r, 6) = 1;   out.rhs(r++) = vi_hi;
  out.lhs(r, 6) = -1;  out.rhs(r++) = -vi_lo;
  return out;
}

AhPolytope cell_polytope(const QuantizedState& q, const QuantParams& qp) {
  HalfspaceSet hs = cell_halfspaces(q, qp);
  return AhPolytope::from_halfspaces(hs.lhs, hs.rhs);
}

std::vector<QuantizedState> possible_quantized_states(const AhPolytope& region,
                                                      const QuantParams& qp) {
  qp.validate();
  if (region.ambient_dims() != 8)
    fail(ErrorCode::InvalidArgument, "possible_quantized_states: need an 8-d region");
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(8);
  auto axis_range = [&](std::initializer_list<std::pair<int, double>> terms)
      -> std::optional<Range> {
    dir.setZero();
    for (auto [i, w] : terms) dir(i) = w;
    return support_range(region, dir);
  };

  auto rel_x_opt = axis_range({{4, 1.0}, {0, -1.0}});
  auto rel_y_opt = axis_range({{5, 1.0}, {1, -1.0}});
  auto vx_opt = axis_range({{2, 1.0}});
  auto vy_opt = axis_range({{3, 1.0}});
  auto vxi_opt = axis_range({{6, 1.0}});
  if (!rel_x_opt || !rel_y_opt || !vx_opt || !vy_opt || !vxi_opt) return {};
  Range rel_x = *rel_x_opt, rel_y = *rel_y_opt, vx = *vx_opt, vy = *vy_opt,
        vxi = *vxi_opt;

  long dx_lo = floor_cell(rel_x.lo - kPosSlack, qp.q_pos);
  long dx_hi = floor_cell(rel_x.hi + kPosSlack, qp.q_pos);
  long dy_lo = floor_cell(rel_y.lo - kPosSlack, qp.q_pos);
  long dy_hi = floor_cell(rel_y.hi + kPosSlack, qp.q_pos);

  // Heading sectors subtended by the ownship velocity box.
  long sectors = qp.heading_sectors();
  std::vector<long> sector_cands;
  bool touches_origin = vx.lo <= kPosSlack && vx.hi >= -kPosSlack &&
                        vy.lo <= kPosSlack && vy.hi >= -kPosSlack;
  if (touches_origin) {
    for (long k = 0; k < sectors; ++k) sector_cands.push_back(k);
  } else {
    double corner[4] = {std::atan2(vy.lo, vx.lo), std::atan2(vy.lo, vx.hi),
                        std::atan2(vy.hi, vx.lo), std::atan2(vy.hi, vx.hi)};
    // Wrap the corner angles around the first one; a convex set off the
    // origin subtends less than half a turn so this is well defined.
    double lo = 0.0, hi = 0.0;
    for (int i = 1; i < 4; ++i) {
      double d = std::remainder(corner[i] - corner[0], 2.0 * kPi);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    double arc_lo = wrap_two_pi(corner[0] + lo);
    double arc_w = hi - lo;
    for (long k = 0; k < sectors; ++k) {
      if (arcs_overlap(k * qp.q_theta, (k + 1) * qp.q_theta, arc_lo, arc_lo + arc_w))
        sector_cands.push_back(k);
    }
  }

  // Ownship speed cells from the velocity-box norm range; the polygon for
  // cell i spans radii [i*q*cos(h), (i+1)*q/cos(h)] with h half a sector.
  std::vector<long> vown_cands;
  if (qp.v_own_fixed) {
    vown_cands.push_back(floor_cell(*qp.v_own_fixed, qp.q_vel));
  } else {
    double nx = std::max({0.0, vx.lo, -vx.hi});
    double ny = std::max({0.0, vy.lo, -vy.hi});
    double r_lo = std::hypot(nx, ny);
    double r_hi = 0.0;
    for (double cx : {vx.lo, vx.hi})
      for (double cy : {vy.lo, vy.hi}) r_hi = std::max(r_hi, std::hypot(cx, cy));
    double ch = std::cos(qp.q_theta / 2.0);
    long k_min = std::max(0L, floor_cell(r_lo * ch - kPosSlack, qp.q_vel) - 1);
    long k_max = floor_cell(r_hi / ch + kPosSlack, qp.q_vel) + 1;
    for (long k = k_min; k <= k_max; ++k) {
      if (k * qp.q_vel * ch <= r_hi + kPosSlack &&
          (k + 1) * qp.q_vel / ch >= r_lo - kPosSlack)
        vown_cands.push_back(k);
    }
  }

  std::vector<long> vint_cands;
  if (qp.v_int_fixed) {
    vint_cands.push_back(floor_cell(*qp.v_int_fixed, qp.q_vel));
  } else {
    long k_lo = std::max(0L, floor_cell(vxi.lo - kPosSlack, qp.q_vel));
    long k_hi = std::max(0L, floor_cell(vxi.hi + kPosSlack, qp.q_vel));
    for (long k = k_lo; k <= k_hi; ++k) vint_cands.push_back(k);
  }

  std::vector<QuantizedState> out;
  for (long dx = dx_lo; dx <= dx_hi; ++dx) {
    for (long dy = dy_lo; dy <= dy_hi; ++dy) {
      for (long sec : sector_cands) {
        for (long vo : vown_cands) {
          for (long vi : vint_cands) {
            QuantizedState q{dx, dy, sec, vo, vi};
            HalfspaceSet cell = cell_halfspaces(q, qp);
            AhPolytope cut = intersect_halfspaces(region, cell.lhs, cell.rhs);
            if (is_feasible(cut)) out.push_back(q);
          }
        }
      }
    }
  }
  return out;  // loop order is already lexicographic
}

double rho_min(const QuantizedState& q, const QuantParams& qp) {
  auto axis_dist = [&](long c) {
    double lo = c * qp.q_pos, hi = (c + 1) * qp.q_pos;
    if (lo <= 0.0 && 0.0 <= hi) return 0.0;
    return std::min(std::abs(lo), std::abs(hi));
  };
  return std::hypot(axis_dist(q.dx), axis_dist(q.dy));
}

}  // namespace qsafe
