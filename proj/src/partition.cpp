#include "qsafe/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qsafe/errors.hpp"

namespace qsafe {
namespace {

constexpr double kTol = 1e-9;

// Parameter basis for partition regions: the 8-d state expressed through
// (x_own, y_own, vx_own, vy_own, x_int, vx_int). The intruder y-position and
// y-velocity rows are identically zero in the east-flying collision frame,
// and stay zero under the backward dynamics.
Eigen::MatrixXd partition_basis() {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(8, 6);
  v(0, 0) = v(1, 1) = v(2, 2) = v(3, 3) = v(4, 4) = v(6, 5) = 1.0;
  return v;
}

int speed_index(double v, double lo, double q, int count) {
  int i = static_cast<int>(std::floor((v - lo) / q));
  return std::clamp(i, 0, count - 1);
}

}  // namespace

HalfspaceSet velocity_polygon(double theta_lb, double theta_ub, double v_min,
                              double v_max) {
  double width = theta_ub - theta_lb;
  if (!(width > 0.0) || width > kPi / 2.0 + kTol)
    fail(ErrorCode::InvalidArgument, "velocity_polygon: wedge width outside (0, pi/2]");
  if (!(v_max > 0.0) || v_min < 0.0 || v_min > v_max)
    fail(ErrorCode::InvalidArgument, "velocity_polygon: need 0 <= v_min <= v_max, v_max > 0");

  double half = width / 2.0;
  double mid = theta_lb + half;
  int rows = v_min > 0.0 ? 5 : 4;
  HalfspaceSet out;
  out.lhs.resize(rows, 2);
  out.rhs.resize(rows);
  // wedge sides: angle at or above theta_lb, at or below theta_ub
  out.lhs.row(0) << std::sin(theta_lb), -std::cos(theta_lb);
  out.rhs(0) = 0.0;
  out.lhs.row(1) << -std::sin(theta_ub), std::cos(theta_ub);
  out.rhs(1) = 0.0;
  // outer tangents at both wedge edges
  out.lhs.row(2) << std::cos(theta_lb), std::sin(theta_lb);
  out.rhs(2) = v_max;
  out.lhs.row(3) << std::cos(theta_ub), std::sin(theta_ub);
  out.rhs(3) = v_max;
  if (v_min > 0.0) {
    // inner chord between the two radius-v_min wedge corners
    out.lhs.row(4) << -std::cos(mid), -std::sin(mid);
    out.rhs(4) = -v_min * std::cos(half);
  }
  return out;
}

std::vector<std::pair<long, long>> disk_cover_cells(double radius, double q_pos) {
  if (!(radius > 0.0) || !(q_pos > 0.0))
    fail(ErrorCode::InvalidArgument, "disk_cover_cells: radius and step must be positive");
  std::vector<std::pair<long, long>> out;
  long span = static_cast<long>(std::ceil(radius / q_pos)) + 1;
  auto axis_dist = [&](long c) {
    double lo = c * q_pos, hi = (c + 1) * q_pos;
    if (lo <= 0.0 && 0.0 <= hi) return 0.0;
    return std::min(std::abs(lo), std::abs(hi));
  };
  for (long ix = -span; ix < span; ++ix) {
    for (long iy = -span; iy < span; ++iy) {
      double d = std::hypot(axis_dist(ix), axis_dist(iy));
      if (d < radius) out.emplace_back(ix, iy);  // closed cell, open disk
    }
  }
  return out;  // loop order is lexicographic
}

std::vector<SpeedInterval> partition_speed_range(double lo, double hi, double q) {
  if (!(q > 0.0) || lo < 0.0 || hi < lo)
    fail(ErrorCode::InvalidArgument, "partition_speed_range: bad range");
  if (hi == lo) return {{lo, lo}};
  int n = static_cast<int>(std::ceil((hi - lo) / q - kTol));
  std::vector<SpeedInterval> out;
  for (int i = 0; i < n; ++i)
    out.push_back({lo + i * q, std::min(hi, lo + (i + 1) * q)});
  return out;
}

PlantState canonicalize_frame(const PlantState& s) {
  double v_int = intruder_speed(s);
  if (v_int <= 0.0) return s;
  double heading = std::atan2(s.vy_int, s.vx_int);
  double c = std::cos(-heading), sn = std::sin(-heading);
  auto rot = [&](double x, double y) {
    return std::pair<double, double>{c * x - sn * y, sn * x + c * y};
  };
  PlantState out;
  std::tie(out.x_own, out.y_own) = rot(s.x_own, s.y_own);
  std::tie(out.vx_own, out.vy_own) = rot(s.vx_own, s.vy_own);
  std::tie(out.x_int, out.y_int) = rot(s.x_int, s.y_int);
  std::tie(out.vx_int, out.vy_int) = rot(s.vx_int, s.vy_int);
  return out;
}

std::string UnsafePartition::descriptor() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "pos(%ld,%ld)|vown(%d)|vint(%d)|th(%ld)|prev(%s)|taudot(%d)",
                pos_ix, pos_iy, vown_idx, vint_idx, sector, advisory_name(alpha_prev),
                tau_dot);
  return buf;
}

PartitionScheme PartitionScheme::make(const QuantParams& qp, double vown_lo,
                                      double vown_hi, double vint_lo, double vint_hi,
                                      TauDotMode mode) {
  qp.validate();
  PartitionScheme s;
  s.params_ = qp;
  if (qp.v_own_fixed && (*qp.v_own_fixed != vown_lo || *qp.v_own_fixed != vown_hi))
    fail(ErrorCode::InvalidArgument, "fixed ownship speed disagrees with its range");
  if (qp.v_int_fixed && (*qp.v_int_fixed != vint_lo || *qp.v_int_fixed != vint_hi))
    fail(ErrorCode::InvalidArgument, "fixed intruder speed disagrees with its range");
  s.pos_cells_ = disk_cover_cells(kCollisionRange, qp.q_pos);
  s.vown_ = partition_speed_range(vown_lo, vown_hi, qp.q_vel);
  s.vint_ = partition_speed_range(vint_lo, vint_hi, qp.q_vel);
  s.vown_lo_ = vown_lo;
  s.vint_lo_ = vint_lo;
  switch (mode) {
    case TauDotMode::Zero: s.tau_dots_ = {0}; break;
    case TauDotMode::MinusOne: s.tau_dots_ = {-1}; break;
    case TauDotMode::Both: s.tau_dots_ = {0, -1}; break;
  }
  if (!(vown_lo > 0.0))
    fail(ErrorCode::InvalidArgument, "ownship speed range must stay positive");
  return s;
}

std::uint64_t PartitionScheme::count() const {
  return static_cast<std::uint64_t>(pos_cells_.size()) * vown_.size() * vint_.size() *
         params_.heading_sectors() * kAdvisoryCount * tau_dots_.size();
}

UnsafePartition PartitionScheme::at(std::uint64_t index) const {
  if (index >= count()) fail(ErrorCode::InvalidArgument, "partition index out of range");
  // Mixed-radix decode in descriptor order, tau-dot label fastest.
  std::uint64_t rest = index;
  std::uint64_t n_tau = tau_dots_.size(), n_prev = kAdvisoryCount,
                n_th = params_.heading_sectors(), n_vi = vint_.size(),
                n_vo = vown_.size();
  std::uint64_t tau_i = rest % n_tau; rest /= n_tau;
  std::uint64_t prev_i = rest % n_prev; rest /= n_prev;
  std::uint64_t th_i = rest % n_th; rest /= n_th;
  std::uint64_t vi_i = rest % n_vi; rest /= n_vi;
  std::uint64_t vo_i = rest % n_vo; rest /= n_vo;
  const auto& cell = pos_cells_[static_cast<size_t>(rest)];
  long pos_ix = cell.first, pos_iy = cell.second;
  long sector = static_cast<long>(th_i);

  const SpeedInterval& vo = vown_[vo_i];
  const SpeedInterval& vi = vint_[vi_i];
  HalfspaceSet poly = velocity_polygon(sector * params_.q_theta,
                                       (sector + 1) * params_.q_theta, vo.lo, vo.hi);
  int pm = static_cast<int>(poly.rhs.size());
  // Parameters: (x_own, y_own, vx_own, vy_own, x_int, vx_int); see
  // partition_basis for the frozen intruder rows.
  int rows = 4 + pm + 2 + 2;
  Eigen::MatrixXd cons = Eigen::MatrixXd::Zero(rows, 6);
  Eigen::VectorXd rhs(rows);
  int r = 0;
  double q = params_.q_pos;
  // relative position (x_int - x_own, -y_own) inside the cell
  cons(r, 4) = 1; cons(r, 0) = -1; rhs(r++) = (pos_ix + 1) * q;
  cons(r, 0) = 1; cons(r, 4) = -1; rhs(r++) = -pos_ix * q;
  cons(r, 1) = -1; rhs(r++) = (pos_iy + 1) * q;
  cons(r, 1) = 1; rhs(r++) = -pos_iy * q;
  cons.block(r, 2, pm, 2) = poly.lhs;
  rhs.segment(r, pm) = poly.rhs;
  r += pm;
  // intruder pinned to the origin at the moment of collision
  cons(r, 4) = 1; rhs(r++) = 0.0;
  cons(r, 4) = -1; rhs(r++) = 0.0;
  cons(r, 5) = 1; rhs(r++) = vi.hi;
  cons(r, 5) = -1; rhs(r++) = -vi.lo;
  return UnsafePartition{index,
                         pos_ix,
                         pos_iy,
                         static_cast<int>(vo_i),
                         static_cast<int>(vi_i),
                         sector,
                         static_cast<Advisory>(prev_i),
                         tau_dots_[static_cast<size_t>(tau_i)],
                         AhPolytope(partition_basis(), Eigen::VectorXd::Zero(8), cons, rhs)};
}

std::optional<std::uint64_t> PartitionScheme::locate(const PlantState& canonical,
                                                     Advisory a_prev, int tau_dot) const {
  auto tau_it = std::find(tau_dots_.begin(), tau_dots_.end(), tau_dot);
  if (tau_it == tau_dots_.end()) return std::nullopt;
  QuantizedState q = quantize_state(canonical, params_);
  auto cell_it = std::lower_bound(pos_cells_.begin(), pos_cells_.end(),
                                  std::make_pair(q.dx, q.dy));
  if (cell_it == pos_cells_.end() || *cell_it != std::make_pair(q.dx, q.dy))
    return std::nullopt;
  double vo = ownship_speed(canonical), vi = intruder_speed(canonical);
  int vo_i = speed_index(vo, vown_lo_, params_.q_vel, static_cast<int>(vown_.size()));
  int vi_i = speed_index(vi, vint_lo_, params_.q_vel, static_cast<int>(vint_.size()));
  if (vo < vown_[vo_i].lo - kTol || vo > vown_[vo_i].hi + kTol) return std::nullopt;
  if (vi < vint_[vi_i].lo - kTol || vi > vint_[vi_i].hi + kTol) return std::nullopt;
  std::uint64_t pos_i = cell_it - pos_cells_.begin();
  std::uint64_t tau_i = tau_it - tau_dots_.begin();
  std::uint64_t idx = pos_i;
  idx = idx * vown_.size() + vo_i;
  idx = idx * vint_.size() + vi_i;
  idx = idx * params_.heading_sectors() + q.sector;
  idx = idx * kAdvisoryCount + static_cast<int>(a_prev);
  idx = idx * tau_dots_.size() + tau_i;
  return idx;
}

std::vector<std::uint64_t> PartitionScheme::locate_all(const PlantState& canonical,
                                                       Advisory a_prev,
                                                       int tau_dot) const {
  std::vector<std::uint64_t> out;
  auto tau_it = std::find(tau_dots_.begin(), tau_dots_.end(), tau_dot);
  if (tau_it == tau_dots_.end()) return out;
  double q = params_.q_pos;
  double dx = canonical.x_int - canonical.x_own;
  double dy = canonical.y_int - canonical.y_own;
  double heading = wrap_two_pi(std::atan2(canonical.vy_own, canonical.vx_own));
  double vo = ownship_speed(canonical), vi = intruder_speed(canonical);
  long sectors = params_.heading_sectors();

  auto cells_for = [&](double value) {
    std::vector<long> cs;
    long base = static_cast<long>(std::floor(value / q));
    for (long c = base - 1; c <= base + 1; ++c)
      if (value >= c * q - kTol && value <= (c + 1) * q + kTol) cs.push_back(c);
    return cs;
  };
  auto speeds_for = [&](double v, double lo, const std::vector<SpeedInterval>& ivals) {
    std::vector<int> is;
    for (int i = 0; i < static_cast<int>(ivals.size()); ++i)
      if (v >= ivals[i].lo - kTol && v <= ivals[i].hi + kTol) is.push_back(i);
    (void)lo;
    return is;
  };
  std::vector<long> secs;
  long base_sec = static_cast<long>(heading / params_.q_theta);
  for (long k = base_sec - 1; k <= base_sec + 1; ++k) {
    long kk = ((k % sectors) + sectors) % sectors;
    double klo = k * params_.q_theta, khi = (k + 1) * params_.q_theta;
    if (heading >= klo - kTol && heading <= khi + kTol) secs.push_back(kk);
  }
  std::sort(secs.begin(), secs.end());
  secs.erase(std::unique(secs.begin(), secs.end()), secs.end());

  for (long cx : cells_for(dx)) {
    for (long cy : cells_for(dy)) {
      auto cell_it = std::lower_bound(pos_cells_.begin(), pos_cells_.end(),
                                      std::make_pair(cx, cy));
      if (cell_it == pos_cells_.end() || *cell_it != std::make_pair(cx, cy)) continue;
      std::uint64_t pos_i = cell_it - pos_cells_.begin();
      for (int vo_i : speeds_for(vo, vown_lo_, vown_)) {
        for (int vi_i : speeds_for(vi, vint_lo_, vint_)) {
          for (long sec : secs) {
            std::uint64_t idx = pos_i;
            idx = idx * vown_.size() + vo_i;
            idx = idx * vint_.size() + vi_i;
            idx = idx * sectors + sec;
            idx = idx * kAdvisoryCount + static_cast<int>(a_prev);
            idx = idx * tau_dots_.size() + (tau_it - tau_dots_.begin());
            out.push_back(idx);
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qsafe
