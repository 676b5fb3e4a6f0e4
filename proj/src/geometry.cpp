#include "qsafe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "qsafe/errors.hpp"

namespace qsafe {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kChebRadiusCap = 1e6;

void write_row(std::ostream& os, const char* tag, const Eigen::VectorXd& v) {
  os << tag;
  char buf[40];
  for (int i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %.17g", v(i));
    os << buf;
  }
  os << '\n';
}

}  // namespace

AhPolytope::AhPolytope(Eigen::MatrixXd basis, Eigen::VectorXd center,
                       Eigen::MatrixXd cons, Eigen::VectorXd rhs)
    : basis_(std::move(basis)), center_(std::move(center)),
      cons_(std::move(cons)), rhs_(std::move(rhs)) {
  if (basis_.rows() != center_.size())
    fail(ErrorCode::InvalidArgument, "AhPolytope: basis rows != center size");
  if (cons_.rows() != rhs_.size())
    fail(ErrorCode::InvalidArgument, "AhPolytope: constraint rows != rhs size");
  if (cons_.rows() > 0 && cons_.cols() != basis_.cols())
    fail(ErrorCode::InvalidArgument, "AhPolytope: constraint cols != basis cols");
  if (cons_.rows() == 0) cons_.resize(0, basis_.cols());
  if (!basis_.allFinite() || !center_.allFinite() || !cons_.allFinite() ||
      !rhs_.allFinite())
    fail(ErrorCode::InvalidArgument, "AhPolytope: non-finite entries");
}

AhPolytope AhPolytope::from_halfspaces(const Eigen::MatrixXd& lhs,
                                       const Eigen::VectorXd& rhs) {
  int n = static_cast<int>(lhs.cols());
  return AhPolytope(Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n),
                    lhs, rhs);
}

AhPolytope AhPolytope::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  int n = static_cast<int>(lo.size());
  if (hi.size() != n) fail(ErrorCode::InvalidArgument, "box: lo/hi size mismatch");
  Eigen::MatrixXd lhs(2 * n, n);
  Eigen::VectorXd rhs(2 * n);
  lhs.topRows(n) = Eigen::MatrixXd::Identity(n, n);
  lhs.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
  rhs.head(n) = hi;
  rhs.tail(n) = -lo;
  return from_halfspaces(lhs, rhs);
}

void AhPolytope::dump(std::ostream& os) const {
  os << "ahpolytope ambient=" << ambient_dims() << " params=" << param_dims()
     << " rows=" << constraint_count() << '\n';
  for (int i = 0; i < basis_.rows(); ++i) write_row(os, "V", basis_.row(i));
  write_row(os, "c", center_);
  for (int i = 0; i < cons_.rows(); ++i) write_row(os, "C", cons_.row(i));
  write_row(os, "d", rhs_);
}

AhPolytope affine_map(const AhPolytope& p, const Eigen::MatrixXd& w,
                      const Eigen::VectorXd& b) {
  if (w.cols() != p.ambient_dims() || b.size() != w.rows())
    fail(ErrorCode::InvalidArgument, "affine_map: dimension mismatch");
  return AhPolytope(w * p.basis(), w * p.center() + b, p.cons(), p.rhs());
}

AhPolytope linear_transform(const AhPolytope& p, const Eigen::MatrixXd& w) {
  return affine_map(p, w, Eigen::VectorXd::Zero(w.rows()));
}

AhPolytope intersect_halfspaces(const AhPolytope& p, const Eigen::MatrixXd& lhs,
                                const Eigen::VectorXd& rhs) {
  if (lhs.cols() != p.ambient_dims() || lhs.rows() != rhs.size())
    fail(ErrorCode::InvalidArgument, "intersect_halfspaces: dimension mismatch");
  Eigen::MatrixXd cons(p.constraint_count() + lhs.rows(), p.param_dims());
  Eigen::VectorXd d(cons.rows());
  cons.topRows(p.constraint_count()) = p.cons();
  d.head(p.constraint_count()) = p.rhs();
  cons.bottomRows(lhs.rows()) = lhs * p.basis();
  d.tail(lhs.rows()) = rhs - lhs * p.center();
  return AhPolytope(p.basis(), p.center(), cons, d);
}

SupportResult minimize(const AhPolytope& p, const Eigen::VectorXd& direction) {
  if (direction.size() != p.ambient_dims())
    fail(ErrorCode::InvalidArgument, "minimize: direction dimension mismatch");
  LpProblem lp{p.basis().transpose() * direction, p.cons(), p.rhs()};
  LpSolution sol = lp_solve(lp);
  SupportResult out;
  out.status = sol.status;
  if (sol.status == LpStatus::Optimal) {
    out.value = direction.dot(p.center()) + sol.objective;
    out.point = p.basis() * sol.point + p.center();
  }
  return out;
}

SupportResult maximize(const AhPolytope& p, const Eigen::VectorXd& direction) {
  SupportResult out = minimize(p, Eigen::VectorXd(-direction));
  if (out.status == LpStatus::Optimal) out.value = -out.value;
  return out;
}

bool is_feasible(const AhPolytope& p) { return lp_feasible(p.cons(), p.rhs()); }

bool contains_point(const AhPolytope& p, const Eigen::VectorXd& x) {
  if (x.size() != p.ambient_dims())
    fail(ErrorCode::InvalidArgument, "contains_point: dimension mismatch");
  Eigen::VectorXd delta = x - p.center();
  double tol = kFeasTol * std::max(1.0, delta.lpNorm<Eigen::Infinity>());
  int m = p.constraint_count();
  int n = p.ambient_dims();
  Eigen::MatrixXd lhs(m + 2 * n, p.param_dims());
  Eigen::VectorXd rhs(m + 2 * n);
  lhs.topRows(m) = p.cons();
  rhs.head(m) = p.rhs();
  lhs.middleRows(m, n) = p.basis();
  rhs.segment(m, n) = delta.array() + tol;
  lhs.bottomRows(n) = -p.basis();
  rhs.tail(n) = -delta.array() + tol;
  return lp_feasible(lhs, rhs);
}

Box bounding_box(const AhPolytope& p) {
  int n = p.ambient_dims();
  Box box{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (p.basis().row(i).isZero(0.0)) {
      // Dimension is pinned by the affine offset; no LP needed, but the set
      // as a whole must still be nonempty.
      if (i == 0 && !is_feasible(p)) fail(ErrorCode::EmptySet, "bounding_box: empty set");
      box.lo(i) = box.hi(i) = p.center()(i);
      continue;
    }
    dir(i) = 1.0;
    SupportResult lo = minimize(p, dir);
    if (lo.status == LpStatus::Infeasible)
      fail(ErrorCode::EmptySet, "bounding_box: empty set");
    box.lo(i) = lo.status == LpStatus::Optimal ? lo.value : -kInf;
    SupportResult hi = maximize(p, dir);
    box.hi(i) = hi.status == LpStatus::Optimal ? hi.value : kInf;
    dir(i) = 0.0;
  }
  return box;
}

namespace {

struct NormRow {
  Eigen::VectorXd a;
  double b = 0;
  bool equality = false;
};

// The polytope rewritten over the kept coordinates with unit-normalized rows
// and opposite-pair rows tagged as equalities (they carry no inflation slack).
struct Reduced {
  Eigen::MatrixXd v_inv;
  Eigen::VectorXd c_red;
  std::vector<NormRow> rows;
};

Reduced reduce_to_kept(const AhPolytope& p, const std::vector<int>& drop_dims,
                       const char* who) {
  const int n = p.ambient_dims();
  std::vector<bool> dropped(n, false);
  for (int d : drop_dims) {
    if (d < 0 || d >= n) fail(ErrorCode::InvalidArgument, std::string(who) + ": bad dim");
    dropped[d] = true;
  }
  std::vector<int> kept;
  for (int i = 0; i < n; ++i)
    if (!dropped[i]) kept.push_back(i);
  const int k = static_cast<int>(kept.size());
  if (k != p.param_dims())
    fail(ErrorCode::DegenerateBasis, std::string(who) + ": reduced basis not square");

  Eigen::MatrixXd v_red(k, k);
  Reduced out;
  out.c_red.resize(k);
  for (int i = 0; i < k; ++i) {
    v_red.row(i) = p.basis().row(kept[i]);
    out.c_red(i) = p.center()(kept[i]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v_red, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smin = svd.singularValues()(k - 1);
  double smax = svd.singularValues()(0);
  if (smin <= 1e-12 * std::max(1.0, smax))
    fail(ErrorCode::DegenerateBasis, std::string(who) + ": reduced basis singular");
  out.v_inv = svd.solve(Eigen::MatrixXd::Identity(k, k));

  // (C V^-1) x <= d + (C V^-1) c over the kept coordinates.
  Eigen::MatrixXd a = p.cons() * out.v_inv;
  Eigen::VectorXd b = p.rhs() + a * out.c_red;
  for (int i = 0; i < a.rows(); ++i) {
    double norm = a.row(i).norm();
    if (norm <= 1e-12) {
      if (b(i) < -kFeasTol * std::max(1.0, p.rhs().lpNorm<Eigen::Infinity>()))
        fail(ErrorCode::EmptySet, std::string(who) + ": empty set");
      continue;
    }
    out.rows.push_back({a.row(i).transpose() / norm, b(i) / norm, false});
  }
  auto& rows = out.rows;
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = i + 1; j < rows.size(); ++j) {
      if ((rows[i].a + rows[j].a).lpNorm<Eigen::Infinity>() < 1e-9 &&
          std::abs(rows[i].b + rows[j].b) < kFeasTol * std::max(1.0, std::abs(rows[i].b))) {
        rows[i].equality = rows[j].equality = true;
      }
    }
  }
  return out;
}

// Variables (x, r): maximize r subject to a.x + r <= b on inequality rows.
// Returns the point and the radius.
std::pair<Eigen::VectorXd, double> solve_radius(const Reduced& red, const char* who) {
  const int k = static_cast<int>(red.c_red.size());
  const int m = static_cast<int>(red.rows.size());
  Eigen::MatrixXd lhs(m + 2, k + 1);
  Eigen::VectorXd rhs(m + 2);
  for (int i = 0; i < m; ++i) {
    lhs.block(i, 0, 1, k) = red.rows[i].a.transpose();
    lhs(i, k) = red.rows[i].equality ? 0.0 : 1.0;
    rhs(i) = red.rows[i].b;
  }
  lhs.row(m).setZero();
  lhs(m, k) = -1.0;
  rhs(m) = 0.0;  // r >= 0
  lhs.row(m + 1).setZero();
  lhs(m + 1, k) = 1.0;
  rhs(m + 1) = kChebRadiusCap;  // keeps the LP bounded on unbounded sets
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(k + 1);
  cost(k) = -1.0;

  LpSolution sol = lp_solve({cost, lhs, rhs});
  if (sol.status == LpStatus::Infeasible)
    fail(ErrorCode::EmptySet, std::string(who) + ": empty set");
  if (sol.status != LpStatus::Optimal)
    fail(ErrorCode::LpFailure, std::string(who) + ": LP did not converge");
  return {sol.point.head(k), sol.point(k)};
}

Eigen::VectorXd to_ambient(const AhPolytope& p, const Reduced& red,
                           const Eigen::VectorXd& x_red) {
  Eigen::VectorXd alpha = red.v_inv * (x_red - red.c_red);
  return p.basis() * alpha + p.center();
}

}  // namespace

Eigen::VectorXd chebyshev_center(const AhPolytope& p,
                                 const std::vector<int>& drop_dims) {
  Reduced red = reduce_to_kept(p, drop_dims, "chebyshev_center");
  auto [x_red, radius] = solve_radius(red, "chebyshev_center");
  (void)radius;
  return to_ambient(p, red, x_red);
}

Eigen::VectorXd deep_center(const AhPolytope& p, const std::vector<int>& drop_dims) {
  Reduced red = reduce_to_kept(p, drop_dims, "deep_center");
  auto [x0, radius] = solve_radius(red, "deep_center");
  const int k = static_cast<int>(x0.size());
  if (radius >= kChebRadiusCap * 0.5) return to_ambient(p, red, x0);

  // The radius LP leaves coordinates loose whenever a thin direction caps the
  // ball early (the solver then parks them at an arbitrary vertex of the
  // optimal face). Fix the inflation slack just below optimal and move every
  // coordinate to the midpoint of its remaining interval.
  const int m = static_cast<int>(red.rows.size());
  double slack = std::max(0.0, radius * (1.0 - 1e-6) - 1e-12);
  Eigen::MatrixXd lhs(m, k);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    lhs.row(i) = red.rows[i].a.transpose();
    rhs(i) = red.rows[i].b - (red.rows[i].equality ? 0.0 : slack);
  }

  Eigen::VectorXd mid = x0;
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(k);
  for (int j = 0; j < k; ++j) {
    cost(j) = 1.0;
    LpSolution lo = lp_solve({cost, lhs, rhs});
    cost(j) = -1.0;
    LpSolution hi = lp_solve({cost, lhs, rhs});
    cost(j) = 0.0;
    if (lo.status == LpStatus::Optimal && hi.status == LpStatus::Optimal)
      mid(j) = 0.5 * (lo.point(j) + hi.point(j));
  }

  // Nearest feasible point to the midpoint vector in L1: variables (x, t),
  // minimize sum t_j with t_j >= |x_j - mid_j|.
  Eigen::MatrixXd l2(m + 2 * k, 2 * k);
  Eigen::VectorXd r2(m + 2 * k);
  l2.setZero();
  l2.block(0, 0, m, k) = lhs;
  r2.head(m) = rhs;
  for (int j = 0; j < k; ++j) {
    l2(m + 2 * j, j) = 1.0;
    l2(m + 2 * j, k + j) = -1.0;
    r2(m + 2 * j) = mid(j);
    l2(m + 2 * j + 1, j) = -1.0;
    l2(m + 2 * j + 1, k + j) = -1.0;
    r2(m + 2 * j + 1) = -mid(j);
  }
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(2 * k);
  c2.tail(k).setOnes();
  LpSolution sol = lp_solve({c2, l2, r2});
  if (sol.status != LpStatus::Optimal) return to_ambient(p, red, x0);
  return to_ambient(p, red, sol.point.head(k));
}

}  // namespace qsafe
