#include "qsafe/linprog.hpp"

#include <cmath>
#include <vector>

#include "qsafe/errors.hpp"

namespace qsafe {
namespace {

constexpr double kPivotTol = 1e-9;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Tableau {
  RowMatrix rows;             // m x (ncols + 1), last column is the rhs
  Eigen::RowVectorXd reduced; // 1 x (ncols + 1) reduced-cost row
  std::vector<int> basis;     // basic column per row
  int ncols = 0;

  void pivot(int r, int j) {
    rows.row(r) /= rows(r, j);
    for (int i = 0; i < rows.rows(); ++i) {
      if (i == r) continue;
      double f = rows(i, j);
      if (f != 0.0) rows.row(i) -= f * rows.row(r);
    }
    double f = reduced(j);
    if (f != 0.0) reduced -= f * rows.row(r);
    basis[r] = j;
  }
};

// Reduced costs c_j - c_B B^-1 A_j for the current basis.
void build_reduced(Tableau& t, const Eigen::VectorXd& cost) {
  t.reduced.setZero(t.ncols + 1);
  t.reduced.head(t.ncols) = cost.transpose();
  for (int r = 0; r < t.rows.rows(); ++r) {
    double cb = cost(t.basis[r]);
    if (cb != 0.0) t.reduced -= cb * t.rows.row(r);
  }
}

enum class RunResult { Optimal, Unbounded };

// Runs simplex iterations until optimal/unbounded. `allowed` limits the
// entering columns (used to freeze artificials out of phase 2).
RunResult run_simplex(Tableau& t, int allowed, long& budget) {
  int degenerate_run = 0;
  bool bland = false;
  while (true) {
    if (--budget < 0) fail(ErrorCode::LpFailure, "simplex iteration budget exhausted");
    int enter = -1;
    if (bland) {
      for (int j = 0; j < allowed; ++j) {
        if (t.reduced(j) < -kOptTol) { enter = j; break; }
      }
    } else {
      double best = -kOptTol;
      for (int j = 0; j < allowed; ++j) {
        if (t.reduced(j) < best) { best = t.reduced(j); enter = j; }
      }
    }
    if (enter < 0) return RunResult::Optimal;

    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < t.rows.rows(); ++r) {
      double a = t.rows(r, enter);
      if (a <= kPivotTol) continue;
      double ratio = t.rows(r, t.ncols) / a;
      if (leave < 0 || ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && t.basis[r] < t.basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return RunResult::Unbounded;

    bool degenerate = t.rows(leave, t.ncols) <= 1e-12;
    if (degenerate) {
      if (++degenerate_run >= 64) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
    t.pivot(leave, enter);
  }
}

}  // namespace

LpSolution lp_solve(const LpProblem& problem) {
  const int n = static_cast<int>(problem.cost.size());
  const int m = static_cast<int>(problem.rhs.size());
  if (problem.lhs.rows() != m || problem.lhs.cols() != n)
    fail(ErrorCode::InvalidArgument, "lp_solve: inconsistent dimensions");
  if (!problem.cost.allFinite() || !problem.lhs.allFinite() || !problem.rhs.allFinite())
    fail(ErrorCode::InvalidArgument, "lp_solve: non-finite input");

  // Split form: columns are [u(n) | v(n) | slack(m) | artificial(p)].
  // Rows with negative rhs are negated, so their slack enters with -1 and an
  // artificial is needed to complete the starting basis.
  std::vector<int> art_rows;
  for (int r = 0; r < m; ++r)
    if (problem.rhs(r) < 0.0) art_rows.push_back(r);
  const int p = static_cast<int>(art_rows.size());
  const int ncols = 2 * n + m + p;

  Tableau t;
  t.ncols = ncols;
  t.rows.setZero(m, ncols + 1);
  t.basis.assign(m, 0);
  for (int r = 0; r < m; ++r) {
    double sign = problem.rhs(r) < 0.0 ? -1.0 : 1.0;
    t.rows.block(r, 0, 1, n) = sign * problem.lhs.row(r);
    t.rows.block(r, n, 1, n) = -sign * problem.lhs.row(r);
    t.rows(r, 2 * n + r) = sign;
    t.rows(r, ncols) = sign * problem.rhs(r);
    t.basis[r] = 2 * n + r;
  }
  for (int k = 0; k < p; ++k) {
    t.rows(art_rows[k], 2 * n + m + k) = 1.0;
    t.basis[art_rows[k]] = 2 * n + m + k;
  }

  long budget = 2000L + 200L * (static_cast<long>(m) + ncols);

  if (p > 0) {
    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(ncols);
    phase1_cost.tail(p).setConstant(1.0);
    build_reduced(t, phase1_cost);
    run_simplex(t, ncols, budget);  // phase 1 cannot be unbounded

    double residual = 0.0;
    for (int r = 0; r < m; ++r)
      if (t.basis[r] >= 2 * n + m) residual += t.rows(r, ncols);
    double scale = std::max(1.0, problem.rhs.lpNorm<Eigen::Infinity>());
    if (residual > kFeasTol * scale) return {LpStatus::Infeasible, 0.0, {}};

    // Drive remaining artificials out of the basis; rows that cannot pivot
    // are redundant and get dropped.
    std::vector<int> keep;
    for (int r = 0; r < m; ++r) {
      if (t.basis[r] < 2 * n + m) { keep.push_back(r); continue; }
      int col = -1;
      for (int j = 0; j < 2 * n + m; ++j)
        if (std::abs(t.rows(r, j)) > 1e-7) { col = j; break; }
      if (col >= 0) {
        t.pivot(r, col);
        keep.push_back(r);
      }
    }
    if (static_cast<int>(keep.size()) < m) {
      RowMatrix pruned(keep.size(), ncols + 1);
      std::vector<int> pruned_basis;
      for (size_t i = 0; i < keep.size(); ++i) {
        pruned.row(static_cast<int>(i)) = t.rows.row(keep[i]);
        pruned_basis.push_back(t.basis[keep[i]]);
      }
      t.rows = std::move(pruned);
      t.basis = std::move(pruned_basis);
    }
  }

  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(ncols);
  phase2_cost.head(n) = problem.cost;
  phase2_cost.segment(n, n) = -problem.cost;
  build_reduced(t, phase2_cost);
  if (run_simplex(t, 2 * n + m, budget) == RunResult::Unbounded)
    return {LpStatus::Unbounded, 0.0, {}};

  Eigen::VectorXd split = Eigen::VectorXd::Zero(ncols);
  for (int r = 0; r < t.rows.rows(); ++r) split(t.basis[r]) = t.rows(r, t.ncols);
  LpSolution out;
  out.status = LpStatus::Optimal;
  out.point = split.head(n) - split.segment(n, n);
  out.objective = problem.cost.dot(out.point);
  return out;
}

bool lp_feasible(const Eigen::MatrixXd& lhs, const Eigen::VectorXd& rhs) {
  LpProblem p{Eigen::VectorXd::Zero(lhs.cols()), lhs, rhs};
  return lp_solve(p).status == LpStatus::Optimal;
}

}  // namespace qsafe
