#pragma once

#include <Eigen/Dense>

namespace qsafe {

// Tolerances shared by the solver and the polytope layer: kFeasTol decides
// feasibility questions, kOptTol decides optimality of reduced costs.
inline constexpr double kFeasTol = 1e-7;
inline constexpr double kOptTol = 1e-9;

// minimize cost.x  subject to  lhs * x <= rhs,  x free.
struct LpProblem {
  Eigen::VectorXd cost;
  Eigen::MatrixXd lhs;
  Eigen::VectorXd rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;      // valid when status == Optimal
  Eigen::VectorXd point;       // valid when status == Optimal
};

// Dense two-phase simplex over the split form x = u - v with slack variables.
// Dantzig pivoting, falling back to Bland's rule after a run of degenerate
// pivots so cycling cannot occur. Throws Error{LpFailure} if the iteration
// budget is exhausted, which callers must not confuse with infeasibility.
LpSolution lp_solve(const LpProblem& problem);

// Convenience: is {x : lhs x <= rhs} nonempty?
bool lp_feasible(const Eigen::MatrixXd& lhs, const Eigen::VectorXd& rhs);

}  // namespace qsafe
