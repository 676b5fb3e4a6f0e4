#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "qsafe/linprog.hpp"

namespace qsafe {

// Per-dimension interval hull; entries are +-infinity on unbounded dimensions.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

// Affine-transformed H-polytope { basis*alpha + center : cons*alpha <= rhs }.
// Affine images and halfspace cuts are exact and cheap; anything metric goes
// through an LP. Instances are immutable values.
class AhPolytope {
public:
  AhPolytope(Eigen::MatrixXd basis, Eigen::VectorXd center,
             Eigen::MatrixXd cons, Eigen::VectorXd rhs);

  // H-polytope { x : lhs x <= rhs } with an identity parameter basis.
  static AhPolytope from_halfspaces(const Eigen::MatrixXd& lhs,
                                    const Eigen::VectorXd& rhs);
  static AhPolytope box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& cons() const { return cons_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }

  int ambient_dims() const { return static_cast<int>(basis_.rows()); }
  int param_dims() const { return static_cast<int>(basis_.cols()); }
  int constraint_count() const { return static_cast<int>(cons_.rows()); }

  void dump(std::ostream& os) const;  // 17 significant digits, reparse-exact

private:
  Eigen::MatrixXd basis_;
  Eigen::VectorXd center_;
  Eigen::MatrixXd cons_;
  Eigen::VectorXd rhs_;
};

// x -> W x + b applied to every member.
AhPolytope affine_map(const AhPolytope& p, const Eigen::MatrixXd& w,
                      const Eigen::VectorXd& b);
AhPolytope linear_transform(const AhPolytope& p, const Eigen::MatrixXd& w);

// Adds { x : lhs x <= rhs } cuts in ambient space without touching the basis.
AhPolytope intersect_halfspaces(const AhPolytope& p, const Eigen::MatrixXd& lhs,
                                const Eigen::VectorXd& rhs);

struct SupportResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;       // valid when Optimal
  Eigen::VectorXd point;    // ambient-space optimizer, valid when Optimal
};

SupportResult minimize(const AhPolytope& p, const Eigen::VectorXd& direction);
SupportResult maximize(const AhPolytope& p, const Eigen::VectorXd& direction);

bool is_feasible(const AhPolytope& p);
bool contains_point(const AhPolytope& p, const Eigen::VectorXd& x);

// Interval hull per ambient dimension; throws Error{EmptySet} when empty.
Box bounding_box(const AhPolytope& p);

// Chebyshev center after removing the listed ambient dimensions. The reduced
// basis must be square and well conditioned so constraints can be rewritten
// over the remaining coordinates. Constraint rows are unit-normalized first;
// rows forming an equality pair carry no radius term, so a polytope that is
// flat along some direction still yields a centered interior point instead of
// collapsing to an arbitrary vertex. Returns the full ambient point.
Eigen::VectorXd chebyshev_center(const AhPolytope& p,
                                 const std::vector<int>& drop_dims = {});

// Chebyshev center with the loose directions re-centered. When a thin
// direction caps the inscribed ball early, the plain radius LP leaves the
// roomy coordinates at an arbitrary vertex of the optimal face; this variant
// pins the radius near its optimum and then moves each coordinate to the
// midpoint of its remaining interval (L1-projected back to feasibility).
// Preferred for extracting representative interior points.
Eigen::VectorXd deep_center(const AhPolytope& p,
                            const std::vector<int>& drop_dims = {});

}  // namespace qsafe
