#pragma once

// Dense reference implementations used to check the sparse solver. Nothing
// here calls into the solver's own linear algebra or cone code.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsocp/ccs.hpp"
#include "qsocp/cones.hpp"
#include "qsocp/ipm.hpp"
#include "qsocp/problem.hpp"
#include "qsocp/rng.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd dense(const qsocp::SparseCCS& a);
/// Full symmetric matrix from its stored upper triangle.
MatrixXd dense_symmetric(const qsocp::SparseCCS& upper);
VectorXd vec(std::span<const double> v);
std::vector<double> stdvec(const VectorXd& v);

/// Matrix of v -> u o v.
MatrixXd arrow(const VectorXd& u, const qsocp::ConeSpec& cone);
VectorXd jordan(const VectorXd& u, const VectorXd& v, const qsocp::ConeSpec& cone);
VectorXd identity(const qsocp::ConeSpec& cone);

/// Nesterov-Todd scaling built block by block from the closed-form scaling
/// point: W is symmetric positive definite with W z = W^-1 s = lambda.
struct DenseScaling {
    MatrixXd W;
    VectorXd lambda;
};
DenseScaling nt_scaling(const VectorXd& s, const VectorXd& z, const qsocp::ConeSpec& cone);

/// Largest a with x + t*dx interior for all t < a, by bisection on the
/// per-block membership test; +inf when no block ever leaves the cone.
double bisect_step(const VectorXd& x, const VectorXd& dx, const qsocp::ConeSpec& cone);
bool interior(const VectorXd& x, const qsocp::ConeSpec& cone);

/// Random cone vector well inside the cone.
VectorXd random_interior(qsocp::Rng& rng, const qsocp::ConeSpec& cone);

/// Random quasi-definite matrix [[P, B'], [B, -N]] with P, N positive
/// definite, returned as the upper triangle with a density-controlled B.
qsocp::SparseCCS random_quasidefinite(qsocp::Rng& rng, std::size_t n1, std::size_t n2,
                                      double density);

/// Residual rows of the linearized homogeneous system at `state` for the
/// right-hand sides (d_x, d_y, d_z, d_tau, d_s, d_kappa). Each block is
/// scaled by 1 + |rhs block|_inf; the largest scaled entry is returned.
struct DirectionRhs {
    VectorXd d_x, d_y, d_z, d_s;
    double d_tau = 0.0;
    double d_kappa = 0.0;
};
DirectionRhs affine_rhs(const qsocp::ProblemData& problem, const qsocp::IterateState& state);
DirectionRhs combined_rhs(const qsocp::ProblemData& problem, const qsocp::IterateState& state,
                          double sigma, const qsocp::Direction& affine);
double direction_residual(const qsocp::ProblemData& problem, const qsocp::IterateState& state,
                          const DirectionRhs& rhs, const qsocp::Direction& dir);

/// Unexpanded KKT matrix [[Q, A', G'], [A, 0, 0], [G, 0, -W'W]].
MatrixXd kkt_matrix(const qsocp::ProblemData& problem, const MatrixXd& W);

/// Convex problem together with its optimal objective from an independent
/// method.
struct OracleInstance {
    qsocp::ProblemData problem;
    double objective = 0.0;
    std::string kind;
};

/// Equality-constrained QP plus one inequality that is slack at the optimum;
/// the optimum solves the dense KKT system.
OracleInstance random_equality_qp(qsocp::Rng& rng);
/// QP with up to 8 linear inequalities, solved by trying every active set.
OracleInstance random_inequality_qp(qsocp::Rng& rng);
/// SOCP (quadratic or linear objective) assembled around a chosen primal-dual
/// pair that satisfies the optimality conditions with strict complementarity.
OracleInstance random_socp(qsocp::Rng& rng, bool quadratic);
/// Random data of a given shape: Q positive definite (zero unless
/// `quadratic`), A of full row rank, G with 60% density. Not necessarily
/// feasible.
qsocp::ProblemData random_problem(qsocp::Rng& rng, std::size_t n, std::size_t p,
                                  const qsocp::ConeSpec& cone, bool quadratic = true);
/// Instance number `index` of the mixed set: cycles through the four kinds.
OracleInstance mixed_instance(std::size_t index, std::uint64_t seed);

/// min 1/2 x'Qx + q'x s.t. Ax = b, Gx <= h by exhaustive active-set search.
/// Q must be positive definite. Returns nullopt when no set qualifies.
std::optional<double> active_set_qp(const MatrixXd& Q, const VectorXd& q, const MatrixXd& A,
                                    const VectorXd& b, const MatrixXd& G, const VectorXd& h);

}  // namespace oracle
