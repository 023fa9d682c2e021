#pragma once

#include <cstddef>
#include <cstdint>

#include "qsocp/problem.hpp"

namespace qsocp {

/// Factor-model portfolio in the transformed variables x = (omega, zeta):
///   minimize 1/2 omega' Pi omega + 1/2 zeta' zeta - (1 / (2 rho)) mu' omega
///   subject to F' omega - zeta = 0,  1' omega = 1,  omega >= 0
/// which is rho (omega' Pi omega + zeta' zeta) - mu' omega scaled by 1/(2 rho).
/// F is n-by-k with 70% nonzero N(0,1) entries, Pi_ii ~ U[0, sqrt(k)],
/// mu_i ~ N(0,1), n = k * n_over_k. Throws InvalidProblem for zero sizes or
/// rho <= 0.
ProblemData gen_portfolio(std::size_t k, std::size_t n_over_k, std::uint64_t seed,
                          double rho = 1.0);

/// LASSO in x = (theta_plus, theta_minus, r):
///   minimize 1/2 r'r + lambda 1'(theta_plus + theta_minus)
///   subject to X theta_plus - X theta_minus - r = y,  theta_plus, theta_minus >= 0
/// X is m-by-n with 15% nonzero N(0,1) entries, y = X v + eps with v_i = 0
/// with probability 1/2 and N(0, 1/n) otherwise, lambda = |X'y|_inf / 5,
/// m = n * m_over_n.
ProblemData gen_lasso(std::size_t n, std::size_t m_over_n, std::uint64_t seed);

/// Powered-descent guidance with lossless convexification. Per node
/// k = 0..N the variables are (x_k in R^6, z_k, u_k in R^3, sigma_k), stored
/// node after node. Throws InvalidProblem for N < 2 or tf <= 0.
ProblemData gen_mars_landing(std::size_t N, double tf_seconds);

/// Linear quadcopter MPC over a 12-state, 4-input hover model with
/// dt = 0.1 s. Variables are x_0..x_N (12 each) followed by u_0..u_{N-1}.
/// The tracking cost sum (x - x_r)' Q (x - x_r) + u' R u is written as
/// 1/2 v' (2 Q) v - (2 Q x_r)' v; the constant x_r' Q x_r (N + 1) is
/// returned by quadcopter_objective_offset. Throws InvalidProblem for N < 2.
ProblemData gen_quadcopter_mpc(std::size_t N);
double quadcopter_objective_offset(std::size_t N);

}  // namespace qsocp
