#include "qsocp/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qsocp/errors.hpp"
#include "qsocp/rng.hpp"

namespace qsocp {

namespace {

struct Builder {
    std::vector<Triplet> Q, A, G;
    std::vector<double> b, h;

    std::size_t eq(double rhs) {
        b.push_back(rhs);
        return b.size() - 1;
    }
    std::size_t ineq(double rhs) {
        h.push_back(rhs);
        return h.size() - 1;
    }

    ProblemData finish(std::size_t n, std::vector<double> q, ConeSpec cone) {
        ProblemData d;
        d.n = n;
        d.p = b.size();
        d.m = h.size();
        d.cone = std::move(cone);
        d.Q = ccs_from_triplets(n, n, Q);
        d.A = ccs_from_triplets(d.p, n, A);
        d.G = ccs_from_triplets(d.m, n, G);
        d.q = std::move(q);
        d.b = std::move(b);
        d.h = std::move(h);
        d.validate();
        return d;
    }
};

}  // namespace

ProblemData gen_portfolio(std::size_t k, std::size_t n_over_k, std::uint64_t seed, double rho) {
    if (k == 0 || n_over_k == 0) throw InvalidProblem("gen_portfolio: sizes must be positive");
    if (!(rho > 0.0)) throw InvalidProblem("gen_portfolio: rho must be positive");
    const std::size_t n = k * n_over_k;
    Rng rng(seed);
    Builder bld;
    // F' omega - zeta = 0, one row per factor.
    for (std::size_t j = 0; j < k; ++j) bld.eq(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (rng.bernoulli(0.7)) bld.A.push_back({j, i, rng.normal()});
        }
    }
    for (std::size_t j = 0; j < k; ++j) bld.A.push_back({j, n + j, -1.0});
    const std::size_t budget = bld.eq(1.0);
    for (std::size_t i = 0; i < n; ++i) bld.A.push_back({budget, i, 1.0});

    const double pi_max = std::sqrt(static_cast<double>(k));
    for (std::size_t i = 0; i < n; ++i) bld.Q.push_back({i, i, rng.uniform(0.0, pi_max)});
    for (std::size_t j = 0; j < k; ++j) bld.Q.push_back({n + j, n + j, 1.0});

    std::vector<double> q(n + k, 0.0);
    for (std::size_t i = 0; i < n; ++i) q[i] = -rng.normal() / (2.0 * rho);

    for (std::size_t i = 0; i < n; ++i) bld.G.push_back({bld.ineq(0.0), i, -1.0});
    return bld.finish(n + k, std::move(q), ConeSpec{n, {}});
}

ProblemData gen_lasso(std::size_t n, std::size_t m_over_n, std::uint64_t seed) {
    if (n == 0 || m_over_n == 0) throw InvalidProblem("gen_lasso: sizes must be positive");
    const std::size_t m = n * m_over_n;
    Rng rng(seed);

    std::vector<Triplet> X;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            if (rng.bernoulli(0.15)) X.push_back({i, j, rng.normal()});
        }
    }
    std::vector<double> v(n, 0.0);
    const double v_std = std::sqrt(1.0 / static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        if (!rng.bernoulli(0.5)) v[j] = rng.normal(0.0, v_std);
    }
    std::vector<double> y(m, 0.0);
    for (const Triplet& t : X) y[t.row] += t.value * v[t.col];
    for (std::size_t i = 0; i < m; ++i) y[i] += rng.normal();

    std::vector<double> xty(n, 0.0);
    for (const Triplet& t : X) xty[t.col] += t.value * y[t.row];
    double lambda = 0.0;
    for (double c : xty) lambda = std::max(lambda, std::abs(c));
    lambda /= 5.0;

    Builder bld;
    for (std::size_t i = 0; i < m; ++i) bld.eq(y[i]);
    for (const Triplet& t : X) {
        bld.A.push_back({t.row, t.col, t.value});
        bld.A.push_back({t.row, n + t.col, -t.value});
    }
    for (std::size_t i = 0; i < m; ++i) bld.A.push_back({i, 2 * n + i, -1.0});
    for (std::size_t i = 0; i < m; ++i) bld.Q.push_back({2 * n + i, 2 * n + i, 1.0});
    for (std::size_t j = 0; j < 2 * n; ++j) bld.G.push_back({bld.ineq(0.0), j, -1.0});

    std::vector<double> q(2 * n + m, 0.0);
    for (std::size_t j = 0; j < 2 * n; ++j) q[j] = lambda;
    return bld.finish(2 * n + m, std::move(q), ConeSpec{2 * n, {}});
}

ProblemData gen_mars_landing(std::size_t N, double tf) {
    if (N < 2) throw InvalidProblem("gen_mars_landing: N must be at least 2");
    if (!(tf > 0.0)) throw InvalidProblem("gen_mars_landing: tf must be positive");
    constexpr std::array<double, 6> x_init{200.0, 0.0, 800.0, -35.0, 0.0, -75.0};
    constexpr double rho1 = 7440.0;
    constexpr double rho2 = 18600.0;
    constexpr double g0 = 3.7114;
    constexpr double theta_max = std::numbers::pi / 12.0;
    constexpr double m_dry = 1505.0;
    constexpr double m_wet = 1905.0;
    constexpr double alpha = 4.53e-4;
    const double dt = tf / static_cast<double>(N);

    constexpr std::size_t stride = 11;
    const std::size_t nvar = stride * (N + 1);
    auto xi = [](std::size_t k, std::size_t i) { return stride * k + i; };
    auto zi = [](std::size_t k) { return stride * k + 6; };
    auto ui = [](std::size_t k, std::size_t i) { return stride * k + 7 + i; };
    auto si = [](std::size_t k) { return stride * k + 10; };

    Builder bld;
    const std::array<double, 6> g{0.0, 0.0, -0.5 * g0 * dt * dt, 0.0, 0.0, -g0 * dt};
    for (std::size_t k = 0; k < N; ++k) {
        // x_{k+1} - A x_k - B u_k = g
        for (std::size_t i = 0; i < 6; ++i) {
            const std::size_t r = bld.eq(g[i]);
            bld.A.push_back({r, xi(k + 1, i), 1.0});
            bld.A.push_back({r, xi(k, i), -1.0});
            if (i < 3) {
                bld.A.push_back({r, xi(k, i + 3), -dt});
                bld.A.push_back({r, ui(k, i), -0.5 * dt * dt});
            } else {
                bld.A.push_back({r, ui(k, i - 3), -dt});
            }
        }
        // z_{k+1} - z_k + alpha dt sigma_k = 0
        const std::size_t r = bld.eq(0.0);
        bld.A.push_back({r, zi(k + 1), 1.0});
        bld.A.push_back({r, zi(k), -1.0});
        bld.A.push_back({r, si(k), alpha * dt});
    }
    for (std::size_t i = 0; i < 6; ++i) bld.A.push_back({bld.eq(x_init[i]), xi(0, i), 1.0});
    bld.A.push_back({bld.eq(std::log(m_wet)), zi(0), 1.0});
    for (std::size_t i = 0; i < 6; ++i) bld.A.push_back({bld.eq(0.0), xi(N, i), 1.0});

    const double cos_theta = std::cos(theta_max);
    for (std::size_t k = 0; k <= N; ++k) {
        const double z0 = std::log(m_wet - alpha * rho2 * static_cast<double>(k) * dt);
        const double mu1 = rho1 * std::exp(-z0);
        const double mu2 = rho2 * std::exp(-z0);
        // mu1 (1 - (z - z0)) <= sigma
        std::size_t r = bld.ineq(-mu1 * (1.0 + z0));
        bld.G.push_back({r, zi(k), -mu1});
        bld.G.push_back({r, si(k), -1.0});
        // sigma <= mu2 (1 - (z - z0))
        r = bld.ineq(mu2 * (1.0 + z0));
        bld.G.push_back({r, si(k), 1.0});
        bld.G.push_back({r, zi(k), mu2});
        // e3' u >= sigma cos(theta_max)
        r = bld.ineq(0.0);
        bld.G.push_back({r, si(k), cos_theta});
        bld.G.push_back({r, ui(k, 2), -1.0});
    }
    bld.G.push_back({bld.ineq(-std::log(m_dry)), zi(N), -1.0});
    const std::size_t l = bld.h.size();
    for (std::size_t k = 0; k <= N; ++k) {
        bld.G.push_back({bld.ineq(0.0), si(k), -1.0});
        for (std::size_t i = 0; i < 3; ++i) bld.G.push_back({bld.ineq(0.0), ui(k, i), -1.0});
    }

    std::vector<double> q(nvar, 0.0);
    q[zi(N)] = -1.0;
    return bld.finish(nvar, std::move(q), ConeSpec{l, std::vector<std::size_t>(N + 1, 4)});
}

namespace {

constexpr std::size_t kNx = 12;
constexpr std::size_t kNu = 4;

// Linearized hover model of a small quadcopter sampled at 0.1 s, in the
// state order (position, velocity, roll/pitch/yaw, body rates).
struct QuadModel {
    std::array<std::array<double, kNx>, kNx> A{};
    std::array<std::array<double, kNu>, kNx> B{};
};

QuadModel quad_model() {
    // Source ordering: (roll, pitch, yaw, position, body rates, velocity).
    constexpr double Ad[kNx][kNx] = {
        {1, 0, 0, 0, 0, 0, 0.1, 0, 0, 0, 0, 0},
        {0, 1, 0, 0, 0, 0, 0, 0.1, 0, 0, 0, 0},
        {0, 0, 1, 0, 0, 0, 0, 0, 0.1, 0, 0, 0},
        {0.0488, 0, 0, 1, 0, 0, 0.0016, 0, 0, 0.0992, 0, 0},
        {0, -0.0488, 0, 0, 1, 0, 0, -0.0016, 0, 0, 0.0992, 0},
        {0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0.0992},
        {0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0},
        {0.9734, 0, 0, 0, 0, 0, 0.0488, 0, 0, 0.9846, 0, 0},
        {0, -0.9734, 0, 0, 0, 0, 0, -0.0488, 0, 0, 0.9846, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0.9846},
    };
    constexpr double Bd[kNx][kNu] = {
        {0, -0.0726, 0, 0.0726},
        {-0.0726, 0, 0.0726, 0},
        {-0.0152, 0.0152, -0.0152, 0.0152},
        {0, -0.0006, 0, 0.0006},
        {0.0006, 0, -0.0006, 0},
        {0.0106, 0.0106, 0.0106, 0.0106},
        {0, -1.4512, 0, 1.4512},
        {-1.4512, 0, 1.4512, 0},
        {-0.3049, 0.3049, -0.3049, 0.3049},
        {0, -0.0236, 0, 0.0236},
        {0.0236, 0, -0.0236, 0},
        {0.2107, 0.2107, 0.2107, 0.2107},
    };
    constexpr std::size_t src[kNx] = {3, 4, 5, 9, 10, 11, 0, 1, 2, 6, 7, 8};
    QuadModel m;
    for (std::size_t i = 0; i < kNx; ++i) {
        for (std::size_t j = 0; j < kNx; ++j) m.A[i][j] = Ad[src[i]][src[j]];
        for (std::size_t j = 0; j < kNu; ++j) m.B[i][j] = Bd[src[i]][j];
    }
    return m;
}

constexpr std::array<double, kNx> kQuadWeights{10, 10, 10, 5, 5, 5, 0, 0, 10, 0, 0, 0};
constexpr std::array<double, kNx> kQuadRef{0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0};

}  // namespace

ProblemData gen_quadcopter_mpc(std::size_t N) {
    if (N < 2) throw InvalidProblem("gen_quadcopter_mpc: N must be at least 2");
    constexpr std::array<double, kNx> x_init{1.0, 0.0, 0.5, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    constexpr double R = 0.1;
    constexpr double u_min = -0.9916;
    constexpr double u_max = 2.4084;
    constexpr double angle = std::numbers::pi / 6.0;
    const QuadModel model = quad_model();

    const std::size_t nx = kNx * (N + 1);
    const std::size_t nvar = nx + kNu * N;
    auto xi = [](std::size_t k, std::size_t i) { return kNx * k + i; };
    auto ui = [nx](std::size_t k, std::size_t i) { return nx + kNu * k + i; };

    Builder bld;
    std::vector<double> q(nvar, 0.0);
    for (std::size_t k = 0; k <= N; ++k) {
        for (std::size_t i = 0; i < kNx; ++i) {
            if (kQuadWeights[i] != 0.0) {
                bld.Q.push_back({xi(k, i), xi(k, i), 2.0 * kQuadWeights[i]});
                q[xi(k, i)] = -2.0 * kQuadWeights[i] * kQuadRef[i];
            }
        }
    }
    for (std::size_t k = 0; k < N; ++k) {
        for (std::size_t i = 0; i < kNu; ++i) bld.Q.push_back({ui(k, i), ui(k, i), 2.0 * R});
    }

    for (std::size_t i = 0; i < kNx; ++i) bld.A.push_back({bld.eq(x_init[i]), xi(0, i), 1.0});
    for (std::size_t k = 0; k < N; ++k) {
        // x_{k+1} - A x_k - B u_k = 0
        for (std::size_t i = 0; i < kNx; ++i) {
            const std::size_t r = bld.eq(0.0);
            bld.A.push_back({r, xi(k + 1, i), 1.0});
            for (std::size_t j = 0; j < kNx; ++j) {
                if (model.A[i][j] != 0.0) bld.A.push_back({r, xi(k, j), -model.A[i][j]});
            }
            for (std::size_t j = 0; j < kNu; ++j) {
                if (model.B[i][j] != 0.0) bld.A.push_back({r, ui(k, j), -model.B[i][j]});
            }
        }
    }

    for (std::size_t k = 0; k <= N; ++k) {
        bld.G.push_back({bld.ineq(1.0), xi(k, 2), -1.0});  // altitude >= -1
        for (std::size_t i : {std::size_t{6}, std::size_t{7}}) {
            bld.G.push_back({bld.ineq(angle), xi(k, i), 1.0});
            bld.G.push_back({bld.ineq(angle), xi(k, i), -1.0});
        }
    }
    for (std::size_t k = 0; k < N; ++k) {
        for (std::size_t i = 0; i < kNu; ++i) {
            bld.G.push_back({bld.ineq(u_max), ui(k, i), 1.0});
            bld.G.push_back({bld.ineq(-u_min), ui(k, i), -1.0});
        }
    }
    const std::size_t l = bld.h.size();
    return bld.finish(nvar, std::move(q), ConeSpec{l, {}});
}

double quadcopter_objective_offset(std::size_t N) {
    double per_stage = 0.0;
    for (std::size_t i = 0; i < kNx; ++i) per_stage += kQuadWeights[i] * kQuadRef[i] * kQuadRef[i];
    return per_stage * static_cast<double>(N + 1);
}

}  // namespace qsocp
