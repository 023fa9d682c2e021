#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "qsocp/amd.hpp"
#include "qsocp/errors.hpp"
#include "qsocp/generators.hpp"
#include "qsocp/kkt.hpp"
#include "qsocp/plan.hpp"

using namespace qsocp;
using oracle::MatrixXd;
using oracle::VectorXd;

namespace {

ProblemData tiny_qp() {
    ProblemData pd = make_problem(1, 0, ConeSpec{1, {}});
    pd.Q = ccs_identity(1, 2.0);
    pd.G = ccs_identity(1, 1.0);
    pd.q = {-2.0};
    pd.h = {0.0};
    return pd;
}

KKTSolver make_solver(const ProblemData& pd, const LinearSolverSettings& settings = {}) {
    KKTLayout layout = kkt_layout(family_of(pd));
    SymbolicFactor sym = symbolic_ldl(layout.pattern, amd_order(layout.pattern));
    KKTSolver solver(std::move(layout), std::move(sym), settings);
    solver.system().set_data(pd.Q.values, pd.A.values, pd.G.values);
    return solver;
}

// Dense matrix of the expanded system with the auxiliary rows eliminated,
// ordered x, y, z.
MatrixXd reduce_expanded(const KKTSystem& kkt) {
    const KKTLayout& L = kkt.layout();
    const MatrixXd K = oracle::dense_symmetric(kkt.matrix());
    std::vector<Eigen::Index> keep, aux;
    for (std::size_t i = 0; i < L.n() + L.p(); ++i) keep.push_back(static_cast<Eigen::Index>(i));
    for (std::size_t r : L.z_rows) keep.push_back(static_cast<Eigen::Index>(r));
    for (std::size_t r : L.aux_rows) aux.push_back(static_cast<Eigen::Index>(r));
    const auto nk = static_cast<Eigen::Index>(keep.size());
    const auto na = static_cast<Eigen::Index>(aux.size());
    MatrixXd Kkk(nk, nk), Kka(nk, na), Kaa(na, na);
    for (Eigen::Index i = 0; i < nk; ++i) {
        for (Eigen::Index j = 0; j < nk; ++j) Kkk(i, j) = K(keep[i], keep[j]);
        for (Eigen::Index j = 0; j < na; ++j) Kka(i, j) = K(keep[i], aux[j]);
    }
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < na; ++j) Kaa(i, j) = K(aux[i], aux[j]);
    if (na == 0) return Kkk;
    return Kkk - Kka * Kaa.inverse() * Kka.transpose();
}

struct ScaledPoint {
    VectorXd s, z;
    NTScaling scaling;
    oracle::DenseScaling dense;
};

ScaledPoint random_scaling(Rng& rng, const ConeSpec& cone) {
    const VectorXd s = oracle::random_interior(rng, cone);
    const VectorXd z = oracle::random_interior(rng, cone);
    return {s, z, nt_scaling_update(oracle::stdvec(s), oracle::stdvec(z), cone),
            oracle::nt_scaling(s, z, cone)};
}

VectorXd random_vec(Rng& rng, std::size_t n) {
    VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
    return v;
}

// Dense reference for both right-hand sides.
std::pair<VectorXd, VectorXd> dense_pair(const ProblemData& pd, const oracle::DenseScaling& w,
                                         const VectorXd& dx, const VectorXd& dy,
                                         const VectorXd& dz, const VectorXd& ds) {
    const MatrixXd K = oracle::kkt_matrix(pd, w.W);
    const auto n = static_cast<Eigen::Index>(pd.n), p = static_cast<Eigen::Index>(pd.p),
               m = static_cast<Eigen::Index>(pd.m);
    VectorXd b1(n + p + m), b2(n + p + m);
    b1 << -oracle::vec(pd.q), oracle::vec(pd.b), oracle::vec(pd.h);
    const VectorXd inv = oracle::arrow(w.lambda, pd.cone).lu().solve(ds);
    b2 << -dx, dy, dz - w.W * inv;
    const auto lu = K.fullPivLu();
    return {lu.solve(b1), lu.solve(b2)};
}

double rel_err(const VectorXd& a, const VectorXd& b) { return (a - b).norm() / (1.0 + b.norm()); }

}  // namespace

TEST_CASE("kkt assembly with unit scaling") {
    const ProblemData pd = tiny_qp();
    const KKTLayout L = kkt_layout(family_of(pd));
    const KKTSystem kkt = build_kkt(pd, L, 1e-7);
    MatrixXd want(2, 2);
    want << 2 + 1e-7, 1, 1, -1 - 1e-7;
    CHECK((oracle::dense_symmetric(kkt.matrix()) - want).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(kkt.expected_signs()[0] == 1);
    CHECK(kkt.expected_signs()[1] == -1);

    // One SOC of dimension 3 adds d + 2 = 5 rows to the single variable row.
    ProblemFamily soc_only;
    soc_only.n = 1;
    soc_only.m = 3;
    soc_only.cone = ConeSpec{0, {3}};
    soc_only.Q = SparseCCS(1, 1);
    soc_only.A = SparseCCS(0, 1);
    soc_only.G = SparseCCS(3, 1);
    const KKTLayout Ls = kkt_layout(soc_only);
    CHECK(Ls.dim == 1 + 5);
    CHECK(Ls.aux_rows.size() == 2);
    CHECK(Ls.signs == std::vector<int>{1, -1, -1, -1, -1, 1});
}

TEST_CASE("kkt blocks reproduce the problem data at zero regularization") {
    Rng rng(3);
    const ConeSpec cone{2, {3, 4}};
    const ProblemData pd = oracle::random_problem(rng, 6, 2, cone);
    const KKTSystem kkt = build_kkt(pd, kkt_layout(family_of(pd)), 0.0);
    const MatrixXd red = reduce_expanded(kkt);
    const MatrixXd want = oracle::kkt_matrix(pd, MatrixXd::Identity(9, 9));
    CHECK((red - want).cwiseAbs().maxCoeff() < 1e-12);

    // Regularization: +delta on the first n diagonals, -delta on every other one.
    const KKTSystem reg = build_kkt(pd, kkt_layout(family_of(pd)), 1e-7);
    const MatrixXd d = oracle::dense_symmetric(reg.matrix()) - oracle::dense_symmetric(kkt.matrix());
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        CHECK(d(i, i) == doctest::Approx(i < 6 ? 1e-7 : -1e-7).epsilon(1e-9));
    }
    CHECK(d.cwiseAbs().maxCoeff() == doctest::Approx(1e-7));
}

TEST_CASE("kkt degenerate cone compositions") {
    Rng rng(5);
    for (const ConeSpec& cone : {ConeSpec{4, {}}, ConeSpec{0, {3, 2}}}) {
        const ProblemData pd = oracle::random_problem(rng, 4, 1, cone);
        const KKTLayout L = kkt_layout(family_of(pd));
        CHECK(L.dim == 4 + 1 + cone.dim() + 2 * cone.soc_count());
        auto sp = random_scaling(rng, cone);
        KKTSystem kkt = build_kkt(pd, L, 0.0);
        kkt.update_scaling(sp.scaling);
        const MatrixXd want = oracle::kkt_matrix(pd, sp.dense.W);
        CHECK((reduce_expanded(kkt) - want).cwiseAbs().maxCoeff() <= 1e-9 * want.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("kkt family mismatch") {
    ProblemData pd = tiny_qp();
    const KKTLayout L = kkt_layout(family_of(pd));
    pd.Q = ccs_identity(1, 0.0);
    pd.Q.row_indices.clear();
    pd.Q.values.clear();
    pd.Q.col_offsets = {0, 0};
    CHECK_THROWS_AS(build_kkt(pd, L), FamilyMismatch);
}

TEST_CASE("mars landing family layout is pinned") {
    const ProblemData pd = gen_mars_landing(25, 48.0);
    const KKTLayout L = kkt_layout(family_of(pd));
    CHECK(L.dim == pd.n + pd.p + pd.m + 2 * pd.cone.soc_count());
    CHECK(L.dim == 709);
    const CustomizationPlan plan = analyze_family(family_of(pd));
    CHECK(plan.kkt_dim() == 709);
    CHECK(plan.kkt_nnz() == L.pattern.nnz());
    // Diagonal, off-diagonal Q, A, G, and 2d - 1 expansion entries per SOC.
    std::size_t q_off = 0;
    for (std::size_t j = 0; j < pd.n; ++j)
        for (std::size_t k = pd.Q.col_offsets[j]; k < pd.Q.col_offsets[j + 1]; ++k)
            q_off += pd.Q.row_indices[k] != j;
    std::size_t expansion = 0;
    for (std::size_t d : pd.cone.soc_dims) expansion += 2 * d - 1;
    CHECK(plan.kkt_nnz() == L.dim + q_off + pd.A.nnz() + pd.G.nnz() + expansion);
    CHECK(plan.kkt_nnz() == 1765);
}

TEST_CASE("update scaling") {
    const ProblemData pd = tiny_qp();
    KKTSystem kkt = build_kkt(pd, kkt_layout(family_of(pd)), 1e-7);
    kkt.update_scaling(nt_scaling_update(std::vector<double>{1}, std::vector<double>{1}, pd.cone));
    CHECK(kkt.matrix().values[kkt.layout().scaling_slots[0]] == doctest::Approx(-1 - 1e-7));

    // SOC with wbar = e and eta = 2: s = 4 z gives eta^2 = 4.
    ProblemData sp = make_problem(1, 0, ConeSpec{0, {3}});
    sp.G = ccs_from_triplets(3, 1, std::vector<Triplet>{{0, 0, 1.0}});
    KKTSystem ks = build_kkt(sp, kkt_layout(family_of(sp)), 1e-7);
    const NTScaling w = nt_scaling_update(std::vector<double>{4, 0, 0}, std::vector<double>{1, 0, 0},
                                          sp.cone);
    REQUIRE(w.soc()[0].eta == doctest::Approx(2.0));
    ks.update_scaling(w);
    const auto& Ls = ks.layout();
    const auto& vals = ks.matrix().values;
    CHECK(vals[Ls.diag_slots[Ls.aux_rows[0]]] == doctest::Approx(-4 - 1e-7));
    CHECK(vals[Ls.diag_slots[Ls.aux_rows[1]]] == doctest::Approx(4 - 1e-7));
    const MatrixXd red = [&] {
        KKTSystem k0 = build_kkt(sp, kkt_layout(family_of(sp)), 0.0);
        k0.update_scaling(w);
        return reduce_expanded(k0);
    }();
    CHECK(red.bottomRightCorner(3, 3).isApprox(-4.0 * MatrixXd::Identity(3, 3), 1e-12));
}

TEST_CASE("update scaling touches only scaling slots and is idempotent") {
    Rng rng(7);
    const ConeSpec cone{3, {3, 5}};
    const ProblemData pd = oracle::random_problem(rng, 5, 2, cone);
    KKTSystem kkt = build_kkt(pd, kkt_layout(family_of(pd)), 1e-7);
    const std::set<std::size_t> slots(kkt.layout().scaling_slots.begin(),
                                      kkt.layout().scaling_slots.end());
    CHECK(slots.size() == kkt.layout().scaling_slots.size());
    const std::vector<double> before = kkt.matrix().values;
    const auto sp = random_scaling(rng, cone);
    kkt.update_scaling(sp.scaling);
    const std::vector<double> once = kkt.matrix().values;
    for (std::size_t k = 0; k < before.size(); ++k) {
        if (!slots.count(k)) CHECK(once[k] == before[k]);
    }
    kkt.update_scaling(sp.scaling);
    CHECK(kkt.matrix().values == once);
}

TEST_CASE("factor at unit and near-boundary scaling") {
    const ProblemData pd = tiny_qp();
    KKTSolver solver = make_solver(pd);
    REQUIRE(solver.factor());
    CHECK(solver.numeric().dyn_reg_count == 0);
    const auto& sym = solver.symbolic();
    for (std::size_t k = 0; k < sym.n; ++k) {
        CHECK((solver.numeric().D_values[k] > 0) == (solver.system().expected_signs()[sym.perm[k]] > 0));
    }

    Rng rng(9);
    const ConeSpec cone{3, {3}};
    const ProblemData rp = oracle::random_problem(rng, 4, 1, cone);
    KKTSolver rs = make_solver(rp);
    std::vector<double> s{1e-12, 1.0, 2.0, 1.0, 1.0 - 1e-10, 0.0};
    std::vector<double> z{5.0, 1e-9, 1.0, 2.0, 0.0, 1.0};
    rs.system().update_scaling(nt_scaling_update(s, z, cone));
    REQUIRE(rs.factor());
    for (std::size_t k = 0; k < rs.symbolic().n; ++k) {
        const double d = rs.numeric().D_values[k];
        CHECK(std::isfinite(d));
        CHECK((d > 0) == (rs.system().expected_signs()[rs.symbolic().perm[k]] > 0));
    }
}

TEST_CASE("right-hand sides") {
    Rng rng(11);
    const ConeSpec cone{2, {3}};
    const ProblemData pd = oracle::random_problem(rng, 3, 1, cone);
    std::vector<double> b1(3 + 1 + 5);
    build_rhs1(pd, b1);
    CHECK(b1[0] == -pd.q[0]);
    CHECK(b1[3] == pd.b[0]);
    CHECK(b1[4] == pd.h[0]);

    // Pure centering: d_s = lambda o lambda gives -W lambda in the z block.
    const auto sp = random_scaling(rng, cone);
    const auto lam = sp.scaling.lambda();
    const auto ds = jordan_product(lam, lam, cone);
    std::vector<double> zero3(3, 0.0), zero1(1, 0.0), zero5(5, 0.0), out(9), work(5);
    build_rhs2(sp.scaling, zero3, zero1, zero5, ds, out, work);
    const auto wl = apply_W(sp.scaling, lam);
    for (std::size_t i = 0; i < 4; ++i) CHECK(out[i] == 0.0);
    for (std::size_t i = 0; i < 5; ++i) CHECK(out[4 + i] == doctest::Approx(-wl[i]).epsilon(1e-12));
}

TEST_CASE("solve pair against the dense unexpanded system") {
    Rng rng(13);
    auto check_instance = [&](const ProblemData& pd) {
        KKTSolver solver = make_solver(pd);
        const auto sp = random_scaling(rng, pd.cone);
        solver.system().update_scaling(sp.scaling);
        REQUIRE(solver.factor());
        const VectorXd dx = random_vec(rng, pd.n), dy = random_vec(rng, pd.p),
                       dz = random_vec(rng, pd.m), ds = random_vec(rng, pd.m);
        const std::size_t N = pd.n + pd.p + pd.m;
        std::vector<double> xi1(N), xi2(N);
        const auto r = solve_pair(solver, pd, sp.scaling, oracle::stdvec(dx), oracle::stdvec(dy),
                                  oracle::stdvec(dz), oracle::stdvec(ds), xi1, xi2);
        CHECK_FALSE(r.first.exhausted);
        CHECK_FALSE(r.second.exhausted);
        const auto [w1, w2] = dense_pair(pd, sp.dense, dx, dy, dz, ds);
        CHECK(rel_err(oracle::vec(xi1), w1) <= 1e-8);
        CHECK(rel_err(oracle::vec(xi2), w2) <= 1e-8);
    };

    check_instance(tiny_qp());
    check_instance(oracle::random_problem(rng, 5, 2, ConeSpec{4, {3}}));
    for (int t = 0; t < 100; ++t) {
        ConeSpec cone;
        cone.nn_count = static_cast<std::size_t>(rng.uniform(0, 6));
        const int nsoc = static_cast<int>(rng.uniform(0, 3));
        for (int k = 0; k < nsoc; ++k) cone.soc_dims.push_back(2 + static_cast<std::size_t>(rng.uniform(0, 5)));
        if (cone.dim() == 0) cone.nn_count = 1;
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform(0, 20));
        const std::size_t p = static_cast<std::size_t>(rng.uniform(0, double(std::min<std::size_t>(n, 8))));
        // Without Q the system is nonsingular only when G has full column rank.
        const bool quadratic = n > cone.dim() || rng.bernoulli(0.5);
        check_instance(oracle::random_problem(rng, n, p, cone, quadratic));
    }
}

TEST_CASE("compute dtau formula") {
    // Q = 0, kappa = tau = 1, d_tau = d_kappa = 0, q'xi2_x + b'xi2_y + h'xi2_z = 0.3.
    ProblemData pd = make_problem(1, 0, ConeSpec{1, {}});
    pd.G = ccs_identity(1);
    pd.q = {0.3};
    pd.h = {0.0};
    const NTScaling id(pd.cone);
    const std::vector<double> x{0.5}, xi1{0.0, 0.0}, xi2{1.0, 0.0};
    CHECK(compute_dtau(pd, id, x, 1.0, 1.0, xi1, xi2, 0.0, 0.0) == doctest::Approx(0.3));

    // Q = 2, x = 1, tau = kappa = 1: denominator 2 + 1 = 3.
    ProblemData pq = pd;
    pq.Q = ccs_identity(1, 2.0);
    pq.q = {0.0};
    const std::vector<double> x1{1.0}, zero{0.0, 0.0};
    CHECK(compute_dtau(pq, id, x1, 1.0, 1.0, zero, zero, -3.0, 0.0) == doctest::Approx(1.0));

    CHECK_THROWS_AS(compute_dtau(pq, id, std::vector<double>{}, 1.0, 1.0, zero, zero, 0, 0),
                    DimensionMismatch);
}

TEST_CASE("compute dtau direct and identity forms agree when K xi1 = b1") {
    Rng rng(17);
    for (int t = 0; t < 50; ++t) {
        const ConeSpec cone{3, {3}};
        const ProblemData pd = oracle::random_problem(rng, 5, 2, cone);
        KKTSolver solver = make_solver(pd, LinearSolverSettings{0.0, 1e-13, 1e-7, 1e-13, 10});
        const auto sp = random_scaling(rng, cone);
        solver.system().update_scaling(sp.scaling);
        REQUIRE(solver.factor());
        const std::size_t N = 5 + 2 + 6;
        std::vector<double> b1(N), xi1(N);
        build_rhs1(pd, b1);
        solver.solve(b1, xi1);
        const VectorXd x = random_vec(rng, 5);
        const double tau = rng.uniform(0.5, 2.0), kappa = rng.uniform(0.5, 2.0);
        const MatrixXd Q = oracle::dense_symmetric(pd.Q);
        const VectorXd x1 = oracle::vec(xi1).head(5);
        const VectorXd xt = x / tau - x1;
        const VectorXd wz = sp.dense.W * oracle::vec(xi1).tail(6);
        const double den = xt.dot(Q * xt) + wz.squaredNorm() + kappa / tau;
        const std::vector<double> xi2(N, 0.0);
        const double dtau = compute_dtau(pd, sp.scaling, oracle::stdvec(x), tau, kappa, xi1, xi2,
                                         -1.0, 0.0);
        CHECK(dtau == doctest::Approx(1.0 / den).epsilon(1e-8));
    }
}

TEST_CASE("recover ds and dkappa") {
    Rng rng(19);
    const ConeSpec cone{2, {3, 4}};
    const auto sp = random_scaling(rng, cone);
    std::vector<double> ds(9), work(18);
    const std::vector<double> zero(9, 0.0);
    CHECK(recover_ds_dkappa(sp.scaling, zero, zero, 0.0, 0.0, 2.0, 3.0, ds, work) == 0.0);
    for (double v : ds) CHECK(v == 0.0);
    CHECK(recover_ds_dkappa(sp.scaling, zero, zero, 0.0, 0.0, 2.0, 3.0, ds, work) == 0.0);
    CHECK(recover_ds_dkappa(sp.scaling, zero, zero, 1.0, 0.5, 2.0, 4.0, ds, work) ==
          doctest::Approx((1.0 - 2.0 * 0.5) / 4.0));

    for (int t = 0; t < 100; ++t) {
        const auto s2 = random_scaling(rng, cone);
        const VectorXd d_s = random_vec(rng, 9), dz = random_vec(rng, 9);
        recover_ds_dkappa(s2.scaling, oracle::stdvec(d_s), oracle::stdvec(dz), 0.0, 0.0, 1.0, 1.0,
                          ds, work);
        const VectorXd lhs = oracle::jordan(
            s2.dense.lambda, s2.dense.W.inverse() * oracle::vec(ds) + s2.dense.W * dz, cone);
        CHECK((lhs - d_s).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + d_s.cwiseAbs().maxCoeff()));
    }
}
