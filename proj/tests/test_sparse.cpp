#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "qsocp/amd.hpp"
#include "qsocp/ccs.hpp"
#include "qsocp/errors.hpp"
#include "qsocp/ldl.hpp"

using namespace qsocp;
using oracle::MatrixXd;
using oracle::VectorXd;

namespace {

SparseCCS upper_from_dense(const MatrixXd& M) {
    std::vector<Triplet> t;
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            if (M(i, j) != 0.0) {
                t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), M(i, j)});
            }
        }
    }
    return ccs_from_triplets(static_cast<std::size_t>(M.rows()), static_cast<std::size_t>(M.cols()), t);
}

// Arrow matrix with the dense row and column at index `head`.
SparseCCS arrow_pattern(std::size_t n, std::size_t head) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back({i, i, 4.0});
        if (i != head) t.push_back({std::min(i, head), std::max(i, head), 1.0});
    }
    return ccs_from_triplets(n, n, t);
}

SparseCCS tridiagonal(std::size_t n) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back({i, i, 4.0});
        if (i + 1 < n) t.push_back({i, i + 1, -1.0});
    }
    return ccs_from_triplets(n, n, t);
}

std::vector<std::size_t> natural(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return p;
}

// Nonzeros of a dense LDL' factor of the permuted pattern, counted by
// eliminating a boolean matrix: an independent fill oracle.
std::size_t dense_fill(const SparseCCS& upper, const std::vector<std::size_t>& perm) {
    const std::size_t n = upper.ncols;
    const std::vector<std::size_t> inv = invert_permutation(perm);
    std::vector<std::vector<bool>> s(n, std::vector<bool>(n, false));
    std::size_t original = 0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = upper.col_offsets[j]; p < upper.col_offsets[j + 1]; ++p) {
            const std::size_t i = upper.row_indices[p];
            if (i == j) continue;
            s[inv[i]][inv[j]] = s[inv[j]][inv[i]] = true;
            ++original;
        }
    }
    std::size_t lower = 0;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = k + 1; i < n; ++i) {
            if (!s[i][k]) continue;
            ++lower;
            for (std::size_t j = k + 1; j < n; ++j) {
                if (s[j][k]) s[i][j] = s[j][i] = true;
            }
        }
    }
    return lower - original;
}

MatrixXd dense_L(const SymbolicFactor& sym, const NumericFactor& num) {
    const auto n = static_cast<Eigen::Index>(sym.n);
    MatrixXd L = MatrixXd::Identity(n, n);
    for (std::size_t j = 0; j < sym.n; ++j) {
        for (std::size_t p = sym.L_col_offsets[j]; p < sym.L_col_offsets[j + 1]; ++p) {
            L(static_cast<Eigen::Index>(sym.L_row_indices[p]), static_cast<Eigen::Index>(j)) =
                num.L_values[p];
        }
    }
    return L;
}

MatrixXd permuted(const MatrixXd& M, const std::vector<std::size_t>& perm) {
    const auto n = M.rows();
    MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = M(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]),
                          static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)]));
        }
    }
    return out;
}

std::vector<int> qd_signs(std::size_t n1, std::size_t n2) {
    std::vector<int> s(n1 + n2, -1);
    std::fill(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n1), 1);
    return s;
}

SparseCCS with_diagonal_shift(SparseCCS a, std::size_t n1, double delta) {
    for (std::size_t j = 0; j < a.ncols; ++j) {
        const std::size_t p = a.find(j, j);
        REQUIRE(p != kNoIndex);
        a.values[p] += j < n1 ? delta : -delta;
    }
    return a;
}

}  // namespace

TEST_CASE("ccs from triplets") {
    const SparseCCS e = ccs_from_triplets(2, 3, {});
    CHECK(e.nnz() == 0);
    CHECK(e.col_offsets == std::vector<std::size_t>{0, 0, 0, 0});

    const std::vector<Triplet> dup{{0, 0, 1.0}, {0, 0, 2.0}};
    const SparseCCS d = ccs_from_triplets(1, 1, dup);
    CHECK(d.values == std::vector<double>{3.0});

    const std::vector<Triplet> shuffled{{2, 2, 1.0}, {0, 0, 1.0}, {1, 1, 1.0}};
    CHECK(ccs_from_triplets(3, 3, shuffled) == ccs_identity(3));

    const std::vector<Triplet> bad{{3, 0, 1.0}};
    CHECK_THROWS_AS(ccs_from_triplets(3, 3, bad), InvalidProblem);
}

TEST_CASE("ccs validation and products") {
    SparseCCS a(2, 2);
    a.col_offsets = {0, 2, 2};
    a.row_indices = {1, 0};
    a.values = {1.0, 2.0};
    CHECK_THROWS_AS(a.validate(), InvalidProblem);

    Rng rng(2);
    MatrixXd M = MatrixXd::Zero(4, 3);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j)
            if (rng.bernoulli(0.6)) M(i, j) = rng.normal();
    std::vector<Triplet> t;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 4; ++i)
            if (M(i, j) != 0.0) t.push_back({std::size_t(i), std::size_t(j), M(i, j)});
    const SparseCCS S = ccs_from_triplets(4, 3, t);
    CHECK_NOTHROW(S.validate());
    CHECK(oracle::dense(transpose(S)) == M.transpose());

    const std::vector<double> x{1.0, -2.0, 0.5};
    std::vector<double> y(4, 1.0);
    multiply_add(S, x, y, 2.0);
    const VectorXd want = VectorXd::Ones(4) + 2.0 * M * oracle::vec(x);
    CHECK((oracle::vec(y) - want).norm() < 1e-14);

    std::vector<double> z(3, 0.0);
    multiply_transpose_add(S, y, z);
    CHECK((oracle::vec(z) - M.transpose() * oracle::vec(y)).norm() < 1e-13);

    const SparseCCS Q = oracle::random_quasidefinite(rng, 3, 2, 0.5);
    const MatrixXd Qd = oracle::dense_symmetric(Q);
    const std::vector<double> v{0.3, -1.0, 2.0, 0.1, 0.7};
    std::vector<double> w(5, 0.0);
    symmetric_multiply_add(Q, v, w);
    CHECK((oracle::vec(w) - Qd * oracle::vec(v)).norm() < 1e-12);
    CHECK(quadratic_form(Q, v) == doctest::Approx(oracle::vec(v).dot(Qd * oracle::vec(v))));
}

TEST_CASE("amd ordering") {
    const SparseCCS diag = ccs_identity(5);
    const auto pd = amd_order(diag);
    CHECK(invert_permutation(pd).size() == 5);
    CHECK(fill_in(diag, symbolic_ldl(diag, pd)) == 0);

    for (std::size_t n : {5u, 10u, 50u}) {
        const SparseCCS arrow = arrow_pattern(n, 0);
        const auto perm = amd_order(arrow);
        const std::size_t amd_fill = fill_in(arrow, symbolic_ldl(arrow, perm));
        const std::size_t nat_fill = fill_in(arrow, symbolic_ldl(arrow, natural(n)));
        CHECK(amd_fill == 0);
        CHECK(nat_fill == n * (n - 1) / 2 - (n - 1));
        CHECK(dense_fill(arrow, natural(n)) == nat_fill);
        CHECK(amd_fill <= nat_fill);
    }

    const SparseCCS tri = tridiagonal(6);
    CHECK(fill_in(tri, symbolic_ldl(tri, amd_order(tri))) == 0);
    CHECK(dense_fill(tri, amd_order(tri)) == 0);

    SparseCCS rect(3, 4);
    CHECK_THROWS_AS(amd_order(rect), InvalidProblem);
}

TEST_CASE("amd depends only on the pattern and is deterministic") {
    Rng rng(7);
    const SparseCCS a = oracle::random_quasidefinite(rng, 15, 10, 0.2);
    SparseCCS b = a;
    for (double& v : b.values) v = rng.normal();
    const auto pa = amd_order(a);
    CHECK(pa == amd_order(b));
    CHECK(pa == amd_order(a));
    CHECK(symbolic_ldl(a, pa) == symbolic_ldl(b, pa));
    CHECK(dense_fill(a, pa) == fill_in(a, symbolic_ldl(a, pa)));
}

TEST_CASE("invert permutation") {
    CHECK(invert_permutation({2, 0, 1}) == std::vector<std::size_t>{1, 2, 0});
    CHECK_THROWS_AS(invert_permutation({0, 0, 1}), InvalidProblem);
}

TEST_CASE("symbolic factorization") {
    MatrixXd d2(2, 2);
    d2 << 2, 1, 1, 3;
    const SymbolicFactor s2 = symbolic_ldl(upper_from_dense(d2), natural(2));
    CHECK(s2.nnz_L() == 1);

    const SymbolicFactor st = symbolic_ldl(tridiagonal(4), natural(4));
    CHECK(st.nnz_L() == 3);
    CHECK(st.L_row_indices == std::vector<std::size_t>{1, 2, 3});

    const SparseCCS arrow = arrow_pattern(5, 0);
    CHECK(fill_in(arrow, symbolic_ldl(arrow, natural(5))) == 6);
    CHECK(fill_in(arrow, symbolic_ldl(arrow, {1, 2, 3, 4, 0})) == 0);

    const SymbolicFactor s = symbolic_ldl(arrow, {4, 2, 0, 3, 1});
    for (std::size_t k = 0; k < 5; ++k) CHECK(s.inverse_perm[s.perm[k]] == k);

    SparseCCS lower(2, 2);
    lower.col_offsets = {0, 2, 3};
    lower.row_indices = {0, 1, 1};
    lower.values = {1, 1, 1};
    CHECK_THROWS_AS(symbolic_ldl(lower, natural(2)), InvalidProblem);
    CHECK_THROWS_AS(symbolic_ldl(tridiagonal(3), natural(2)), InvalidProblem);
}

TEST_CASE("numeric factorization examples") {
    const SparseCCS I = ccs_identity(3);
    const SymbolicFactor si = symbolic_ldl(I, natural(3));
    const std::vector<int> plus(3, 1);
    const NumericFactor ni = numeric_ldl(I, si, plus);
    CHECK(ni.L_values.empty());
    CHECK(ni.D_values == std::vector<double>{1, 1, 1});
    CHECK(ni.dyn_reg_count == 0);
    const std::vector<double> b{1.0, -2.0, 3.0};
    CHECK(ldl_solve(si, ni, b) == b);

    MatrixXd m2(2, 2);
    m2 << 2, 1, 1, -2;
    const SparseCCS u2 = upper_from_dense(m2);
    const SymbolicFactor s2 = symbolic_ldl(u2, natural(2));
    const std::vector<int> pm{1, -1};
    const NumericFactor n2 = numeric_ldl(u2, s2, pm);
    CHECK(n2.L_values[0] == doctest::Approx(0.5));
    CHECK(n2.D_values[0] == doctest::Approx(2.0));
    CHECK(n2.D_values[1] == doctest::Approx(-2.5));
    const auto x2 = ldl_solve(s2, n2, std::vector<double>{1.0, 0.0});
    CHECK(x2[0] == doctest::Approx(0.4));
    CHECK(x2[1] == doctest::Approx(0.2));

    MatrixXd m3(2, 2);
    m3 << 1e-20, 0, 0, -1;
    const SparseCCS u3 = upper_from_dense(m3);
    const SymbolicFactor s3 = symbolic_ldl(u3, natural(2));
    const NumericFactor n3 = numeric_ldl(u3, s3, pm, 1e-13, 1e-7);
    CHECK(n3.D_values[0] == 1e-7);
    CHECK(n3.D_values[1] == -1.0);
    CHECK(n3.dyn_reg_count == 1);

    // A pivot with the wrong sign is replaced too.
    MatrixXd m4(2, 2);
    m4 << -3, 0, 0, -1;
    const SparseCCS u4 = upper_from_dense(m4);
    const NumericFactor n4 = numeric_ldl(u4, symbolic_ldl(u4, natural(2)), pm, 1e-13, 1e-7);
    CHECK(n4.D_values[0] == 1e-7);
    CHECK(n4.dyn_reg_count == 1);
}

TEST_CASE("quasi-definite reconstruction and solves against a dense oracle") {
    Rng rng(41);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n1 = 1 + static_cast<std::size_t>(rng.uniform(0, 30));
        const std::size_t n2 = 1 + static_cast<std::size_t>(rng.uniform(0, 50.0 - double(n1)));
        const SparseCCS K = oracle::random_quasidefinite(rng, n1, n2, 0.3);
        const MatrixXd Kd = oracle::dense_symmetric(K);
        const auto perm = amd_order(K);
        const SymbolicFactor sym = symbolic_ldl(K, perm);
        const NumericFactor num = numeric_ldl(K, sym, qd_signs(n1, n2));
        REQUIRE(num.dyn_reg_count == 0);
        const MatrixXd L = dense_L(sym, num);
        const MatrixXd D = oracle::vec(num.D_values).asDiagonal();
        const MatrixXd err = permuted(Kd, perm) - L * D * L.transpose();
        CHECK(err.cwiseAbs().maxCoeff() <= 1e-9 * Kd.cwiseAbs().maxCoeff());
        for (std::size_t k = 0; k < n1 + n2; ++k) {
            CHECK((num.D_values[k] > 0) == (qd_signs(n1, n2)[sym.perm[k]] > 0));
        }

        VectorXd b(static_cast<Eigen::Index>(n1 + n2));
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.normal();
        const VectorXd x = oracle::vec(ldl_solve(sym, num, oracle::stdvec(b)));
        const VectorXd xd = Kd.lu().solve(b);
        CHECK((x - xd).norm() <= 1e-8 * (1.0 + xd.norm()));
        CHECK((Kd * x - b).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + b.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("symbolic structure is value independent") {
    Rng rng(43);
    const SparseCCS K = oracle::random_quasidefinite(rng, 8, 6, 0.3);
    SparseCCS K2 = K;
    for (double& v : K2.values) v *= rng.uniform(0.5, 2.0);
    const auto perm = amd_order(K);
    CHECK(symbolic_ldl(K, perm) == symbolic_ldl(K2, perm));
}

TEST_CASE("iterative refinement") {
    Rng rng(47);
    const std::size_t n1 = 6, n2 = 4;
    const SparseCCS K = oracle::random_quasidefinite(rng, n1, n2, 0.4);
    const auto perm = amd_order(K);
    const SymbolicFactor sym = symbolic_ldl(K, perm);
    std::vector<double> rhs(n1 + n2);
    for (double& v : rhs) v = rng.normal();
    RefinementWorkspace ws(n1 + n2);
    std::vector<double> x(n1 + n2);

    SUBCASE("exact factors converge at once") {
        const NumericFactor num = numeric_ldl(K, sym, qd_signs(n1, n2));
        const auto r = iterative_refinement(K, {}, sym, num, rhs, x, 1e-13, 10, ws);
        CHECK(r.passes <= 1);
        CHECK_FALSE(r.exhausted);
        CHECK(r.residual < 1e-13);
    }
    SUBCASE("static regularization 1e-7 is refined away") {
        const SparseCCS Kr = with_diagonal_shift(K, n1, 1e-7);
        const NumericFactor num = numeric_ldl(Kr, sym, qd_signs(n1, n2));
        const auto r = iterative_refinement(K, {}, sym, num, rhs, x, 1e-13, 10, ws);
        CHECK(r.passes <= 5);
        CHECK_FALSE(r.exhausted);
        const VectorXd res = oracle::dense_symmetric(K) * oracle::vec(x) - oracle::vec(rhs);
        CHECK(res.cwiseAbs().maxCoeff() < 1e-13);

        // The same target expressed as a diagonal shift of the regularized matrix.
        std::vector<double> shift(n1 + n2);
        for (std::size_t i = 0; i < n1 + n2; ++i) shift[i] = i < n1 ? -1e-7 : 1e-7;
        std::vector<double> x2(n1 + n2);
        const auto r2 = iterative_refinement(Kr, shift, sym, num, rhs, x2, 1e-13, 10, ws);
        CHECK_FALSE(r2.exhausted);
    }
    SUBCASE("inflated regularization exhausts the passes") {
        const SparseCCS Kr = with_diagonal_shift(K, n1, 1e-1);
        const NumericFactor num = numeric_ldl(Kr, sym, qd_signs(n1, n2));
        std::vector<double> x0(n1 + n2);
        ldl_solve(sym, num, rhs, x0, ws.solve_work);
        const VectorXd r0 = oracle::dense_symmetric(K) * oracle::vec(x0) - oracle::vec(rhs);
        const auto r = iterative_refinement(K, {}, sym, num, rhs, x, 1e-13, 10, ws);
        CHECK(r.exhausted);
        CHECK(r.passes <= 10);
        const VectorXd res = oracle::dense_symmetric(K) * oracle::vec(x) - oracle::vec(rhs);
        CHECK(res.cwiseAbs().maxCoeff() == doctest::Approx(r.residual));
        CHECK(r.residual < r0.cwiseAbs().maxCoeff());
    }
}
