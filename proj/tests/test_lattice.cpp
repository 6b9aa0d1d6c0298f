/**
 * @file test_lattice.cpp
 * @brief Exact-lattice tests. Expected values come from independent oracles
 *        implemented here (fraction-free elimination, exhaustive small-box
 *        membership, brute-force solution search), never from the library
 *        path under test.
 */

#include "doctest.h"

#include "relmono/lattice.hpp"

#include <random>
#include <vector>

using namespace relmono;

namespace {

// ---------------------------------------------------------------------------
// oracles
// ---------------------------------------------------------------------------

/// Rank over Q by fraction-free (Bareiss) elimination — independent of the
/// HNF code path.
int bareiss_rank(IMatX M) {
    const Eigen::Index m = M.rows();
    const Eigen::Index n = M.cols();
    Int prev = 1;
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < n && r < m; ++c) {
        Eigen::Index piv = -1;
        for (Eigen::Index i = r; i < m; ++i)
            if (M(i, c) != 0) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != r)
            for (Eigen::Index j = 0; j < n; ++j) std::swap(M(r, j), M(piv, j));
        for (Eigen::Index i = r + 1; i < m; ++i) {
            for (Eigen::Index j = c + 1; j < n; ++j)
                M(i, j) = (M(r, c) * M(i, j) - M(i, c) * M(r, j)) / prev;
            M(i, c) = 0;
        }
        prev = M(r, c);
        ++r;
    }
    return static_cast<int>(r);
}

/// Exhaustive membership: is v an integer combination of the rows, with
/// coefficients searched over a box? Only valid for tiny inputs.
bool brute_member(const IMatX& rows, const IVecX& v, int box) {
    const Eigen::Index m = rows.rows();
    const Eigen::Index n = rows.cols();
    std::vector<int> coef(static_cast<std::size_t>(m), -box);
    while (true) {
        IVecX acc(n);
        for (Eigen::Index j = 0; j < n; ++j) acc(j) = 0;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                acc(j) += Int(coef[static_cast<std::size_t>(i)]) * rows(i, j);
        bool same = true;
        for (Eigen::Index j = 0; j < n; ++j)
            if (acc(j) != v(j)) { same = false; break; }
        if (same) return true;
        std::size_t pos = 0;
        while (pos < coef.size() && coef[pos] == box) coef[pos++] = -box;
        if (pos == coef.size()) return false;
        ++coef[pos];
    }
}

IMatX make_rows(const std::vector<std::vector<int>>& data) {
    const Eigen::Index m = static_cast<Eigen::Index>(data.size());
    const Eigen::Index n = m == 0 ? 0 : static_cast<Eigen::Index>(data.front().size());
    IMatX M(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            M(i, j) = data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return M;
}

IVecX make_vec(const std::vector<int>& data) {
    IVecX v(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) v(static_cast<Eigen::Index>(i)) = data[i];
    return v;
}

IMatX int_matmul(const IMatX& A, const IMatX& B) {
    IMatX C(A.rows(), B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < B.cols(); ++j) {
            Int acc = 0;
            for (Eigen::Index k = 0; k < A.cols(); ++k) acc += A(i, k) * B(k, j);
            C(i, j) = acc;
        }
    return C;
}

bool int_mat_eq(const IMatX& A, const IMatX& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) return false;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            if (A(i, j) != B(i, j)) return false;
    return true;
}

const IMat2 kA0 = [] { IMat2 m; m(0,0)=1; m(0,1)=2; m(1,0)=0; m(1,1)=1; return m; }();
const IMat2 kB0 = [] { IMat2 m; m(0,0)=1; m(0,1)=0; m(1,0)=2; m(1,1)=1; return m; }();
const IMat2 kI2 = [] { IMat2 m; m(0,0)=1; m(0,1)=0; m(1,0)=0; m(1,1)=1; return m; }();

QMat2 to_q(const IMat2& M) {
    QMat2 q;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) q(i, j) = Rat(M(i, j));
    return q;
}

/// Brute-force oracle for intertwining spaces: collect all X with entries in
/// [-box, box] satisfying Q*X = X*P exactly for every pair, then measure the
/// dimension of their rational span.
int brute_intertwiner_dim(const std::vector<std::pair<IMat2, IMat2>>& pairs, int box) {
    std::vector<std::vector<int>> sols;
    int e[4];
    for (e[0] = -box; e[0] <= box; ++e[0])
        for (e[1] = -box; e[1] <= box; ++e[1])
            for (e[2] = -box; e[2] <= box; ++e[2])
                for (e[3] = -box; e[3] <= box; ++e[3]) {
                    IMat2 X;
                    X(0,0)=e[0]; X(0,1)=e[1]; X(1,0)=e[2]; X(1,1)=e[3];
                    bool ok = true;
                    for (const auto& [P, Q] : pairs) {
                        IMat2 L, R;
                        for (int i = 0; i < 2 && ok; ++i)
                            for (int j = 0; j < 2; ++j) {
                                L(i,j) = Q(i,0)*X(0,j) + Q(i,1)*X(1,j);
                                R(i,j) = X(i,0)*P(0,j) + X(i,1)*P(1,j);
                                if (L(i,j) != R(i,j)) { ok = false; break; }
                            }
                        if (!ok) break;
                    }
                    if (ok) sols.push_back({e[0], e[1], e[2], e[3]});
                }
    return bareiss_rank(make_rows(sols));
}

}  // namespace

// ---------------------------------------------------------------------------
// hnf
// ---------------------------------------------------------------------------

TEST_CASE("hnf: identity rows are already canonical") {
    auto res = hnf(make_rows({{1, 0}, {0, 1}}));
    CHECK(res.rank == 2);
    CHECK(int_mat_eq(res.basis, make_rows({{1, 0}, {0, 1}})));
}

TEST_CASE("hnf: empty input yields the empty lattice") {
    auto res = hnf(IMatX(0, 4));
    CHECK(res.rank == 0);
    CHECK(res.basis.rows() == 0);
}

TEST_CASE("hnf: index-2 sublattice reduces to canonical pivots") {
    IMatX rows = make_rows({{2, 0}, {0, 2}, {1, 1}});
    // oracle 1: rational rank by fraction-free elimination
    CHECK(bareiss_rank(rows) == 2);
    auto res = hnf(rows);
    CHECK(res.rank == 2);
    CHECK(int_mat_eq(res.basis, make_rows({{1, 1}, {0, 2}})));
    // oracle 2: exhaustive membership over a small box must agree with the
    // basis membership test
    for (int x = -2; x <= 2; ++x)
        for (int y = -2; y <= 2; ++y) {
            IVecX v = make_vec({x, y});
            CHECK(in_lattice(res.basis, v) == brute_member(rows, v, 3));
        }
}

TEST_CASE("hnf: idempotence and certificates on random row sets") {
    std::mt19937_64 rng(20260822u);
    std::uniform_int_distribution<int> dim(1, 6);
    std::uniform_int_distribution<int> val(-100, 100);
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::Index m = dim(rng);
        const Eigen::Index n = 1 + (dim(rng) % 4);
        IMatX rows(m, n);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j) rows(i, j) = val(rng);

        auto res = hnf(rows);
        // rank over Z equals rank over Q
        CHECK(res.rank == bareiss_rank(rows));
        // idempotence
        auto res2 = hnf(res.basis);
        CHECK(int_mat_eq(res2.basis, res.basis));
        // certificates: basis = transform * rows and rows = express * basis
        CHECK(int_mat_eq(res.basis, int_matmul(res.transform, rows)));
        CHECK(int_mat_eq(rows, int_matmul(res.express, res.basis)));
        // span: every row reduces to zero against the basis
        for (Eigen::Index i = 0; i < m; ++i) {
            IVecX v(n);
            for (Eigen::Index j = 0; j < n; ++j) v(j) = rows(i, j);
            CHECK(in_lattice(res.basis, v));
        }
        // canonical form: positive pivots, entries above pivots in [0, pivot)
        Eigen::Index prev_col = -1;
        for (Eigen::Index i = 0; i < res.basis.rows(); ++i) {
            Eigen::Index c = 0;
            while (c < n && res.basis(i, c) == 0) ++c;
            REQUIRE(c < n);
            CHECK(c > prev_col);
            prev_col = c;
            CHECK(res.basis(i, c) > 0);
            for (Eigen::Index a = 0; a < i; ++a) {
                CHECK(res.basis(a, c) >= 0);
                CHECK(res.basis(a, c) < res.basis(i, c));
            }
        }
    }
}

TEST_CASE("lattice_rank agreement cases") {
    CHECK(lattice_rank(IMatX(0, 3)) == 0);
    CHECK(lattice_rank(make_rows({{3, 6}, {1, 2}})) == 1);
    CHECK(lattice_rank(make_rows({{1,0,0,0},{0,1,0,0},{0,0,2,0},{0,0,0,5}})) == 4);
}

// ---------------------------------------------------------------------------
// solve_rational
// ---------------------------------------------------------------------------

TEST_CASE("solve_rational: identity system") {
    QMatX A(2, 2);
    A(0,0)=1; A(0,1)=0; A(1,0)=0; A(1,1)=1;
    QVecX b(2);
    b(0)=3; b(1)=4;
    auto sol = solve_rational(A, b);
    REQUIRE(sol.consistent);
    CHECK(sol.particular(0) == 3);
    CHECK(sol.particular(1) == 4);
    CHECK(sol.nullspace.cols() == 0);
}

TEST_CASE("solve_rational: inconsistent system returns none") {
    QMatX A(2, 1);
    A(0,0)=1; A(1,0)=1;
    QVecX b(2);
    b(0)=0; b(1)=1;
    CHECK_FALSE(solve_rational(A, b).consistent);
}

TEST_CASE("solve_rational: mapped-basis system recovers the intertwining matrix") {
    // find M with M*(1,0) = (2,0) and M*(0,1) = (0,2): rows of the system are
    // the Kronecker expansion; oracle is multiplication back
    QMatX A(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) A(i, j) = 0;
    // unknowns m00,m01,m10,m11; u=(1,0): m00*1+m01*0 = 2 ; m10*1+m11*0 = 0
    A(0,0)=1; A(1,2)=1; A(2,1)=1; A(3,3)=1;
    QVecX b(4);
    b(0)=2; b(1)=0; b(2)=0; b(3)=2;
    auto sol = solve_rational(A, b);
    REQUIRE(sol.consistent);
    CHECK(sol.particular(0) == 2);
    CHECK(sol.particular(1) == 0);
    CHECK(sol.particular(2) == 0);
    CHECK(sol.particular(3) == 2);
}

TEST_CASE("solve_rational: random consistent systems verify by substitution") {
    std::mt19937_64 rng(77001u);
    std::uniform_int_distribution<int> val(-9, 9);
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::Index m = 1 + (iter % 4);
        const Eigen::Index n = 1 + ((iter / 4) % 4);
        QMatX A(m, n);
        QVecX x(n);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j) A(i, j) = Rat(val(rng), 1 + (iter % 3));
        for (Eigen::Index j = 0; j < n; ++j) x(j) = Rat(val(rng));
        QVecX b(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            Rat acc = 0;
            for (Eigen::Index j = 0; j < n; ++j) acc += A(i, j) * x(j);
            b(i) = acc;
        }
        auto sol = solve_rational(A, b);
        REQUIRE(sol.consistent);
        for (Eigen::Index i = 0; i < m; ++i) {
            Rat acc = 0;
            for (Eigen::Index j = 0; j < n; ++j) acc += A(i, j) * sol.particular(j);
            CHECK(acc == b(i));
        }
        // homogeneous columns really solve A*x = 0
        for (Eigen::Index d = 0; d < sol.nullspace.cols(); ++d)
            for (Eigen::Index i = 0; i < m; ++i) {
                Rat acc = 0;
                for (Eigen::Index j = 0; j < n; ++j) acc += A(i, j) * sol.nullspace(j, d);
                CHECK(acc == 0);
            }
    }
}

// ---------------------------------------------------------------------------
// sylvester_nullspace
// ---------------------------------------------------------------------------

TEST_CASE("sylvester_nullspace: identity pair commutes with everything") {
    std::vector<std::pair<IMat2, IMat2>> pairs = {{kI2, kI2}};
    auto basis = sylvester_nullspace(pairs);
    CHECK(basis.size() == 4);
    CHECK(brute_intertwiner_dim(pairs, 2) == 4);
}

TEST_CASE("sylvester_nullspace: irreducible pair is rigid (scalars only)") {
    std::vector<std::pair<IMat2, IMat2>> pairs = {{kA0, kA0}, {kB0, kB0}};
    // oracle: brute-force search over a small entry box
    CHECK(brute_intertwiner_dim(pairs, 3) == 1);
    auto basis = sylvester_nullspace(pairs);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0](0, 0) == basis[0](1, 1));
    CHECK(basis[0](0, 1) == 0);
    CHECK(basis[0](1, 0) == 0);
    CHECK(basis[0](0, 0) == 1);  // primitive scaling pins the representative
}

TEST_CASE("sylvester_nullspace: cross pair has a 2-dimensional space") {
    std::vector<std::pair<IMat2, IMat2>> pairs = {{kA0, kB0}};
    CHECK(brute_intertwiner_dim(pairs, 3) == 2);
    auto basis = sylvester_nullspace(pairs);
    CHECK(basis.size() == 2);
    for (const auto& X : basis)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                // Q*X == X*P exactly
                Rat l = to_q(kB0)(i,0)*X(0,j) + to_q(kB0)(i,1)*X(1,j);
                Rat r = X(i,0)*to_q(kA0)(0,j) + X(i,1)*to_q(kA0)(1,j);
                CHECK(l == r);
            }
}

TEST_CASE("sylvester_nullspace: random pairs satisfy the equations exactly") {
    std::mt19937_64 rng(5150u);
    std::uniform_int_distribution<int> val(-4, 4);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::pair<IMat2, IMat2>> pairs;
        const int np = 1 + iter % 3;
        for (int t = 0; t < np; ++t) {
            IMat2 P, Q;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) { P(i,j) = val(rng); Q(i,j) = val(rng); }
            pairs.emplace_back(P, Q);
        }
        for (const auto& X : sylvester_nullspace(pairs))
            for (const auto& [P, Q] : pairs)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        Rat l = Rat(Q(i,0))*X(0,j) + Rat(Q(i,1))*X(1,j);
                        Rat r = X(i,0)*Rat(P(0,j)) + X(i,1)*Rat(P(1,j));
                        CHECK(l == r);
                    }
    }
}

// ---------------------------------------------------------------------------
// mod_p_closure
// ---------------------------------------------------------------------------

TEST_CASE("mod_p_closure: identity tuple generates the trivial group") {
    auto res = mod_p_closure({{kI2}}, 5);
    CHECK(res.order == 1);
    CHECK_FALSE(res.full);
}

TEST_CASE("mod_p_closure: unipotent pair fills SL2(F5)") {
    auto res = mod_p_closure({{kA0}, {kB0}}, 5);
    CHECK(res.order == 120);  // |SL2(F5)| = 5*(25-1)
    CHECK(res.full);
}

TEST_CASE("mod_p_closure: four unipotent tuples fill the k=2 product") {
    std::vector<std::vector<IMat2>> gens = {
        {kA0, kI2}, {kI2, kA0}, {kB0, kI2}, {kI2, kB0}};
    auto res = mod_p_closure(gens, 5);
    CHECK(res.order == 14400);  // 120^2
    CHECK(res.full);
}

TEST_CASE("mod_p_closure: monotone in generators, invariant under inversion and conjugation") {
    auto base = mod_p_closure({{kA0}}, 7);
    auto more = mod_p_closure({{kA0}, {kB0}}, 7);
    CHECK(base.order <= more.order);

    // inverse of A0 in SL2(Z)
    IMat2 a0inv;
    a0inv(0,0)=1; a0inv(0,1)=-2; a0inv(1,0)=0; a0inv(1,1)=1;
    auto inv_added = mod_p_closure({{kA0}, {a0inv}, {kB0}}, 7);
    CHECK(inv_added.order == more.order);

    // conjugation by a generator: {A0, A0*B0*A0^-1} generates the same group
    // as {A0, B0}
    IMat2 conj;
    {
        IMat2 t;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                t(i,j) = kA0(i,0)*kB0(0,j) + kA0(i,1)*kB0(1,j);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                conj(i,j) = t(i,0)*a0inv(0,j) + t(i,1)*a0inv(1,j);
    }
    auto conj_res = mod_p_closure({{kA0}, {conj}}, 7);
    CHECK(conj_res.order == more.order);
}

TEST_CASE("mod_p_closure: input validation") {
    CHECK_THROWS_AS(mod_p_closure({}, 5), std::invalid_argument);
    CHECK_THROWS_AS(mod_p_closure({{kA0}}, 4), std::invalid_argument);
    CHECK_THROWS_AS(mod_p_closure({{kA0}}, 101), std::invalid_argument);
    CHECK_THROWS_AS(mod_p_closure({{kA0, kI2}}, 17), std::invalid_argument);
    IMat2 bad;
    bad(0,0)=2; bad(0,1)=0; bad(1,0)=0; bad(1,1)=1;  // det = 2
    CHECK_THROWS_AS(mod_p_closure({{bad}}, 5), std::invalid_argument);
}
