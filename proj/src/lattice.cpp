/**
 * @file lattice.cpp
 * @brief Exact lattice and rational linear algebra kernels.
 */

#include "relmono/lattice.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <stdexcept>
#include <unordered_set>

namespace relmono {

namespace {

// Eigen is used as typed storage here; the elimination loops are written
// element-wise so arbitrary-precision scalars never pass through expression
// templates they were not designed to meet.

void row_combine(IMatX& M, Eigen::Index r1, Eigen::Index r2,
                 const Int& s, const Int& t, const Int& mb, const Int& a) {
    // applies the unimodular transform [[s, t], [mb, a]] to (row r1, row r2)
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        Int x = M(r1, j), y = M(r2, j);
        M(r1, j) = s * x + t * y;
        M(r2, j) = mb * x + a * y;
    }
}

void row_swap(IMatX& M, Eigen::Index r1, Eigen::Index r2) {
    if (r1 == r2) return;
    for (Eigen::Index j = 0; j < M.cols(); ++j) std::swap(M(r1, j), M(r2, j));
}

void row_negate(IMatX& M, Eigen::Index r) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) M(r, j) = -M(r, j);
}

void row_submul(IMatX& M, Eigen::Index dst, Eigen::Index src, const Int& q) {
    if (q == 0) return;
    for (Eigen::Index j = 0; j < M.cols(); ++j) M(dst, j) -= q * M(src, j);
}

IMatX identity_int(Eigen::Index n) {
    IMatX M(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) M(i, j) = (i == j) ? 1 : 0;
    return M;
}

bool is_small_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

/// Scale a rational 2x2 matrix to the primitive integer matrix spanning the
/// same line, with the first nonzero entry (row-major) positive.
QMat2 primitive_scale(const QMat2& X) {
    Int lcm_den = 1;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            lcm_den = boost::multiprecision::lcm(lcm_den, denominator_of(X(i, j)));
    std::array<Int, 4> e;
    Int content = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Int v = numerator_of(X(i, j)) * (lcm_den / denominator_of(X(i, j)));
            e[static_cast<std::size_t>(2 * i + j)] = v;
            content = boost::multiprecision::gcd(content, v < 0 ? Int(-v) : v);
        }
    QMat2 out;
    if (content == 0) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out(i, j) = 0;
        return out;
    }
    Int sign = 1;
    for (const Int& v : e)
        if (v != 0) { sign = (v < 0) ? -1 : 1; break; }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = Rat(sign * e[static_cast<std::size_t>(2 * i + j)] / content);
    return out;
}

}  // namespace

HnfResult hnf(const IMatX& rows) {
    const Eigen::Index m = rows.rows();
    const Eigen::Index n = rows.cols();
    HnfResult out;
    if (m == 0) {
        out.basis = IMatX(0, n);
        out.transform = IMatX(0, 0);
        out.express = IMatX(0, 0);
        return out;
    }
    if (n == 0) throw std::invalid_argument("hnf: rows must have positive length");

    IMatX H = rows;
    IMatX U = identity_int(m);
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < n && r < m; ++c) {
        Eigen::Index piv = -1;
        for (Eigen::Index i = r; i < m; ++i) {
            if (H(i, c) == 0) continue;
            if (piv < 0) { piv = i; continue; }
            Int s, t;
            Int g = gcdx(H(piv, c), H(i, c), s, t);
            Int a = H(piv, c) / g;
            Int b = H(i, c) / g;
            row_combine(H, piv, i, s, t, -b, a);
            row_combine(U, piv, i, s, t, -b, a);
        }
        if (piv < 0) continue;
        row_swap(H, r, piv);
        row_swap(U, r, piv);
        if (H(r, c) < 0) { row_negate(H, r); row_negate(U, r); }
        for (Eigen::Index i = 0; i < r; ++i) {
            Int q = floor_div(H(i, c), H(r, c));
            row_submul(H, i, r, q);
            row_submul(U, i, r, q);
        }
        ++r;
    }

    out.rank = static_cast<int>(r);
    out.basis = IMatX(r, n);
    out.transform = IMatX(r, m);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) out.basis(i, j) = H(i, j);
        for (Eigen::Index j = 0; j < m; ++j) out.transform(i, j) = U(i, j);
    }
    out.express = IMatX(m, r);
    for (Eigen::Index i = 0; i < m; ++i) {
        IVecX v(n);
        for (Eigen::Index j = 0; j < n; ++j) v(j) = rows(i, j);
        auto coords = lattice_coordinates(out.basis, v);
        if (!coords)  // cannot happen: the basis spans the input rows
            throw std::logic_error("hnf: certificate reduction failed");
        for (Eigen::Index j = 0; j < r; ++j) out.express(i, j) = (*coords)(j);
    }
    return out;
}

int lattice_rank(const IMatX& rows) {
    if (rows.rows() == 0) return 0;
    return hnf(rows).rank;
}

std::optional<IVecX> lattice_coordinates(const IMatX& B, const IVecX& v) {
    const Eigen::Index r = B.rows();
    const Eigen::Index n = B.cols();
    if (v.size() != n) throw std::invalid_argument("lattice_coordinates: length mismatch");
    IVecX w = v;
    IVecX coords(r);
    for (Eigen::Index j = 0; j < r; ++j) {
        Eigen::Index c = 0;
        while (c < n && B(j, c) == 0) ++c;
        if (c == n) { coords(j) = 0; continue; }
        if (w(c) % B(j, c) != 0) return std::nullopt;
        Int q = w(c) / B(j, c);
        coords(j) = q;
        if (q != 0)
            for (Eigen::Index i = 0; i < n; ++i) w(i) -= q * B(j, i);
    }
    for (Eigen::Index i = 0; i < n; ++i)
        if (w(i) != 0) return std::nullopt;
    return coords;
}

bool in_lattice(const IMatX& hnf_basis, const IVecX& v) {
    return lattice_coordinates(hnf_basis, v).has_value();
}

int rational_rank(const QMatX& m0) {
    QMatX M = m0;
    const Eigen::Index m = M.rows();
    const Eigen::Index n = M.cols();
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < n && r < m; ++c) {
        Eigen::Index piv = -1;
        for (Eigen::Index i = r; i < m; ++i)
            if (M(i, c) != 0) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != r)
            for (Eigen::Index j = 0; j < n; ++j) std::swap(M(r, j), M(piv, j));
        for (Eigen::Index i = r + 1; i < m; ++i) {
            if (M(i, c) == 0) continue;
            Rat f = M(i, c) / M(r, c);
            for (Eigen::Index j = c; j < n; ++j) M(i, j) -= f * M(r, j);
        }
        ++r;
    }
    return static_cast<int>(r);
}

RationalSolve solve_rational(const QMatX& A, const QVecX& b) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (b.size() != m) throw std::invalid_argument("solve_rational: dimension mismatch");

    QMatX M(m, n + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) M(i, j) = A(i, j);
        M(i, n) = b(i);
    }

    std::vector<Eigen::Index> pivot_cols;
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < n && r < m; ++c) {
        Eigen::Index piv = -1;
        for (Eigen::Index i = r; i < m; ++i)
            if (M(i, c) != 0) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != r)
            for (Eigen::Index j = 0; j <= n; ++j) std::swap(M(r, j), M(piv, j));
        Rat d = M(r, c);
        for (Eigen::Index j = c; j <= n; ++j) M(r, j) /= d;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i == r || M(i, c) == 0) continue;
            Rat f = M(i, c);
            for (Eigen::Index j = c; j <= n; ++j) M(i, j) -= f * M(r, j);
        }
        pivot_cols.push_back(c);
        ++r;
    }

    RationalSolve out;
    for (Eigen::Index i = r; i < m; ++i)
        if (M(i, n) != 0) { out.consistent = false; return out; }
    out.consistent = true;

    out.particular = QVecX(n);
    for (Eigen::Index j = 0; j < n; ++j) out.particular(j) = 0;
    for (Eigen::Index j = 0; j < r; ++j) out.particular(pivot_cols[static_cast<std::size_t>(j)]) = M(j, n);

    std::vector<Eigen::Index> free_cols;
    {
        std::size_t pi = 0;
        for (Eigen::Index c = 0; c < n; ++c) {
            if (pi < pivot_cols.size() && pivot_cols[pi] == c) { ++pi; continue; }
            free_cols.push_back(c);
        }
    }
    out.nullspace = QMatX(n, static_cast<Eigen::Index>(free_cols.size()));
    for (std::size_t d = 0; d < free_cols.size(); ++d) {
        for (Eigen::Index j = 0; j < n; ++j) out.nullspace(j, static_cast<Eigen::Index>(d)) = 0;
        out.nullspace(free_cols[d], static_cast<Eigen::Index>(d)) = 1;
        for (Eigen::Index j = 0; j < r; ++j)
            out.nullspace(pivot_cols[static_cast<std::size_t>(j)], static_cast<Eigen::Index>(d)) =
                -M(j, free_cols[d]);
    }
    return out;
}

std::vector<QMat2> sylvester_nullspace(const std::vector<std::pair<QMat2, QMat2>>& pairs) {
    const Eigen::Index m = static_cast<Eigen::Index>(pairs.size());
    QMatX A(4 * m, 4);
    for (Eigen::Index i = 0; i < 4 * m; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) A(i, j) = 0;

    Eigen::Index t = 0;
    for (const auto& [P, Q] : pairs) {
        // constraint rows for Q*X - X*P = 0, X vectorized row-major
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                for (int k = 0; k < 2; ++k) {
                    A(t, 2 * k + j) += Q(i, k);
                    A(t, 2 * i + k) -= P(k, j);
                }
                ++t;
            }
    }

    QVecX zero(4 * m);
    for (Eigen::Index i = 0; i < 4 * m; ++i) zero(i) = 0;
    RationalSolve sol = solve_rational(A, zero);

    std::vector<QMat2> basis;
    for (Eigen::Index d = 0; d < sol.nullspace.cols(); ++d) {
        QMat2 X;
        X(0, 0) = sol.nullspace(0, d);
        X(0, 1) = sol.nullspace(1, d);
        X(1, 0) = sol.nullspace(2, d);
        X(1, 1) = sol.nullspace(3, d);
        basis.push_back(primitive_scale(X));
    }
    return basis;
}

std::vector<QMat2> sylvester_nullspace(const std::vector<std::pair<IMat2, IMat2>>& pairs) {
    std::vector<std::pair<QMat2, QMat2>> qpairs;
    qpairs.reserve(pairs.size());
    for (const auto& [P, Q] : pairs) {
        QMat2 qp, qq;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                qp(i, j) = Rat(P(i, j));
                qq(i, j) = Rat(Q(i, j));
            }
        qpairs.emplace_back(qp, qq);
    }
    return sylvester_nullspace(qpairs);
}

ModPClosure mod_p_closure(const std::vector<std::vector<IMat2>>& gens, long p) {
    if (gens.empty()) throw std::invalid_argument("mod_p_closure: empty generator list");
    const std::size_t k = gens.front().size();
    if (k == 0) throw std::invalid_argument("mod_p_closure: empty tuples");
    for (const auto& tup : gens)
        if (tup.size() != k) throw std::invalid_argument("mod_p_closure: ragged tuple sizes");
    if (p < 3 || !is_small_prime(p))
        throw std::invalid_argument("mod_p_closure: p must be an odd prime >= 3");
    if (k == 1 && p > 97)
        throw std::invalid_argument("mod_p_closure: p capped at 97 for k=1");
    if (k == 2 && p > 13)
        throw std::invalid_argument("mod_p_closure: p capped at 13 for k=2");

    Int per_factor = Int(p) * (Int(p) * Int(p) - 1);
    Int total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= per_factor;
    if (k >= 3 && total > 5000000)
        throw std::invalid_argument("mod_p_closure: state space exceeds the 5e6 bound");

    int bits = 1;
    while ((1L << bits) < p) ++bits;
    if (static_cast<std::size_t>(bits) * 4 * k > 64)
        throw std::invalid_argument("mod_p_closure: residue tuple does not fit the encoding");

    const std::uint64_t mask = (bits == 64) ? ~0ULL : ((1ULL << bits) - 1);
    const std::size_t nres = 4 * k;

    auto reduce_entry = [&](const Int& x) -> std::uint32_t {
        long v = static_cast<long>((x % p).convert_to<long>());
        return static_cast<std::uint32_t>(((v % p) + p) % p);
    };

    // flatten generators to residue tuples, validating det = 1 mod p
    std::vector<std::vector<std::uint32_t>> G;
    for (const auto& tup : gens) {
        std::vector<std::uint32_t> res(nres);
        for (std::size_t f = 0; f < k; ++f) {
            const IMat2& M = tup[f];
            std::uint32_t a = reduce_entry(M(0, 0)), b = reduce_entry(M(0, 1));
            std::uint32_t c = reduce_entry(M(1, 0)), d = reduce_entry(M(1, 1));
            long det = (static_cast<long>(a) * d - static_cast<long>(b) * c) % p;
            if (((det % p) + p) % p != 1)
                throw std::invalid_argument("mod_p_closure: generator determinant != 1 mod p");
            res[4 * f + 0] = a;
            res[4 * f + 1] = b;
            res[4 * f + 2] = c;
            res[4 * f + 3] = d;
        }
        G.push_back(std::move(res));
    }

    auto encode = [&](const std::vector<std::uint32_t>& res) -> std::uint64_t {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < nres; ++i) key = (key << bits) | (res[i] & mask);
        return key;
    };
    auto decode = [&](std::uint64_t key, std::vector<std::uint32_t>& res) {
        for (std::size_t i = nres; i-- > 0;) {
            res[i] = static_cast<std::uint32_t>(key & mask);
            key >>= bits;
        }
    };

    std::vector<std::uint32_t> ident(nres);
    for (std::size_t f = 0; f < k; ++f) {
        ident[4 * f + 0] = 1;
        ident[4 * f + 1] = 0;
        ident[4 * f + 2] = 0;
        ident[4 * f + 3] = 1;
    }

    std::unordered_set<std::uint64_t> seen;
    std::deque<std::uint64_t> frontier;
    seen.insert(encode(ident));
    frontier.push_back(encode(ident));

    std::vector<std::uint32_t> cur(nres), nxt(nres);
    const long lp = p;
    while (!frontier.empty()) {
        std::uint64_t key = frontier.front();
        frontier.pop_front();
        decode(key, cur);
        for (const auto& g : G) {
            // right-multiply each factor: closure of the generated semigroup
            // equals the subgroup in a finite group
            for (std::size_t f = 0; f < k; ++f) {
                const std::uint32_t a = cur[4 * f], b = cur[4 * f + 1];
                const std::uint32_t c = cur[4 * f + 2], d = cur[4 * f + 3];
                const std::uint32_t e = g[4 * f], h = g[4 * f + 1];
                const std::uint32_t i2 = g[4 * f + 2], j2 = g[4 * f + 3];
                nxt[4 * f + 0] = static_cast<std::uint32_t>((static_cast<long>(a) * e + static_cast<long>(b) * i2) % lp);
                nxt[4 * f + 1] = static_cast<std::uint32_t>((static_cast<long>(a) * h + static_cast<long>(b) * j2) % lp);
                nxt[4 * f + 2] = static_cast<std::uint32_t>((static_cast<long>(c) * e + static_cast<long>(d) * i2) % lp);
                nxt[4 * f + 3] = static_cast<std::uint32_t>((static_cast<long>(c) * h + static_cast<long>(d) * j2) % lp);
            }
            std::uint64_t nk = encode(nxt);
            if (seen.insert(nk).second) frontier.push_back(nk);
        }
    }

    ModPClosure out;
    out.order = seen.size();
    out.full = (Int(static_cast<unsigned long long>(out.order)) == total);
    return out;
}

}  // namespace relmono
