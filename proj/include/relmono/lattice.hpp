#pragma once
/**
 * @file lattice.hpp
 * @brief Exact integer/rational linear algebra: row-style Hermite normal form
 *        with span certificates, lattice membership, rational solvers with
 *        nullspace, simultaneous intertwining (Sylvester-type) nullspaces,
 *        and finite mod-p closure of matrix tuple groups.
 */

#include "relmono/numeric.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace relmono {

/**
 * Row-style Hermite normal form of an integer row lattice.
 *
 * The basis is canonical: pivots positive, pivot columns strictly increasing,
 * entries above each pivot reduced into [0, pivot). Certificates tie the two
 * spans together exactly:
 *   basis = transform * rows        (transform is rank x m, integer)
 *   rows  = express  * basis        (express  is m x rank, integer)
 */
struct HnfResult {
    IMatX basis;       ///< rank x n canonical rows (0 x n when rank == 0)
    int rank = 0;
    IMatX transform;   ///< rank x m
    IMatX express;     ///< m x rank
};

/// Compute the canonical row HNF of the lattice spanned by the rows.
/// Throws std::invalid_argument on ragged input (callers pass fixed-width
/// matrices, so this only triggers on zero-width rows with nonzero count).
HnfResult hnf(const IMatX& rows);

/// Rank of the integer row span (equals the rational rank of the same rows).
int lattice_rank(const IMatX& rows);

/// Membership test of v against a canonical HNF basis.
bool in_lattice(const IMatX& hnf_basis, const IVecX& v);

/// Integer coordinates of v in the HNF basis rows, if v lies in the lattice.
std::optional<IVecX> lattice_coordinates(const IMatX& hnf_basis, const IVecX& v);

/// Rank over the rationals via exact Gaussian elimination.
int rational_rank(const QMatX& m);

/**
 * Exact solution of A*x = b over the rationals.
 * `particular` sets all free variables to zero; `nullspace` columns span the
 * homogeneous solutions (empty when the solution is unique).
 */
struct RationalSolve {
    bool consistent = false;
    QVecX particular;
    QMatX nullspace;   ///< n x d
};
RationalSolve solve_rational(const QMatX& A, const QVecX& b);

/**
 * Basis of the rational solution space {X : Q*X = X*P for every pair (P,Q)}.
 * Each basis matrix is scaled to a primitive integer matrix with the first
 * nonzero entry positive; ordering is deterministic (ascending free column
 * of the reduced system).
 */
std::vector<QMat2> sylvester_nullspace(const std::vector<std::pair<QMat2, QMat2>>& pairs);
std::vector<QMat2> sylvester_nullspace(const std::vector<std::pair<IMat2, IMat2>>& pairs);

/**
 * Order of the subgroup of SL2(F_p)^k generated by the given k-tuples,
 * computed by hash-set BFS over encoded residue tuples; `full` iff the order
 * equals (p(p^2-1))^k.
 *
 * p must be an odd prime and every matrix must have det = 1 mod p.
 * To bound memory the prime is capped: p <= 97 for k = 1, p <= 13 for k = 2,
 * and for k >= 3 the total state bound (p(p^2-1))^k must stay below 5e6.
 */
struct ModPClosure {
    std::size_t order = 0;
    bool full = false;
};
ModPClosure mod_p_closure(const std::vector<std::vector<IMat2>>& gens, long p);

}  // namespace relmono
