#pragma once
/**
 * @file search.hpp
 * @brief Lower-bound computation of the relative monodromy group: word
 *        enumeration over a presentation (BFS with element-level dedup),
 *        targeted commutator harvesting, translation-lattice ranks, isogeny
 *        conjugator detection, intertwiner extraction, and the final
 *        classification decision tree.
 *
 * Everything is templated on the scalar so integral presentations (Int) and
 * rationally conjugated ones (Rat) run through the identical pipeline; rank
 * computations clear denominators row-wise, which preserves both ranks and
 * intertwining relations.
 */

#include "relmono/affine.hpp"
#include "relmono/lattice.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace relmono {

// ---------------------------------------------------------------------------
// configuration and record types
// ---------------------------------------------------------------------------

struct SearchConfig {
    int max_depth = 8;                   ///< word length bound
    std::size_t max_harvest = 4096;      ///< cap on stored kernel records
    long density_prime = 5;              ///< odd prime for mod-p density checks
    double time_budget_seconds = 600.0;  ///< wall-clock cap; exceeding flags partial
    std::size_t node_budget = 2000000;   ///< explored-node cap; exceeding flags partial
};

inline void validate_config(const SearchConfig& cfg) {
    if (cfg.max_depth < 1) throw std::invalid_argument("search config: max_depth must be >= 1");
    if (cfg.density_prime < 3) throw std::invalid_argument("search config: density_prime must be >= 3");
}

/// One kernel element found by search: the reduced word over signed 1-based
/// generator indices, the element it folds to, and its period-triviality flag.
template <class S>
struct HarvestRecord {
    std::vector<int> word;
    AffineElement<S> element;
    bool kernel_flag = true;
};

template <class S>
struct HarvestResult {
    std::vector<HarvestRecord<S>> records;  ///< discovery order
    std::size_t nodes_explored = 0;
    int depth_reached = 0;
    bool complete = true;  ///< false when a node/time/harvest budget truncated the run
};

namespace detail {

struct BfsNode {
    std::uint32_t parent;  ///< index into the node arena; root sentinel below
    std::int16_t letter;   ///< signed 1-based generator index
};
inline constexpr std::uint32_t kBfsRoot = 0xFFFFFFFFu;

inline std::vector<int> word_of(const std::vector<BfsNode>& nodes, std::uint32_t idx) {
    std::vector<int> w;
    while (idx != kBfsRoot) {
        w.push_back(nodes[idx].letter);
        idx = nodes[idx].parent;
    }
    std::reverse(w.begin(), w.end());
    return w;
}

/// Free reduction of a letter sequence (cancels adjacent g g^-1 pairs).
inline std::vector<int> free_reduce(const std::vector<int>& w) {
    std::vector<int> out;
    for (int l : w) {
        if (!out.empty() && out.back() == -l) out.pop_back();
        else out.push_back(l);
    }
    return out;
}

inline std::vector<int> inverse_word(const std::vector<int>& w) {
    std::vector<int> out(w.rbegin(), w.rend());
    for (int& l : out) l = -l;
    return out;
}

}  // namespace detail

/// Fold a signed word through compose, validating it against a presentation.
template <class S>
AffineElement<S> fold_word(const Presentation<S>& pres, const std::vector<int>& word) {
    AffineElement<S> acc = identity_element<S>(pres.k());
    for (int l : word) {
        if (l == 0 || std::abs(l) > static_cast<int>(pres.size()))
            throw std::invalid_argument("fold_word: letter out of range");
        const auto& g = pres.generators[static_cast<std::size_t>(std::abs(l) - 1)];
        acc = compose(acc, l > 0 ? g : inverse(g));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// harvest_kernel: breadth-first enumeration of reduced words
// ---------------------------------------------------------------------------

/**
 * BFS over reduced words up to cfg.max_depth, deduplicated on the full
 * element. Returns the distinct period-trivial elements found at depth >= 1
 * (the identity is the unrecorded root; any word folding back to it is a
 * duplicate). Deterministic given the config and generator order.
 */
template <class S>
HarvestResult<S> harvest_kernel(const Presentation<S>& pres, const SearchConfig& cfg) {
    if (pres.generators.empty())
        throw std::invalid_argument("harvest_kernel: empty presentation");
    validate_config(cfg);

    const int ng = static_cast<int>(pres.size());
    std::vector<AffineElement<S>> letter_el;
    letter_el.reserve(2 * static_cast<std::size_t>(ng));
    std::vector<int> letters;
    for (int i = 1; i <= ng; ++i) {
        letters.push_back(i);
        letters.push_back(-i);
        letter_el.push_back(pres.generators[static_cast<std::size_t>(i - 1)]);
        letter_el.push_back(inverse(pres.generators[static_cast<std::size_t>(i - 1)]));
    }
    auto letter_ref = [&](int l) -> const AffineElement<S>& {
        return letter_el[static_cast<std::size_t>(2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0))];
    };

    const auto t0 = std::chrono::steady_clock::now();
    auto over_time = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
               cfg.time_budget_seconds;
    };

    HarvestResult<S> out;
    out.nodes_explored = 1;  // the identity root
    std::unordered_set<Hash128, Hash128Hasher> seen;
    std::vector<detail::BfsNode> nodes;
    const AffineElement<S> ident = identity_element<S>(pres.k());
    seen.insert(element_hash(ident));

    std::vector<std::pair<AffineElement<S>, std::uint32_t>> prev;
    prev.emplace_back(ident, detail::kBfsRoot);

    for (int depth = 1; depth <= cfg.max_depth && !prev.empty(); ++depth) {
        std::vector<std::pair<AffineElement<S>, std::uint32_t>> next;
        for (const auto& [pel, pidx] : prev) {
            const int plast = (pidx == detail::kBfsRoot) ? 0 : nodes[pidx].letter;
            for (int l : letters) {
                if (plast != 0 && l == -plast) continue;  // free reduction
                if (out.nodes_explored >= cfg.node_budget || over_time()) {
                    out.complete = false;
                    out.depth_reached = depth - 1;
                    return out;
                }
                ++out.nodes_explored;
                AffineElement<S> child = compose(pel, letter_ref(l));
                if (!seen.insert(element_hash(child)).second) continue;
                nodes.push_back({pidx, static_cast<std::int16_t>(l)});
                const auto idx = static_cast<std::uint32_t>(nodes.size() - 1);
                if (is_period_trivial(child)) {
                    if (out.records.size() >= cfg.max_harvest) {
                        out.complete = false;
                        out.depth_reached = depth - 1;
                        return out;
                    }
                    out.records.push_back(
                        {detail::word_of(nodes, idx), child, true});
                }
                if (depth < cfg.max_depth) next.emplace_back(std::move(child), idx);
            }
        }
        prev.swap(next);
        out.depth_reached = depth;
    }
    return out;
}

// ---------------------------------------------------------------------------
// targeted_commutators: two-phase kernel construction
// ---------------------------------------------------------------------------

/**
 * Two-phase search (k = 2 only): words with identity block in factor 1 and
 * words with identity block in factor 2, each found within max_depth/2, are
 * paired into commutators — every output is period-trivial by construction.
 * Deduplicated by element; deterministic pair order (phase-1 major).
 */
template <class S>
HarvestResult<S> targeted_commutators(const Presentation<S>& pres, const SearchConfig& cfg) {
    if (pres.generators.empty())
        throw std::invalid_argument("targeted_commutators: empty presentation");
    if (pres.k() != 2)
        throw std::invalid_argument("targeted_commutators: requires a two-factor presentation");
    validate_config(cfg);

    const int half_depth = std::max(1, cfg.max_depth / 2);

    // phase BFS: enumerate ALL distinct elements (not only kernel ones) up to
    // half depth, keeping words
    struct Entry {
        std::vector<int> word;
        AffineElement<S> element;
    };
    std::vector<Entry> phase1, phase2;

    HarvestResult<S> out;
    {
        const int ng = static_cast<int>(pres.size());
        std::vector<AffineElement<S>> letter_el;
        std::vector<int> letters;
        for (int i = 1; i <= ng; ++i) {
            letters.push_back(i);
            letters.push_back(-i);
            letter_el.push_back(pres.generators[static_cast<std::size_t>(i - 1)]);
            letter_el.push_back(inverse(pres.generators[static_cast<std::size_t>(i - 1)]));
        }
        auto letter_ref = [&](int l) -> const AffineElement<S>& {
            return letter_el[static_cast<std::size_t>(2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0))];
        };
        const auto t0 = std::chrono::steady_clock::now();
        auto over_time = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
                   cfg.time_budget_seconds;
        };
        std::unordered_set<Hash128, Hash128Hasher> seen;
        std::vector<detail::BfsNode> nodes;
        const AffineElement<S> ident = identity_element<S>(pres.k());
        seen.insert(element_hash(ident));
        std::vector<std::pair<AffineElement<S>, std::uint32_t>> prev;
        prev.emplace_back(ident, detail::kBfsRoot);
        for (int depth = 1; depth <= half_depth && !prev.empty(); ++depth) {
            std::vector<std::pair<AffineElement<S>, std::uint32_t>> next;
            for (const auto& [pel, pidx] : prev) {
                const int plast = (pidx == detail::kBfsRoot) ? 0 : nodes[pidx].letter;
                for (int l : letters) {
                    if (plast != 0 && l == -plast) continue;
                    if (out.nodes_explored >= cfg.node_budget || over_time()) {
                        out.complete = false;
                        goto phases_done;
                    }
                    ++out.nodes_explored;
                    AffineElement<S> child = compose(pel, letter_ref(l));
                    if (!seen.insert(element_hash(child)).second) continue;
                    nodes.push_back({pidx, static_cast<std::int16_t>(l)});
                    const auto idx = static_cast<std::uint32_t>(nodes.size() - 1);
                    const bool f1_trivial = mat2_is_identity(child.blocks[0]);
                    const bool f2_trivial = mat2_is_identity(child.blocks[1]);
                    if (f1_trivial) phase1.push_back({detail::word_of(nodes, idx), child});
                    if (f2_trivial) phase2.push_back({detail::word_of(nodes, idx), child});
                    if (depth < half_depth) next.emplace_back(std::move(child), idx);
                }
            }
            prev.swap(next);
            out.depth_reached = depth;
        }
    }
phases_done:

    // pair into commutators, deduplicated by element
    std::unordered_set<Hash128, Hash128Hasher> emitted;
    emitted.insert(element_hash(identity_element<S>(pres.k())));
    for (const auto& a : phase1) {
        for (const auto& b : phase2) {
            if (out.nodes_explored >= cfg.node_budget) {
                out.complete = false;
                return out;
            }
            ++out.nodes_explored;
            AffineElement<S> c = commutator(a.element, b.element);
            if (!is_period_trivial(c))
                throw std::logic_error("targeted_commutators: non-trivial block in commutator");
            if (!emitted.insert(element_hash(c)).second) continue;
            if (out.records.size() >= cfg.max_harvest) {
                out.complete = false;
                return out;
            }
            std::vector<int> w = a.word;
            auto append = [&w](const std::vector<int>& part) {
                w.insert(w.end(), part.begin(), part.end());
            };
            append(b.word);
            append(detail::inverse_word(a.word));
            append(detail::inverse_word(b.word));
            out.records.push_back({detail::free_reduce(w), std::move(c), true});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// translation lattice and ranks
// ---------------------------------------------------------------------------

/// Collected translation vectors of kernel records with HNF basis and rank.
struct TranslationLattice {
    IMatX generators;  ///< one row per kernel record (denominators cleared row-wise)
    IMatX hnf_basis;
    int rank = 0;
};

namespace detail {

inline IVecX clear_denominators(const QVecX& v) {
    Int l = 1;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        l = boost::multiprecision::lcm(l, denominator_of(v(i)));
    IVecX out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out(i) = numerator_of(v(i)) * (l / denominator_of(v(i)));
    return out;
}

inline IVecX translation_row(const VecX<Int>& t) { return t; }
inline IVecX translation_row(const VecX<Rat>& t) { return clear_denominators(t); }

}  // namespace detail

template <class S>
TranslationLattice relative_rank(const std::vector<HarvestRecord<S>>& records) {
    std::vector<IVecX> rows;
    Eigen::Index width = 0;
    for (const auto& r : records) {
        if (!r.kernel_flag || !is_period_trivial(r.element)) continue;
        IVecX row = detail::translation_row(r.element.translation);
        width = row.size();
        rows.push_back(std::move(row));
    }
    TranslationLattice out;
    if (rows.empty()) {
        out.generators = IMatX(0, 0);
        out.hnf_basis = IMatX(0, 0);
        return out;
    }
    out.generators = IMatX(static_cast<Eigen::Index>(rows.size()), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (Eigen::Index j = 0; j < width; ++j)
            out.generators(static_cast<Eigen::Index>(i), j) = rows[i](j);
    auto h = hnf(out.generators);
    out.hnf_basis = h.basis;
    out.rank = h.rank;
    return out;
}

struct SubgroupRanks {
    int k1 = 0;  ///< rank of factor-1 translation parts over all records
    int k2 = 0;  ///< rank of factor-2 translation parts
    int h1 = 0;  ///< rank of factor-2 parts over the subgroup with factor-1 part zero
    int h2 = 0;  ///< symmetric
};

/**
 * K1/K2 are the ranks of the u/v projections of the record translations.
 * H1/H2 are computed on the full subgroup the records generate: the exact
 * rank of { v(x) : x in span(records), u(x) = 0 } is rank(R) - rank(R_u)
 * (and symmetrically), which is the limit of closing the record set under
 * the group operation — dependencies hiding in sums are found.
 */
template <class S>
SubgroupRanks subgroup_ranks(const std::vector<HarvestRecord<S>>& records) {
    std::vector<IVecX> rows;
    for (const auto& r : records) {
        if (!r.kernel_flag || !is_period_trivial(r.element)) continue;
        if (r.element.k() != 2)
            throw std::invalid_argument("subgroup_ranks: requires two-factor records");
        rows.push_back(detail::translation_row(r.element.translation));
    }
    const auto m = static_cast<Eigen::Index>(rows.size());
    if (m == 0) return SubgroupRanks{};
    IMatX full(m, 4), left(m, 2), right(m, 2);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) {
            full(i, j) = rows[static_cast<std::size_t>(i)](j);
            (j < 2 ? left(i, j) : right(i, j - 2)) = full(i, j);
        }
    SubgroupRanks out;
    const int rank_full = lattice_rank(full);
    out.k1 = lattice_rank(left);
    out.k2 = lattice_rank(right);
    out.h1 = rank_full - out.k1;
    out.h2 = rank_full - out.k2;
    return out;
}

/// Finite-depth torsion evidence: true iff every kernel record leaves the
/// i-th (1-based) factor's logarithm untouched.
template <class S>
bool torsion_test(const std::vector<HarvestRecord<S>>& records, int factor) {
    for (const auto& r : records) {
        if (!r.kernel_flag || !is_period_trivial(r.element)) continue;
        if (factor < 1 || factor > r.element.k())
            throw std::invalid_argument("torsion_test: factor index out of range");
        const Eigen::Index o = 2 * (factor - 1);
        if (r.element.translation(o) != 0 || r.element.translation(o + 1) != 0)
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// conjugator detection and intertwiner extraction
// ---------------------------------------------------------------------------

/// Result of the isogeny probe: the conjugator (if an invertible intertwining
/// matrix exists) plus the mod-p density evidence that was gathered.
struct ConjugatorProbe {
    std::optional<QMat2> zeta;
    bool mod_p_checked = false;
    std::size_t mod_p_order = 0;
    bool mod_p_full = false;
    long prime = 0;
};

namespace detail {

/// Reduce a rational matrix mod p; empty when a denominator vanishes mod p.
inline std::optional<IMat2> mat2_mod_p(const QMat2& m, long p) {
    IMat2 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Int den = denominator_of(m(i, j));
            if (den % p == 0) return std::nullopt;
            // den is invertible mod p: num * den^(p-2) would work, but an
            // extended-gcd inverse is cheaper and exact
            Int num = numerator_of(m(i, j)) % p;
            Int s, t;
            gcdx(den % p, Int(p), s, t);
            Int v = (num * s) % p;
            out(i, j) = ((v % p) + p) % p;
        }
    return out;
}

inline std::optional<IMat2> mat2_mod_p(const IMat2& m, long p) {
    IMat2 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(i, j) = ((m(i, j) % p) + p) % p;
    return out;
}

}  // namespace detail

/**
 * Detects whether the two factor representations are intertwined by an
 * invertible rational matrix. When the mod-p closure of the block pairs is
 * the full product group the factors cannot be conjugate (density dichotomy)
 * and the probe short-circuits to "none"; otherwise the simultaneous
 * equations rho1(g) X = X rho2(g) are solved exactly and basis elements plus
 * small integer combinations are tried for invertibility.
 */
template <class S>
ConjugatorProbe detect_conjugator(const Presentation<S>& pres, long density_prime = 5) {
    if (pres.k() != 2)
        throw std::invalid_argument("detect_conjugator: requires a two-factor presentation");
    ConjugatorProbe probe;
    probe.prime = density_prime;

    // density short-circuit (only when every block reduces mod p)
    {
        std::vector<std::vector<IMat2>> tuples;
        bool reducible = true;
        for (const auto& g : pres.generators) {
            auto m1 = detail::mat2_mod_p(g.blocks[0], density_prime);
            auto m2 = detail::mat2_mod_p(g.blocks[1], density_prime);
            if (!m1 || !m2) { reducible = false; break; }
            tuples.push_back({*m1, *m2});
        }
        if (reducible) {
            auto cl = mod_p_closure(tuples, density_prime);
            probe.mod_p_checked = true;
            probe.mod_p_order = cl.order;
            probe.mod_p_full = cl.full;
            if (cl.full) return probe;  // dense image: no conjugator exists
        }
    }

    // simultaneous intertwining system over the generators:
    // rho1(g) X = X rho2(g)  <=>  Q X = X P with (P, Q) = (rho2(g), rho1(g))
    std::vector<std::pair<QMat2, QMat2>> pairs;
    for (const auto& g : pres.generators) {
        QAffine q = to_rational(g);
        pairs.emplace_back(q.blocks[1], q.blocks[0]);
    }
    auto basis = sylvester_nullspace(pairs);
    if (basis.empty()) return probe;

    // singles first, then small integer combinations ordered by max-norm
    for (const auto& X : basis)
        if (det2(X) != 0) {
            probe.zeta = X;
            return probe;
        }
    const int d = static_cast<int>(basis.size());
    for (int norm = 1; norm <= 3; ++norm) {
        std::vector<int> c(static_cast<std::size_t>(d), -norm);
        while (true) {
            int maxabs = 0;
            for (int v : c) maxabs = std::max(maxabs, std::abs(v));
            if (maxabs == norm) {
                QMat2 X;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) X(i, j) = 0;
                for (int t = 0; t < d; ++t)
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j)
                            X(i, j) += Rat(c[static_cast<std::size_t>(t)]) *
                                       basis[static_cast<std::size_t>(t)](i, j);
                if (det2(X) != 0) {
                    probe.zeta = X;
                    return probe;
                }
            }
            std::size_t pos = 0;
            while (pos < c.size() && c[pos] == norm) c[pos++] = -norm;
            if (pos == c.size()) break;
            ++c[pos];
        }
    }
    return probe;
}

/**
 * Extracts M with M * u_g = v_g over all kernel records (u = factor-1
 * translation pair, v = factor-2 pair). The basis is the FIRST TWO records in
 * harvest order with rationally independent u-parts; M is returned only when
 * every record verifies exactly.
 */
template <class S>
std::optional<QMat2> extract_M(const std::vector<HarvestRecord<S>>& records) {
    std::vector<std::pair<QVecX, QVecX>> uv;
    for (const auto& r : records) {
        if (!r.kernel_flag || !is_period_trivial(r.element)) continue;
        if (r.element.k() != 2)
            throw std::invalid_argument("extract_M: requires two-factor records");
        QVecX u(2), v(2);
        for (int i = 0; i < 2; ++i) {
            u(i) = Rat(r.element.translation(i));
            v(i) = Rat(r.element.translation(2 + i));
        }
        uv.emplace_back(std::move(u), std::move(v));
    }

    // first two records with independent u-parts
    int ia = -1, ib = -1;
    for (std::size_t i = 0; i < uv.size() && ib < 0; ++i) {
        const auto& u = uv[i].first;
        if (u(0) == 0 && u(1) == 0) continue;
        if (ia < 0) { ia = static_cast<int>(i); continue; }
        const auto& ua = uv[static_cast<std::size_t>(ia)].first;
        if (ua(0) * u(1) - ua(1) * u(0) != 0) ib = static_cast<int>(i);
    }
    if (ia < 0 || ib < 0) return std::nullopt;

    const auto& [ua, va] = uv[static_cast<std::size_t>(ia)];
    const auto& [ub, vb] = uv[static_cast<std::size_t>(ib)];
    // M * [ua ub] = [va vb]  =>  M = [va vb] * [ua ub]^-1
    Rat det = ua(0) * ub(1) - ua(1) * ub(0);
    QMat2 inv;
    inv(0, 0) = ub(1) / det;
    inv(0, 1) = -ub(0) / det;
    inv(1, 0) = -ua(1) / det;
    inv(1, 1) = ua(0) / det;
    QMat2 cols;
    cols(0, 0) = va(0); cols(0, 1) = vb(0);
    cols(1, 0) = va(1); cols(1, 1) = vb(1);
    QMat2 M = mat2_mul(cols, inv);

    for (const auto& [u, v] : uv) {
        if (M(0, 0) * u(0) + M(0, 1) * u(1) != v(0)) return std::nullopt;
        if (M(1, 0) * u(0) + M(1, 1) * u(1) != v(1)) return std::nullopt;
    }
    return M;
}

enum class IntertwinerVerdict { scalar, zero, other };

inline const char* to_string(IntertwinerVerdict v) {
    switch (v) {
        case IntertwinerVerdict::scalar: return "scalar";
        case IntertwinerVerdict::zero: return "zero";
        default: return "other";
    }
}

struct IntertwinerReport {
    IntertwinerVerdict verdict = IntertwinerVerdict::other;
    bool residuals_vanish = false;
    std::vector<Rat> residual_norms;  ///< per generator: sum |entries| of M*rho1(g) - rho(g)*M
};

/**
 * Residuals of M rho1(g) - rho(g) M per generator, with rho = rho1 (same-rep)
 * or rho2 (cross-rep). Verdict: zero iff M = 0; scalar iff all residuals
 * vanish and M is a scalar matrix; other otherwise.
 */
template <class S>
IntertwinerReport check_intertwiner(const QMat2& M, const Presentation<S>& pres, bool cross_rep) {
    IntertwinerReport rep;
    rep.residuals_vanish = true;
    for (const auto& g : pres.generators) {
        QAffine q = to_rational(g);
        const QMat2& r1 = q.blocks[0];
        const QMat2& rr = cross_rep ? q.blocks[static_cast<std::size_t>(q.k() - 1)] : q.blocks[0];
        QMat2 res;
        Rat norm = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                res(i, j) = (M(i, 0) * r1(0, j) + M(i, 1) * r1(1, j)) -
                            (rr(i, 0) * M(0, j) + rr(i, 1) * M(1, j));
                norm += res(i, j) < 0 ? Rat(-res(i, j)) : res(i, j);
            }
        rep.residual_norms.push_back(norm);
        if (norm != 0) rep.residuals_vanish = false;
    }
    const bool is_zero = M(0, 0) == 0 && M(0, 1) == 0 && M(1, 0) == 0 && M(1, 1) == 0;
    const bool is_scalar = M(0, 1) == 0 && M(1, 0) == 0 && M(0, 0) == M(1, 1) && !is_zero;
    if (is_zero) rep.verdict = IntertwinerVerdict::zero;
    else if (is_scalar && rep.residuals_vanish) rep.verdict = IntertwinerVerdict::scalar;
    else rep.verdict = IntertwinerVerdict::other;
    return rep;
}

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

enum class Verdict { TORSION_LIKE, RANK2_DEPENDENT, RANK4_INDEPENDENT, INCONCLUSIVE };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::TORSION_LIKE: return "TORSION_LIKE";
        case Verdict::RANK2_DEPENDENT: return "RANK2_DEPENDENT";
        case Verdict::RANK4_INDEPENDENT: return "RANK4_INDEPENDENT";
        default: return "INCONCLUSIVE";
    }
}

struct ClassificationReport {
    Verdict verdict = Verdict::INCONCLUSIVE;
    std::string citation;  ///< matched mathematical case, stable "case:" id + prose
    int rank_K = 0;
    int rank_K1 = 0, rank_K2 = 0, rank_H1 = 0, rank_H2 = 0;
    std::optional<QMat2> conjugator;
    std::optional<QMat2> intertwiner;
    std::optional<IntertwinerVerdict> intertwiner_verdict;
    bool mod_p_checked = false;
    bool mod_p_full = false;
    std::size_t mod_p_order = 0;
    long density_prime = 0;
    int depth_used = 0;
    std::size_t elements_found = 0;
    bool search_complete = true;
    std::vector<std::string> diagnostics;
    /// Translation vector of every surviving period-trivial record, as
    /// decimal strings (scalar-type erased for serialization and plotting).
    std::vector<std::vector<std::string>> kernel_translations;
};

namespace detail {

template <class S>
std::vector<HarvestRecord<S>> merge_records(std::vector<HarvestRecord<S>> a,
                                            std::vector<HarvestRecord<S>> b) {
    std::unordered_set<Hash128, Hash128Hasher> seen;
    std::vector<HarvestRecord<S>> out;
    for (auto* src : {&a, &b})
        for (auto& r : *src)
            if (seen.insert(element_hash(r.element)).second) out.push_back(std::move(r));
    return out;
}

}  // namespace detail

/**
 * The full decision tree: isogeny probe, kernel harvest plus targeted
 * commutators at increasing depth (early-stopping once the translation
 * lattice saturates), exact ranks, intertwiner extraction, and the verdict:
 *   rank 0            -> TORSION_LIKE
 *   rank 2, M found   -> RANK2_DEPENDENT
 *   rank 4            -> RANK4_INDEPENDENT
 *   odd / contradictory / truncated evidence -> INCONCLUSIVE, never a guess.
 * A sub-rank equal to 1 at the final depth always forces INCONCLUSIVE (rank-1
 * relative groups are excluded in the limit, so the search is incomplete).
 */
template <class S>
ClassificationReport classify(const Presentation<S>& pres, const SearchConfig& cfg) {
    if (pres.generators.empty()) throw std::invalid_argument("classify: empty presentation");
    if (pres.k() > 2) throw std::invalid_argument("classify: classification covers k <= 2");
    validate_config(cfg);

    ClassificationReport rep;
    rep.density_prime = cfg.density_prime;

    if (pres.k() == 2) {
        ConjugatorProbe probe = detect_conjugator(pres, cfg.density_prime);
        rep.conjugator = probe.zeta;
        rep.mod_p_checked = probe.mod_p_checked;
        rep.mod_p_full = probe.mod_p_full;
        rep.mod_p_order = probe.mod_p_order;
    }

    // deepening schedule with early stop once the lattice saturates
    std::vector<HarvestRecord<S>> records;
    const int full_rank = 2 * pres.k();
    for (int depth = std::min(4, cfg.max_depth);; depth += 2) {
        depth = std::min(depth, cfg.max_depth);
        SearchConfig step = cfg;
        step.max_depth = depth;
        auto h = harvest_kernel(pres, step);
        rep.search_complete = h.complete;
        records = std::move(h.records);
        if (pres.k() == 2) {
            auto tc = targeted_commutators(pres, step);
            rep.search_complete = rep.search_complete && tc.complete;
            records = detail::merge_records(std::move(records), std::move(tc.records));
        }
        rep.depth_used = depth;
        if (relative_rank(records).rank >= full_rank) break;
        if (depth >= cfg.max_depth) break;
    }

    // contradiction policy: drop any record whose kernel flag fails re-check
    {
        std::vector<HarvestRecord<S>> clean;
        for (auto& r : records)
            if (r.kernel_flag && is_period_trivial(r.element)) clean.push_back(std::move(r));
        records = std::move(clean);
    }
    rep.elements_found = records.size();
    for (const auto& r : records) {
        std::vector<std::string> w;
        for (Eigen::Index i = 0; i < r.element.translation.size(); ++i)
            w.push_back(scalar_to_string(r.element.translation(i)));
        rep.kernel_translations.push_back(std::move(w));
    }

    TranslationLattice lat = relative_rank(records);
    rep.rank_K = lat.rank;
    if (pres.k() == 2) {
        SubgroupRanks sr = subgroup_ranks(records);
        rep.rank_K1 = sr.k1;
        rep.rank_K2 = sr.k2;
        rep.rank_H1 = sr.h1;
        rep.rank_H2 = sr.h2;
    } else {
        rep.rank_K1 = lat.rank;
    }

    // a sub-rank stuck at 1 means the search is visibly incomplete: in the
    // limit these groups are {0} or Z^2, so no verdict may be emitted
    const bool rank1_flag = rep.rank_K1 == 1 || rep.rank_K2 == 1 ||
                            rep.rank_H1 == 1 || rep.rank_H2 == 1;
    if (rank1_flag) {
        rep.verdict = Verdict::INCONCLUSIVE;
        rep.citation =
            "case:search-incomplete — a factor translation group has rank 1 at the "
            "final depth; limit groups are {0} or Z^2, so deeper search is required";
        rep.diagnostics.push_back("sub-rank equal to 1 at final depth");
        return rep;
    }

    const bool isogenous = rep.conjugator.has_value();
    const char* family = isogenous ? "isogenous factor pair" : "non-isogenous factor pair";

    if (rep.rank_K == 0) {
        if (!rep.search_complete) {
            rep.verdict = Verdict::INCONCLUSIVE;
            rep.citation =
                "case:truncated — no relative translations found, but the search was "
                "budget-truncated; absence evidence is incomplete";
            rep.diagnostics.push_back("budget truncation with empty harvest");
            return rep;
        }
        rep.verdict = Verdict::TORSION_LIKE;
        rep.citation = pres.k() == 1
            ? "case:single-trivial — kernel search found nothing; consistent with a "
              "trivial relative group (torsion section or trivial kernel)"
            : "case:pair-trivial — kernel search found nothing; consistent with both "
              "sections torsion (relative group {0})";
        rep.diagnostics.push_back(
            "kernel search found nothing; consistent with trivial kernel");
        return rep;
    }

    if (pres.k() == 1) {
        if (rep.rank_K == 2) {
            rep.verdict = Verdict::RANK2_DEPENDENT;
            rep.citation =
                "case:single-generic — single factor with non-torsion section: "
                "relative monodromy group Z^2";
            return rep;
        }
        rep.verdict = Verdict::INCONCLUSIVE;
        rep.citation = "case:single-odd — translation rank 1 at final depth";
        return rep;
    }

    if (rep.rank_K == 4) {
        rep.verdict = Verdict::RANK4_INDEPENDENT;
        rep.citation = std::string("case:pair-independent — ") + family +
                       ", sections independent: relative monodromy group Z^4";
        return rep;
    }

    if (rep.rank_K == 2) {
        if (!rep.search_complete) {
            rep.verdict = Verdict::INCONCLUSIVE;
            rep.citation =
                "case:truncated — rank-2 evidence under a budget-truncated search";
            rep.diagnostics.push_back("budget truncation at rank 2");
            return rep;
        }
        if (rep.rank_K1 == 2) {
            auto M = extract_M(records);
            if (!M) {
                rep.verdict = Verdict::INCONCLUSIVE;
                rep.citation =
                    "case:contradiction — rank-2 lattice admits no consistent "
                    "intertwining matrix";
                rep.diagnostics.push_back("extract_M failed at rank 2");
                return rep;
            }
            rep.intertwiner = M;
            auto iv = check_intertwiner(*M, pres, /*cross_rep=*/!isogenous);
            rep.intertwiner_verdict = iv.verdict;
            rep.verdict = Verdict::RANK2_DEPENDENT;
            if (rep.rank_K2 == 0) {
                rep.citation = std::string("case:pair-one-torsion — ") + family +
                               ": factor-2 translations vanish (torsion-like second "
                               "section); relative monodromy group Z^2, M = 0";
            } else {
                rep.citation = std::string("case:pair-dependent — ") + family +
                               ": rank-2 lattice with intertwining matrix M mapping "
                               "factor-1 shifts to factor-2 shifts (dependent sections)";
            }
            return rep;
        }
        // K1 = 0, K2 = 2: mirrored one-torsion case; v = M u has no content,
        // the dependency runs the other way with the zero matrix
        QMat2 zero;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) zero(i, j) = 0;
        rep.intertwiner = zero;
        rep.intertwiner_verdict = IntertwinerVerdict::zero;
        rep.verdict = Verdict::RANK2_DEPENDENT;
        rep.citation = std::string("case:pair-one-torsion — ") + family +
                       ": factor-1 translations vanish (torsion-like first section); "
                       "relative monodromy group Z^2, M = 0";
        return rep;
    }

    rep.verdict = Verdict::INCONCLUSIVE;
    rep.citation = "case:odd-rank — translation lattice rank " +
                   std::to_string(rep.rank_K) + " does not match any limit case";
    rep.diagnostics.push_back("odd total rank at final depth");
    return rep;
}

// ---------------------------------------------------------------------------
// report serialization
// ---------------------------------------------------------------------------

inline njson qmat2_to_json(const QMat2& m) {
    njson q = njson::array();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) q.push_back(scalar_to_string(m(i, j)));
    return q;
}

inline QMat2 qmat2_from_json(const njson& q) {
    if (q.size() != 4) throw std::invalid_argument("qmat2_from_json: need 4 entries");
    QMat2 m;
    m(0, 0) = scalar_from_string<Rat>(q[0].get<std::string>());
    m(0, 1) = scalar_from_string<Rat>(q[1].get<std::string>());
    m(1, 0) = scalar_from_string<Rat>(q[2].get<std::string>());
    m(1, 1) = scalar_from_string<Rat>(q[3].get<std::string>());
    return m;
}

inline njson report_to_json(const ClassificationReport& rep) {
    njson j;
    j["schema"] = "classification-report/v1";
    j["verdict"] = to_string(rep.verdict);
    j["citation"] = rep.citation;
    j["rank_K"] = rep.rank_K;
    j["rank_K1"] = rep.rank_K1;
    j["rank_K2"] = rep.rank_K2;
    j["rank_H1"] = rep.rank_H1;
    j["rank_H2"] = rep.rank_H2;
    j["conjugator"] = rep.conjugator ? qmat2_to_json(*rep.conjugator) : njson();
    j["intertwiner"] = rep.intertwiner ? qmat2_to_json(*rep.intertwiner) : njson();
    j["intertwiner_verdict"] =
        rep.intertwiner_verdict ? njson(to_string(*rep.intertwiner_verdict)) : njson();
    j["mod_p"] = {{"checked", rep.mod_p_checked},
                  {"prime", rep.density_prime},
                  {"order", rep.mod_p_order},
                  {"full", rep.mod_p_full}};
    j["depth_used"] = rep.depth_used;
    j["elements_found"] = rep.elements_found;
    j["search_complete"] = rep.search_complete;
    j["diagnostics"] = rep.diagnostics;
    return j;
}

inline std::string report_to_text(const ClassificationReport& rep) {
    std::string s;
    s += "verdict: ";
    s += to_string(rep.verdict);
    s += "\ncase: " + rep.citation + "\n";
    s += "ranks: K=" + std::to_string(rep.rank_K) +
         " K1=" + std::to_string(rep.rank_K1) + " K2=" + std::to_string(rep.rank_K2) +
         " H1=" + std::to_string(rep.rank_H1) + " H2=" + std::to_string(rep.rank_H2) + "\n";
    auto mat_line = [](const char* label, const QMat2& m) {
        std::string t(label);
        t += ": [[" + scalar_to_string(m(0, 0)) + ", " + scalar_to_string(m(0, 1)) + "], [" +
             scalar_to_string(m(1, 0)) + ", " + scalar_to_string(m(1, 1)) + "]]\n";
        return t;
    };
    if (rep.conjugator) s += mat_line("conjugator zeta", *rep.conjugator);
    else s += "conjugator zeta: none\n";
    if (rep.intertwiner) {
        s += mat_line("intertwiner M", *rep.intertwiner);
        s += std::string("intertwiner form: ") + to_string(*rep.intertwiner_verdict) + "\n";
    } else {
        s += "intertwiner M: none\n";
    }
    if (rep.mod_p_checked)
        s += "mod-" + std::to_string(rep.density_prime) +
             " block closure: order " + std::to_string(rep.mod_p_order) +
             (rep.mod_p_full ? " (full product group)" : " (proper subgroup)") + "\n";
    s += "search: depth " + std::to_string(rep.depth_used) + ", " +
         std::to_string(rep.elements_found) + " kernel elements, " +
         (rep.search_complete ? "complete" : "budget-truncated") + "\n";
    for (const auto& d : rep.diagnostics) s += "note: " + d + "\n";
    return s;
}

}  // namespace relmono
