#pragma once
/**
 * @file affine.hpp
 * @brief Exact algebra of simultaneous monodromy elements: k unimodular 2x2
 *        blocks (the period action) plus a 2k translation (the logarithm
 *        shift), composed by the cocycle law
 *            w_{gh} = w_g + blockdiag(T_g) * w_h.
 *
 * Elements are stored structurally (blocks + translation); the equivalent
 * (2k+1)x(2k+1) block-triangular matrix is never materialized. Operations are
 * templated on the scalar so the same algebra serves integral models (Int)
 * and rationally conjugated ones (Rat).
 */

#include "relmono/numeric.hpp"


#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relmono {

// ---------------------------------------------------------------------------
// 2x2 helpers (explicit forms; determinants and inverses never go through
// generic decompositions)
// ---------------------------------------------------------------------------

template <class S>
S det2(const Mat2<S>& m) {
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

template <class S>
Mat2<S> mat2_mul(const Mat2<S>& a, const Mat2<S>& b) {
    Mat2<S> c;
    c(0, 0) = a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0);
    c(0, 1) = a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1);
    c(1, 0) = a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0);
    c(1, 1) = a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
    return c;
}

/// Inverse of a determinant-1 matrix: the adjugate.
template <class S>
Mat2<S> inverse_unimodular(const Mat2<S>& m) {
    Mat2<S> inv;
    inv(0, 0) = m(1, 1);
    inv(0, 1) = -m(0, 1);
    inv(1, 0) = -m(1, 0);
    inv(1, 1) = m(0, 0);
    return inv;
}

template <class S>
Mat2<S> mat2_identity() {
    Mat2<S> m;
    m(0, 0) = 1; m(0, 1) = 0;
    m(1, 0) = 0; m(1, 1) = 1;
    return m;
}

template <class S>
bool mat2_is_identity(const Mat2<S>& m) {
    return m(0, 0) == 1 && m(0, 1) == 0 && m(1, 0) == 0 && m(1, 1) == 1;
}

template <class S>
bool mat2_eq(const Mat2<S>& a, const Mat2<S>& b) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (a(i, j) != b(i, j)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// AffineElement
// ---------------------------------------------------------------------------

/**
 * One element (T_g, w_g): per-factor SL2 blocks and an integer (or rational)
 * translation of length 2k. Invariants: k >= 1, translation length 2k, every
 * block has determinant exactly 1.
 */
template <class S>
struct AffineElement {
    std::vector<Mat2<S>> blocks;
    VecX<S> translation;

    int k() const { return static_cast<int>(blocks.size()); }

    bool operator==(const AffineElement& o) const {
        if (blocks.size() != o.blocks.size()) return false;
        for (std::size_t i = 0; i < blocks.size(); ++i)
            if (!mat2_eq(blocks[i], o.blocks[i])) return false;
        if (translation.size() != o.translation.size()) return false;
        for (Eigen::Index i = 0; i < translation.size(); ++i)
            if (translation(i) != o.translation(i)) return false;
        return true;
    }
};

using IAffine = AffineElement<Int>;
using QAffine = AffineElement<Rat>;

template <class S>
void validate_element(const AffineElement<S>& x) {
    if (x.blocks.empty()) throw std::invalid_argument("affine element: k must be >= 1");
    if (x.translation.size() != 2 * static_cast<Eigen::Index>(x.blocks.size()))
        throw std::invalid_argument("affine element: translation length must be 2k");
    for (const auto& b : x.blocks)
        if (det2(b) != 1)
            throw std::invalid_argument("affine element: block determinant must be 1");
}

template <class S>
AffineElement<S> identity_element(int k) {
    if (k < 1) throw std::invalid_argument("identity_element: k must be >= 1");
    AffineElement<S> e;
    e.blocks.assign(static_cast<std::size_t>(k), mat2_identity<S>());
    e.translation = VecX<S>(2 * k);
    for (Eigen::Index i = 0; i < e.translation.size(); ++i) e.translation(i) = 0;
    return e;
}

/// blockdiag(blocks) * w, the action of the period part on translations.
template <class S>
VecX<S> block_action(const std::vector<Mat2<S>>& blocks, const VecX<S>& w) {
    VecX<S> out(w.size());
    for (std::size_t f = 0; f < blocks.size(); ++f) {
        const Eigen::Index o = 2 * static_cast<Eigen::Index>(f);
        out(o) = blocks[f](0, 0) * w(o) + blocks[f](0, 1) * w(o + 1);
        out(o + 1) = blocks[f](1, 0) * w(o) + blocks[f](1, 1) * w(o + 1);
    }
    return out;
}

/// Group law: blocks multiply; w_{gh} = w_g + blockdiag(T_g) * w_h.
template <class S>
AffineElement<S> compose(const AffineElement<S>& x, const AffineElement<S>& y) {
    if (x.k() != y.k()) throw std::invalid_argument("compose: factor count mismatch");
    AffineElement<S> out;
    out.blocks.reserve(x.blocks.size());
    for (std::size_t f = 0; f < x.blocks.size(); ++f)
        out.blocks.push_back(mat2_mul(x.blocks[f], y.blocks[f]));
    VecX<S> shifted = block_action(x.blocks, y.translation);
    out.translation = VecX<S>(x.translation.size());
    for (Eigen::Index i = 0; i < out.translation.size(); ++i)
        out.translation(i) = x.translation(i) + shifted(i);
    return out;
}

template <class S>
AffineElement<S> inverse(const AffineElement<S>& x) {
    AffineElement<S> out;
    out.blocks.reserve(x.blocks.size());
    for (const auto& b : x.blocks) out.blocks.push_back(inverse_unimodular(b));
    VecX<S> moved = block_action(out.blocks, x.translation);
    out.translation = VecX<S>(x.translation.size());
    for (Eigen::Index i = 0; i < out.translation.size(); ++i)
        out.translation(i) = -moved(i);
    return out;
}

template <class S>
AffineElement<S> commutator(const AffineElement<S>& x, const AffineElement<S>& y) {
    return compose(compose(x, y), compose(inverse(x), inverse(y)));
}

template <class S>
AffineElement<S> direct_sum(const AffineElement<S>& x1, const AffineElement<S>& x2) {
    AffineElement<S> out;
    out.blocks = x1.blocks;
    out.blocks.insert(out.blocks.end(), x2.blocks.begin(), x2.blocks.end());
    out.translation = VecX<S>(x1.translation.size() + x2.translation.size());
    for (Eigen::Index i = 0; i < x1.translation.size(); ++i)
        out.translation(i) = x1.translation(i);
    for (Eigen::Index i = 0; i < x2.translation.size(); ++i)
        out.translation(x1.translation.size() + i) = x2.translation(i);
    return out;
}

/// Projection onto factor i (1-based), a group homomorphism.
template <class S>
AffineElement<S> project_factor(const AffineElement<S>& x, int i) {
    if (i < 1 || i > x.k()) throw std::out_of_range("project_factor: index out of range");
    AffineElement<S> out;
    out.blocks.push_back(x.blocks[static_cast<std::size_t>(i - 1)]);
    out.translation = VecX<S>(2);
    out.translation(0) = x.translation(2 * (i - 1));
    out.translation(1) = x.translation(2 * (i - 1) + 1);
    return out;
}

template <class S>
bool is_period_trivial(const AffineElement<S>& x) {
    for (const auto& b : x.blocks)
        if (!mat2_is_identity(b)) return false;
    return true;
}

template <class S>
bool is_identity(const AffineElement<S>& x) {
    if (!is_period_trivial(x)) return false;
    for (Eigen::Index i = 0; i < x.translation.size(); ++i)
        if (x.translation(i) != 0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// rational conjugation (isogeny action)
// ---------------------------------------------------------------------------

template <class S>
Rat to_rat_scalar(const S& x) { return Rat(x); }

template <class S>
QAffine to_rational(const AffineElement<S>& x) {
    QAffine out;
    out.blocks.reserve(x.blocks.size());
    for (const auto& b : x.blocks) {
        QMat2 q;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) q(i, j) = to_rat_scalar(b(i, j));
        out.blocks.push_back(q);
    }
    out.translation = QVecX(x.translation.size());
    for (Eigen::Index i = 0; i < x.translation.size(); ++i)
        out.translation(i) = to_rat_scalar(x.translation(i));
    return out;
}

/// Exact narrowing: succeeds only when every entry is an integer.
inline std::optional<IAffine> to_integral(const QAffine& x) {
    IAffine out;
    out.blocks.reserve(x.blocks.size());
    for (const auto& b : x.blocks) {
        IMat2 m;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                if (denominator_of(b(i, j)) != 1) return std::nullopt;
                m(i, j) = numerator_of(b(i, j));
            }
        out.blocks.push_back(m);
    }
    out.translation = IVecX(x.translation.size());
    for (Eigen::Index i = 0; i < x.translation.size(); ++i) {
        if (denominator_of(x.translation(i)) != 1) return std::nullopt;
        out.translation(i) = numerator_of(x.translation(i));
    }
    return out;
}

/**
 * Conjugation by per-factor invertible rational matrices:
 *   T_i -> zeta_i^T * T_i * (zeta_i^T)^{-1},    w_i -> zeta_i^T * w_i.
 * A group homomorphism; preserves period-triviality. The result generally has
 * rational entries — callers needing an integral model rescale translations
 * via saturate_translations().
 */
template <class S>
QAffine isogeny_transform(const AffineElement<S>& x, const std::vector<QMat2>& zetas) {
    if (zetas.size() != x.blocks.size())
        throw std::invalid_argument("isogeny_transform: one zeta per factor required");
    QAffine q = to_rational(x);
    QAffine out;
    out.translation = QVecX(q.translation.size());
    for (std::size_t f = 0; f < zetas.size(); ++f) {
        const QMat2& z = zetas[f];
        Rat d = det2(z);
        if (d == 0) throw std::invalid_argument("isogeny_transform: singular zeta");
        QMat2 zt;
        zt(0, 0) = z(0, 0); zt(0, 1) = z(1, 0);
        zt(1, 0) = z(0, 1); zt(1, 1) = z(1, 1);
        QMat2 zt_inv;
        zt_inv(0, 0) = zt(1, 1) / d; zt_inv(0, 1) = -zt(0, 1) / d;
        zt_inv(1, 0) = -zt(1, 0) / d; zt_inv(1, 1) = zt(0, 0) / d;
        out.blocks.push_back(mat2_mul(mat2_mul(zt, q.blocks[f]), zt_inv));
        const Eigen::Index o = 2 * static_cast<Eigen::Index>(f);
        out.translation(o) = zt(0, 0) * q.translation(o) + zt(0, 1) * q.translation(o + 1);
        out.translation(o + 1) = zt(1, 0) * q.translation(o) + zt(1, 1) * q.translation(o + 1);
    }
    return out;
}

/// k = 1 convenience overload.
template <class S>
QAffine isogeny_transform(const AffineElement<S>& x, const QMat2& zeta) {
    return isogeny_transform(x, std::vector<QMat2>{zeta});
}

/**
 * Clear translation denominators across a whole family of elements by the
 * least common multiple D: w -> D*w (blocks untouched). This is a group
 * endomorphism on the subgroup generated (the cocycle law is linear in w), so
 * classification ranks computed after saturation match the unsaturated ones.
 * Returns D.
 */
inline Int saturate_translations(std::vector<QAffine>& xs) {
    Int d = 1;
    for (const auto& x : xs)
        for (Eigen::Index i = 0; i < x.translation.size(); ++i)
            d = boost::multiprecision::lcm(d, denominator_of(x.translation(i)));
    if (d != 1)
        for (auto& x : xs)
            for (Eigen::Index i = 0; i < x.translation.size(); ++i)
                x.translation(i) *= Rat(d);
    return d;
}

// ---------------------------------------------------------------------------
// canonical serialization (dedup keys, cache hashing) and JSON
// ---------------------------------------------------------------------------

template <class S>
std::string canonical_string(const AffineElement<S>& x) {
    std::string s = "k" + std::to_string(x.k());
    for (const auto& b : x.blocks) {
        s += ";B";
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                s += scalar_to_string(b(i, j));
                s += ',';
            }
    }
    s += ";T";
    for (Eigen::Index i = 0; i < x.translation.size(); ++i) {
        s += scalar_to_string(x.translation(i));
        s += ',';
    }
    return s;
}

template <class S>
Hash128 element_hash(const AffineElement<S>& x) {
    return hash128(canonical_string(x));
}

/// JSON form: blocks as row-major decimal-string quadruples, translation as
/// decimal-string array. Integers never pass through 64-bit types.
template <class S>
njson element_to_json(const AffineElement<S>& x) {
    njson j;
    j["k"] = x.k();
    njson blocks = njson::array();
    for (const auto& b : x.blocks) {
        njson q = njson::array();
        for (int i = 0; i < 2; ++i)
            for (int col = 0; col < 2; ++col) q.push_back(scalar_to_string(b(i, col)));
        blocks.push_back(q);
    }
    j["blocks"] = blocks;
    njson tr = njson::array();
    for (Eigen::Index i = 0; i < x.translation.size(); ++i)
        tr.push_back(scalar_to_string(x.translation(i)));
    j["translation"] = tr;
    return j;
}

template <class S>
AffineElement<S> element_from_json(const njson& j) {
    AffineElement<S> x;
    const int k = j.at("k").get<int>();
    if (k < 1) throw std::invalid_argument("element_from_json: k must be >= 1");
    const njson& blocks = j.at("blocks");
    if (static_cast<int>(blocks.size()) != k)
        throw std::invalid_argument("element_from_json: block count != k");
    for (const auto& q : blocks) {
        if (q.size() != 4) throw std::invalid_argument("element_from_json: block needs 4 entries");
        Mat2<S> b;
        b(0, 0) = scalar_from_string<S>(q[0].get<std::string>());
        b(0, 1) = scalar_from_string<S>(q[1].get<std::string>());
        b(1, 0) = scalar_from_string<S>(q[2].get<std::string>());
        b(1, 1) = scalar_from_string<S>(q[3].get<std::string>());
        x.blocks.push_back(b);
    }
    const njson& tr = j.at("translation");
    if (static_cast<int>(tr.size()) != 2 * k)
        throw std::invalid_argument("element_from_json: translation length != 2k");
    x.translation = VecX<S>(2 * k);
    for (Eigen::Index i = 0; i < x.translation.size(); ++i)
        x.translation(i) = scalar_from_string<S>(tr[static_cast<std::size_t>(i)].get<std::string>());
    validate_element(x);
    return x;
}

// ---------------------------------------------------------------------------
// Presentation
// ---------------------------------------------------------------------------

/**
 * Ordered, named generator set sharing one factor count; provenance records
 * which loop (or synthetic construction) produced each generator. Generator
 * order is part of the contract: the word search is deterministic in it.
 */
template <class S>
struct Presentation {
    std::vector<std::string> names;
    std::vector<AffineElement<S>> generators;
    std::vector<std::string> provenance;

    int k() const { return generators.empty() ? 0 : generators.front().k(); }
    std::size_t size() const { return generators.size(); }

    void add(std::string name, AffineElement<S> g, std::string origin) {
        validate_element(g);
        if (!generators.empty() && g.k() != k())
            throw std::invalid_argument("presentation: factor count mismatch");
        names.push_back(std::move(name));
        generators.push_back(std::move(g));
        provenance.push_back(std::move(origin));
    }
};

using IPresentation = Presentation<Int>;
using QPresentation = Presentation<Rat>;

template <class S>
QPresentation presentation_to_rational(const Presentation<S>& p) {
    QPresentation out;
    out.names = p.names;
    out.provenance = p.provenance;
    out.generators.reserve(p.generators.size());
    for (const auto& g : p.generators) out.generators.push_back(to_rational(g));
    return out;
}

template <class S>
njson presentation_to_json(const Presentation<S>& p) {
    njson j;
    j["k"] = p.k();
    njson gens = njson::array();
    for (std::size_t i = 0; i < p.generators.size(); ++i) {
        njson g;
        g["name"] = p.names[i];
        g["element"] = element_to_json(p.generators[i]);
        g["provenance"] = p.provenance[i];
        gens.push_back(g);
    }
    j["generators"] = gens;
    return j;
}

template <class S>
Presentation<S> presentation_from_json(const njson& j) {
    Presentation<S> p;
    for (const auto& g : j.at("generators"))
        p.add(g.at("name").get<std::string>(),
              element_from_json<S>(g.at("element")),
              g.value("provenance", std::string("unspecified")));
    if (p.generators.empty()) throw std::invalid_argument("presentation_from_json: no generators");
    if (j.contains("k") && j.at("k").get<int>() != p.k())
        throw std::invalid_argument("presentation_from_json: k field disagrees with generators");
    return p;
}

}  // namespace relmono
