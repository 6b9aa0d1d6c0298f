#pragma once
/**
 * @file scheme.hpp
 * @brief Family descriptions and base-plane geometry: exact polynomial and
 *        rational-function algebra over Q, scheme specifications (one Legendre
 *        parameter map and one section per factor), branch-point extraction,
 *        polygonal loop paths with clearance validation, and automatic lasso
 *        construction around the finite branch points.
 *
 * Everything downstream of the numerics (period continuation) consumes loops
 * built here; everything upstream (configs) serializes these types.
 */

#include "relmono/numeric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace relmono {

// ---------------------------------------------------------------------------
// polynomials and rational functions over Q
// ---------------------------------------------------------------------------

/// Dense polynomial over Q, coefficients ascending (c[0] + c[1] t + ...).
/// Trailing zero coefficients are trimmed by every operation.
struct QPoly {
    std::vector<Rat> c;

    QPoly() = default;
    explicit QPoly(std::vector<Rat> coeffs) : c(std::move(coeffs)) { trim(); }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    int degree() const { return static_cast<int>(c.size()) - 1; }  ///< -1 for zero
    bool is_zero() const { return c.empty(); }
    Rat leading() const { return c.empty() ? Rat(0) : c.back(); }

    bool operator==(const QPoly& o) const { return c == o.c; }
    bool operator!=(const QPoly& o) const { return !(*this == o); }
};

QPoly poly_add(const QPoly& a, const QPoly& b);
QPoly poly_sub(const QPoly& a, const QPoly& b);
QPoly poly_mul(const QPoly& a, const QPoly& b);
QPoly poly_scale(const QPoly& a, const Rat& s);
/// Quotient and remainder of a by b (b nonzero).
std::pair<QPoly, QPoly> poly_divmod(const QPoly& a, const QPoly& b);
/// Monic greatest common divisor; gcd(0, 0) = 0.
QPoly poly_gcd(QPoly a, QPoly b);

Rat poly_eval(const QPoly& p, const Rat& t);
cplx poly_eval(const QPoly& p, cplx t);

/// All complex roots with multiplicity. Degrees 1 and 2 are closed-form;
/// higher degrees use deterministic Durand-Kerner iteration (double
/// precision, residual-polished).
std::vector<cplx> poly_roots(const QPoly& p);

/// Convenience constructors: constant and monomial-sum from longs.
QPoly poly_const(const Rat& v);
QPoly poly_from(std::initializer_list<long> ascending);

/// Ratio of polynomials, kept reduced (gcd divided out, monic denominator).
struct RationalFunction {
    QPoly num;
    QPoly den = poly_const(1);

    RationalFunction() : num() {}
    RationalFunction(QPoly n, QPoly d);

    void reduce();
    bool is_constant() const { return num.degree() <= 0 && den.degree() == 0; }
    bool is_zero() const { return num.is_zero(); }

    /// Empty when the denominator vanishes at t.
    std::optional<Rat> eval(const Rat& t) const;
    cplx eval(cplx t) const;

    bool operator==(const RationalFunction& o) const;
    bool operator!=(const RationalFunction& o) const { return !(*this == o); }
};

RationalFunction rf_add(const RationalFunction& a, const RationalFunction& b);
RationalFunction rf_sub(const RationalFunction& a, const RationalFunction& b);
RationalFunction rf_mul(const RationalFunction& a, const RationalFunction& b);
RationalFunction rf_const(const Rat& v);
/// The coordinate function t.
RationalFunction rf_t();

njson poly_to_json(const QPoly& p);
QPoly poly_from_json(const njson& j);
njson rf_to_json(const RationalFunction& f);
RationalFunction rf_from_json(const njson& j);

// ---------------------------------------------------------------------------
// scheme specification
// ---------------------------------------------------------------------------

/// A section of one factor: the x-coordinate as a rational function of the
/// base coordinate and the square-root expressions whose product is y.
struct SectionSpec {
    RationalFunction x;
    std::vector<RationalFunction> sqrt_args;
};

/// One elliptic factor: the Legendre parameter as a function of the base
/// coordinate plus its marked section.
struct FactorSpec {
    RationalFunction lambda;
    SectionSpec section;
};

struct SchemeSpec {
    std::vector<FactorSpec> factors;
    int k() const { return static_cast<int>(factors.size()); }
};

/**
 * Validates a scheme: at least one factor; every parameter map nonconstant;
 * for every section the product of the squared roots equals
 * x (x - 1) (x - lambda) as an exact rational-function identity, and x is not
 * identically 0, 1, or lambda. Throws std::invalid_argument with the factor
 * index on failure.
 */
void validate_scheme(const SchemeSpec& spec);

/// Two-factor fixture with a shared parameter map (both factors carry
/// lambda(t) = t) and sections x = 2 and x = t + 1.
SchemeSpec iso_example_scheme();
/// Two-factor fixture with mirrored parameter maps lambda1 = t,
/// lambda2 = 2 - t and x = 2 sections on both factors.
SchemeSpec noniso_example_scheme();

/**
 * Finite branch points in the base plane, sorted by (re, im) and
 * deduplicated: the punctures 0 and 1, the preimages of {0, 1, infinity}
 * under every parameter map, the zeros and poles of every square-root
 * argument, and the isolated collisions of a section's x with {0, 1, lambda}.
 */
std::vector<cplx> branch_points(const SchemeSpec& spec);

/**
 * Parity (0 or 1) of each square-root argument's vanishing order at the
 * given base point, flattened over factors in order then arguments in order.
 * A small loop around the point flips exactly the roots with parity 1.
 */
std::vector<int> sqrt_flip_parity(const SchemeSpec& spec, cplx point);

// ---------------------------------------------------------------------------
// loop paths
// ---------------------------------------------------------------------------

/// Closed polygonal path in the base plane. The vertex list starts and ends
/// at the base point (front() == back() == base_point).
struct LoopPath {
    std::string name;
    cplx base_point{};
    std::vector<cplx> vertices;
};

/// Throws std::invalid_argument (naming the loop) unless the path is a closed
/// polygon of at least two distinct vertices anchored at its base point.
void validate_loop(const LoopPath& loop);

/// Distance from point p to the segment [a, b].
double point_segment_distance(cplx p, cplx a, cplx b);

/// Minimum distance from any path segment to any of the given points.
double loop_clearance(const LoopPath& loop, const std::vector<cplx>& points);

/// Reversed orientation; name gains a trailing tilde (or loses one).
LoopPath reverse_loop(const LoopPath& loop);

/**
 * Concatenation with the group-composition convention: the composite is
 * traversed along b FIRST and then along a, so extracting the composite loop
 * equals the product extract(a) . extract(b). Requires a shared base point.
 */
LoopPath composite_loop(const LoopPath& a, const LoopPath& b);

/// n-fold repetition (negative n repeats the reverse; n = 0 is invalid).
LoopPath power_loop(const LoopPath& loop, int n);

/// composite a . b . a^-1 . b^-1 under the same convention.
LoopPath commutator_loop(const LoopPath& a, const LoopPath& b);

struct LoopOptions {
    cplx base_point{0.25, 0.25};
    double clearance = 0.05;   ///< minimum distance to every branch point
    int circle_segments = 16;  ///< polygon resolution of the lasso circle
};

/**
 * One lasso per finite branch point: a straight spoke from the base point to
 * a counterclockwise circle of radius 2 * clearance around the point, and
 * back. Spokes passing too close to another branch point are detoured around
 * it. Loops are named "lasso_<point>" and returned in branch-point order;
 * every returned loop satisfies the clearance against all branch points
 * (std::invalid_argument naming the loop otherwise).
 */
std::vector<LoopPath> auto_loops(const SchemeSpec& spec, const LoopOptions& opts = {});

/// Compact display form of a base-plane point ("-1", "0.5", "1+0.5i").
std::string format_point(cplx z);

/// Winding number of the closed polygon around a point off the path.
int winding_number(const LoopPath& loop, cplx point);

/**
 * Algebraic closure test on the square-root cover: the loop closes iff every
 * root expression is flipped an even number of times, i.e. for each argument
 * the sum over branch points of winding * vanishing parity is even.
 */
bool loop_closes_on_cover(const SchemeSpec& spec, const LoopPath& loop);

njson loop_to_json(const LoopPath& loop);
LoopPath loop_from_json(const njson& j);
njson scheme_to_json(const SchemeSpec& spec);
SchemeSpec scheme_from_json(const njson& j);

}  // namespace relmono
