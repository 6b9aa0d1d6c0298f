#pragma once
/**
 * @file periods.hpp
 * @brief Numerical period lattice and section logarithm of Legendre curves,
 *        analytic continuation of frames along base-plane paths, and integer
 *        monodromy extraction for closed loops.
 *
 * The representation of a continued frame is always "integer correction times
 * principal value": the continuation tracks, per factor, a unimodular matrix
 * M with (continued periods) = M * (principal periods), the sign state of
 * every square root, and a sign and lattice coordinates for the section
 * logarithm. Fresh samples solve for the real coefficients directly and round
 * them; the distance to the nearest integers is the extraction residual and
 * rounding ambiguity triggers step refinement, so a budget-exhausted path
 * fails loudly instead of guessing.
 */

#include "relmono/affine.hpp"
#include "relmono/scheme.hpp"

#include <string>
#include <vector>

namespace relmono {

// ---------------------------------------------------------------------------
// pointwise special values
// ---------------------------------------------------------------------------

/// Carlson symmetric integral R_F via the duplication algorithm with
/// principal square roots. Relative accuracy ~1e-15 away from the cut.
cplx carlson_rf(cplx x, cplx y, cplx z);

struct PeriodPair {
    cplx omega1;
    cplx omega2;  ///< Im(omega2 / omega1) > 0
};

/**
 * Principal period basis of y^2 = x (x - 1) (x - lambda):
 *   omega1 = 4 R_F(0, 1 - lambda, 1),  omega2 = 4i R_F(0, lambda, 1).
 * Relative accuracy <= 1e-12. Refuses (std::domain_error) within `clearance`
 * of the punctures 0 and 1.
 */
PeriodPair periods_at(cplx lambda, double clearance = 0.05);

/**
 * Principal section logarithm z = int_infinity^(x0, y0) dx/y with
 * y0 = branch * sqrt(x0) * sqrt(x0 - 1) * sqrt(x0 - lambda) (three principal
 * square roots — the branch the value differentiates against), computed as
 * branch * 2 R_F(x0, x0 - 1, x0 - lambda). Accuracy <= 1e-10. Refuses
 * (std::domain_error) when x0 is within `min_distance` of 0, 1, or lambda.
 */
cplx elliptic_log_at(cplx lambda, cplx x0, int branch, double min_distance = 1e-9);

/// Norm of the shortest nonzero vector of Z omega1 + Z omega2 among
/// coefficient pairs in {-1, 0, 1}^2 (sufficient for step control).
double min_lattice_norm(cplx omega1, cplx omega2);

// ---------------------------------------------------------------------------
// frames and continuation
// ---------------------------------------------------------------------------

/// Analytic data of one factor at a base point: the parameter value, the
/// continued period pair, the continued section logarithm, and the current
/// sign of every square-root expression of the section.
struct FactorFrame {
    cplx lambda;
    cplx omega1;
    cplx omega2;
    cplx z;
    std::vector<int> sqrt_signs;
};

struct AnalyticFrame {
    cplx t;
    std::vector<FactorFrame> factors;
};

struct ContinuationOptions {
    double clearance = 0.05;      ///< refusal radius near degenerate parameters
    int initial_segments = 64;    ///< initial sample count over a whole path
    int window = 3;               ///< max per-step invariant jump of any extracted integer
    double integer_tol = 1e-6;    ///< accepted residual for a finished loop
    int max_halvings = 48;        ///< step-refinement budget per sample
};

/**
 * Frame at the path start: principal periods, all square-root signs +1, and
 * the section logarithm matching the section's height value (the sign
 * relating the root product to the principal curve root is resolved here).
 * Validates the on-curve identity numerically at the point.
 */
AnalyticFrame initial_frame(const SchemeSpec& spec, cplx t0,
                            const ContinuationOptions& opts = {});

/// Integer bookkeeping of a finished continuation, per factor.
struct FactorTransport {
    IMat2 period_turn;   ///< continued periods = period_turn * principal(end)
    int log_sign = 1;    ///< continued z = log_sign * principal z + shifts
    Int shift1 = 0, shift2 = 0;  ///< lattice coordinates in the continued basis
};

struct ContinuationRun {
    AnalyticFrame frame;  ///< at the path end
    std::vector<FactorTransport> transport;
    double residual = 0;  ///< max deviation of any extracted integer before rounding
    int frames_sampled = 0;
};

/**
 * Continues a frame along a polyline (open or closed). The start frame must
 * sit at path.front() and itself resolve to near-integer corrections against
 * principal values (initial_frame output does). Adaptive: a sample whose
 * extracted coefficients round ambiguously, jump by more than the window, or
 * move any continued quantity by more than a tenth of the shortest lattice
 * vector is retried at half the step; exceeding the refinement budget raises
 * std::runtime_error naming the location.
 */
ContinuationRun continue_frame(const SchemeSpec& spec, const AnalyticFrame& start,
                               const std::vector<cplx>& path,
                               const ContinuationOptions& opts = {});

// ---------------------------------------------------------------------------
// monodromy extraction
// ---------------------------------------------------------------------------

/// Extracted integer monodromy of one closed loop.
struct ContinuationResult {
    IAffine element;
    double residual = 0;      ///< max deviation of extracted integers before rounding
    int frames_sampled = 0;
};

/**
 * Integer monodromy of a closed loop starting from an initial frame at the
 * loop's base point: per factor the period transformation T = M^T (M the
 * end correction, det +1 enforced) and the section shift w = T (u, v)^T from
 * the end lattice coordinates. Requires the loop to close on the sign cover
 * (all square-root signs and the logarithm sign restored) — otherwise throws
 * std::runtime_error naming the loop. A residual above opts.integer_tol
 * triggers one refine-and-retry with doubled sampling before failing.
 */
ContinuationResult loop_monodromy(const SchemeSpec& spec, const AnalyticFrame& base_frame,
                                  const LoopPath& loop,
                                  const ContinuationOptions& opts = {});

/**
 * Extracts every loop from a shared initial frame and assembles the integer
 * presentation. All loops must share the frame's base point and close on the
 * sign cover; errors name the offending loop. Generator order equals loop
 * order; provenance records the loop name.
 */
Presentation<Int> build_presentation(const SchemeSpec& spec, const std::vector<LoopPath>& loops,
                                     const ContinuationOptions& opts = {});

}  // namespace relmono
