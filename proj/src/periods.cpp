/**
 * @file periods.cpp
 * @brief Period and section-logarithm numerics with integer-corrected
 *        analytic continuation.
 */

#include "relmono/periods.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace relmono {

// ---------------------------------------------------------------------------
// pointwise special values
// ---------------------------------------------------------------------------

cplx carlson_rf(cplx x, cplx y, cplx z) {
    // NOTE: duplication shrinks the spread geometrically; the tail is summed
    // by the degree-5 expansion around the common limit (error ~ spread^6)
    cplx a = (x + y + z) / 3.0;
    for (int iter = 0; iter < 120; ++iter) {
        const double spread = std::max({std::abs(x - a), std::abs(y - a), std::abs(z - a)});
        if (spread < 1e-6 * std::abs(a)) break;
        const cplx sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const cplx lam = sx * sy + sy * sz + sz * sx;
        x = (x + lam) * 0.25;
        y = (y + lam) * 0.25;
        z = (z + lam) * 0.25;
        a = (x + y + z) / 3.0;
    }
    const cplx X = 1.0 - x / a, Y = 1.0 - y / a, Z = -X - Y;
    const cplx e2 = X * Y - Z * Z, e3 = X * Y * Z;
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) /
           std::sqrt(a);
}

namespace {

std::string format_param(cplx v) {
    std::ostringstream os;
    os << std::real(v) << (std::imag(v) < 0 ? "" : "+") << std::imag(v) << "i";
    return os.str();
}

}  // namespace

PeriodPair periods_at(cplx lambda, double clearance) {
    if (!std::isfinite(std::real(lambda)) || !std::isfinite(std::imag(lambda)))
        throw std::domain_error("periods_at: non-finite parameter");
    if (std::abs(lambda) < clearance)
        throw std::domain_error("periods_at: lambda = " + format_param(lambda) +
                                " is within clearance of the puncture 0");
    if (std::abs(lambda - 1.0) < clearance)
        throw std::domain_error("periods_at: lambda = " + format_param(lambda) +
                                " is within clearance of the puncture 1");
    PeriodPair p;
    p.omega1 = 4.0 * carlson_rf(cplx(0, 0), 1.0 - lambda, cplx(1, 0));
    p.omega2 = cplx(0, 4) * carlson_rf(cplx(0, 0), lambda, cplx(1, 0));
    if (!(std::imag(p.omega2 / p.omega1) > 0))
        throw std::domain_error("periods_at: degenerate basis at lambda = " +
                                format_param(lambda));
    return p;
}

cplx elliptic_log_at(cplx lambda, cplx x0, int branch, double min_distance) {
    if (branch != 1 && branch != -1)
        throw std::invalid_argument("elliptic_log_at: branch must be +1 or -1");
    const double d = std::min({std::abs(x0), std::abs(x0 - 1.0), std::abs(x0 - lambda)});
    if (d < min_distance) {
        std::ostringstream os;
        os << "elliptic_log_at: x0 = " << format_param(x0)
           << " is degenerate (distance " << d << " to {0, 1, lambda})";
        throw std::domain_error(os.str());
    }
    return static_cast<double>(branch) * 2.0 * carlson_rf(x0, x0 - 1.0, x0 - lambda);
}

double min_lattice_norm(cplx omega1, cplx omega2) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
            if (a == 0 && b == 0) continue;
            best = std::min(best, std::abs(static_cast<double>(a) * omega1 +
                                           static_cast<double>(b) * omega2));
        }
    return best;
}

// ---------------------------------------------------------------------------
// continuation internals
// ---------------------------------------------------------------------------

namespace {

/// Real coefficients (a, b) with w = a * p + b * q for an R-basis p, q of C.
std::pair<double, double> real_coeffs(cplx w, cplx p, cplx q) {
    const double det = std::real(p) * std::imag(q) - std::imag(p) * std::real(q);
    if (std::abs(det) < 1e-300)
        throw std::runtime_error("continuation: degenerate period basis");
    const double a = (std::real(w) * std::imag(q) - std::imag(w) * std::real(q)) / det;
    const double b = (std::real(p) * std::imag(w) - std::imag(p) * std::real(w)) / det;
    return {a, b};
}

double int_deviation(double v) { return std::abs(v - std::lround(v)); }

/// Integer state of one factor relative to principal values at the current
/// point, together with the continued analytic values it encodes.
struct FactorState {
    long m11 = 1, m12 = 0, m21 = 0, m22 = 1;  // continued periods = M * principal
    int sigma = 1;                            // z sign against the principal value
    long u = 0, v = 0;                        // lattice coordinates, continued basis
    std::vector<int> sqrt_signs;
    cplx omega1, omega2;
    cplx z;
    std::vector<cplx> sqrt_values;
    cplx lambda;
};

// ambiguous or discontinuous sample: retry at half step, remembering why
struct SampleReject {
    const char* reason;
};

/// Principal analytic data of one factor at a point.
struct PrincipalSample {
    cplx lambda;
    PeriodPair periods;
    cplx x0;
    cplx z;       // principal-branch logarithm
    cplx y_curve; // curve root the principal logarithm follows (dz = -dx / y)
    std::vector<cplx> sqrt_principal;
};

PrincipalSample principal_at(const FactorSpec& f, cplx t, const ContinuationOptions& opts) {
    PrincipalSample s;
    s.lambda = f.lambda.eval(t);
    s.periods = periods_at(s.lambda, 0.3 * opts.clearance);
    s.x0 = f.section.x.eval(t);
    s.z = elliptic_log_at(s.lambda, s.x0, 1, 1e-9);
    // NOTE: the principal logarithm differentiates to -1 over the product of
    // the three principal square roots (not the principal root of the product)
    s.y_curve = std::sqrt(s.x0) * std::sqrt(s.x0 - 1.0) * std::sqrt(s.x0 - s.lambda);
    for (const auto& arg : f.section.sqrt_args)
        s.sqrt_principal.push_back(std::sqrt(arg.eval(t)));
    return s;
}

/// Logarithm sign of a continued root product against the principal curve
/// root: +1 when they agree, -1 when they are opposite. The two values are
/// square roots of the same polynomial value, so anything but a near-exact
/// match of one sign signals a broken state.
template <class Reject>
int log_sign_of(const std::vector<cplx>& root_values, const PrincipalSample& ps) {
    cplx y = 1.0;
    for (const cplx& val : root_values) y *= val;
    const cplx ratio = y / ps.y_curve;
    if (std::abs(ratio - 1.0) > 1e-3 && std::abs(ratio + 1.0) > 1e-3)
        throw Reject{"the root product strays from the curve root"};
    return std::abs(ratio - 1.0) < std::abs(ratio + 1.0) ? 1 : -1;
}

/// Resolves a frame's integer state against principal values at its point.
/// The frame must fit near-integer corrections; otherwise std::invalid_argument.
std::vector<FactorState> resolve_states(const SchemeSpec& spec, const AnalyticFrame& frame,
                                        const ContinuationOptions& opts) {
    if (static_cast<int>(frame.factors.size()) != spec.k())
        throw std::invalid_argument("continuation: frame factor count mismatch");
    const double fit_tol = 1e-5;
    std::vector<FactorState> states;
    for (int i = 0; i < spec.k(); ++i) {
        const auto& ff = frame.factors[static_cast<std::size_t>(i)];
        const PrincipalSample ps =
            principal_at(spec.factors[static_cast<std::size_t>(i)], frame.t, opts);
        if (std::abs(ff.lambda - ps.lambda) > 1e-9 * std::max(1.0, std::abs(ps.lambda)))
            throw std::invalid_argument("continuation: frame parameter value disagrees "
                                        "with the family at its base point");
        FactorState st;
        st.lambda = ps.lambda;
        const auto [a1, b1] = real_coeffs(ff.omega1, ps.periods.omega1, ps.periods.omega2);
        const auto [a2, b2] = real_coeffs(ff.omega2, ps.periods.omega1, ps.periods.omega2);
        const double dev_m = std::max({int_deviation(a1), int_deviation(b1),
                                       int_deviation(a2), int_deviation(b2)});
        if (dev_m > fit_tol)
            throw std::invalid_argument("continuation: frame periods are not an integer "
                                        "transform of principal values at its point");
        st.m11 = std::lround(a1); st.m12 = std::lround(b1);
        st.m21 = std::lround(a2); st.m22 = std::lround(b2);
        if (std::labs(st.m11 * st.m22 - st.m12 * st.m21) != 1)
            throw std::invalid_argument("continuation: frame period correction is not "
                                        "unimodular");
        st.omega1 = ff.omega1;
        st.omega2 = ff.omega2;
        st.sqrt_signs = ff.sqrt_signs;
        if (st.sqrt_signs.size() != ps.sqrt_principal.size())
            throw std::invalid_argument("continuation: frame root-sign count mismatch");
        for (std::size_t j = 0; j < ps.sqrt_principal.size(); ++j)
            st.sqrt_values.push_back(static_cast<double>(st.sqrt_signs[j]) *
                                     ps.sqrt_principal[j]);
        // the sign is read off pointwise from the root product, which stays
        // well defined even where the section value approaches 2-torsion and
        // both candidate lattice fits become numerically indistinguishable
        st.sigma = log_sign_of<std::invalid_argument>(st.sqrt_values, ps);
        const auto [cu, cv] = real_coeffs(ff.z - static_cast<double>(st.sigma) * ps.z,
                                          ff.omega1, ff.omega2);
        if (std::max(int_deviation(cu), int_deviation(cv)) > fit_tol)
            throw std::invalid_argument("continuation: frame logarithm is not "
                                        "lattice-consistent with principal values");
        st.u = std::lround(cu);
        st.v = std::lround(cv);
        st.z = ff.z;
        states.push_back(std::move(st));
    }
    return states;
}

/// Advances one factor's state to the principal sample at the next point.
/// Throws SampleReject when rounding is ambiguous or a jump is too large.
void advance_factor(FactorState& st, const PrincipalSample& ps,
                    const ContinuationOptions& opts) {
    // periods: both continued basis vectors expressed in the new principal basis
    const auto [a1, b1] = real_coeffs(st.omega1, ps.periods.omega1, ps.periods.omega2);
    const auto [a2, b2] = real_coeffs(st.omega2, ps.periods.omega1, ps.periods.omega2);
    const double dev_m = std::max({int_deviation(a1), int_deviation(b1),
                                   int_deviation(a2), int_deviation(b2)});
    if (dev_m > 1.0 / 3.0) throw SampleReject{"period rounding is ambiguous"};
    const long n11 = std::lround(a1), n12 = std::lround(b1);
    const long n21 = std::lround(a2), n22 = std::lround(b2);
    if (n11 * n22 - n12 * n21 != 1)
        throw SampleReject{"period correction lost unimodularity"};
    // NOTE: the raw entry change scales with the accumulated correction, so
    // the window applies to the invariant step jump M_old^{-1} M_new, which
    // a single branch-cut crossing keeps at 2
    const long j11 = st.m22 * n11 - st.m12 * n21, j12 = st.m22 * n12 - st.m12 * n22;
    const long j21 = st.m11 * n21 - st.m21 * n11, j22 = st.m11 * n22 - st.m21 * n12;
    if (std::max({std::labs(j11 - 1), std::labs(j12), std::labs(j21),
                  std::labs(j22 - 1)}) > opts.window)
        throw SampleReject{"period correction jumped outside the window"};
    const cplx w1 = static_cast<double>(n11) * ps.periods.omega1 +
                    static_cast<double>(n12) * ps.periods.omega2;
    const cplx w2 = static_cast<double>(n21) * ps.periods.omega1 +
                    static_cast<double>(n22) * ps.periods.omega2;
    const double cell = min_lattice_norm(w1, w2);
    if (std::abs(w1 - st.omega1) > 0.1 * cell || std::abs(w2 - st.omega2) > 0.1 * cell)
        throw SampleReject{"period value jumped"};

    // square-root signs by nearest continuation; comparable distances are
    // ambiguous, large relative motion means the step straddled a zero
    std::vector<int> signs = st.sqrt_signs;
    std::vector<cplx> vals(ps.sqrt_principal.size());
    for (std::size_t j = 0; j < ps.sqrt_principal.size(); ++j) {
        const cplx keep = static_cast<double>(signs[j]) * ps.sqrt_principal[j];
        const double dk = std::abs(keep - st.sqrt_values[j]);
        const double df = std::abs(keep + st.sqrt_values[j]);
        if (std::max(dk, df) < 2.0 * std::min(dk, df))
            throw SampleReject{"root sign is ambiguous"};
        if (df < dk) signs[j] = -signs[j];
        vals[j] = static_cast<double>(signs[j]) * ps.sqrt_principal[j];
        if (std::abs(vals[j] - st.sqrt_values[j]) > 0.5 * std::abs(st.sqrt_values[j]))
            throw SampleReject{"root value jumped"};
    }

    // logarithm: the sign is slaved to the continued root product through
    // dz = -dx / y, so it reads off pointwise; scoring it by nearest value
    // instead would degenerate wherever the section value approaches
    // 2-torsion, where both signs continue the value equally well
    const int best_sigma = log_sign_of<SampleReject>(vals, ps);
    const auto [cu, cv] =
        real_coeffs(st.z - static_cast<double>(best_sigma) * ps.z, w1, w2);
    if (std::max(int_deviation(cu), int_deviation(cv)) > 1.0 / 3.0)
        throw SampleReject{"logarithm rounding is ambiguous"};
    const long best_u = std::lround(cu), best_v = std::lround(cv);
    const cplx best_z = static_cast<double>(best_sigma) * ps.z +
                        static_cast<double>(best_u) * w1 +
                        static_cast<double>(best_v) * w2;
    // the window again applies to the invariant step jump: the change of the
    // shift measured in one fixed principal basis. That difference is the
    // principal logarithm's own cut datum for this step, so it stays small
    // no matter how large the accumulated lattice coordinates have grown
    const long du = best_u - st.u, dv = best_v - st.v;
    if (std::max(std::labs(du * st.m11 + dv * st.m21),
                 std::labs(du * st.m12 + dv * st.m22)) > opts.window)
        throw SampleReject{"logarithm shift jumped outside the window"};
    if (std::abs(best_z - st.z) > 0.1 * cell)
        throw SampleReject{"logarithm value jumped"};

    st.m11 = n11; st.m12 = n12; st.m21 = n21; st.m22 = n22;
    st.omega1 = w1;
    st.omega2 = w2;
    st.sigma = best_sigma;
    st.u = best_u;
    st.v = best_v;
    st.z = best_z;
    st.sqrt_signs = std::move(signs);
    st.sqrt_values = std::move(vals);
    st.lambda = ps.lambda;
}

}  // namespace

// ---------------------------------------------------------------------------
// frames and continuation
// ---------------------------------------------------------------------------

AnalyticFrame initial_frame(const SchemeSpec& spec, cplx t0, const ContinuationOptions& opts) {
    validate_scheme(spec);
    AnalyticFrame frame;
    frame.t = t0;
    for (const auto& f : spec.factors) {
        FactorFrame ff;
        ff.lambda = f.lambda.eval(t0);
        const PeriodPair pp = periods_at(ff.lambda, 0.3 * opts.clearance);
        ff.omega1 = pp.omega1;
        ff.omega2 = pp.omega2;
        ff.sqrt_signs.assign(f.section.sqrt_args.size(), 1);

        // resolve the sign relating the root product to the principal curve
        // root (the product of the three principal square roots, which is the
        // branch the principal logarithm differentiates against)
        const cplx x0 = f.section.x.eval(t0);
        cplx y_section = 1.0;
        for (const auto& arg : f.section.sqrt_args) y_section *= std::sqrt(arg.eval(t0));
        const cplx rhs = x0 * (x0 - 1.0) * (x0 - ff.lambda);
        if (std::abs(y_section * y_section - rhs) > 1e-9 * std::max(1.0, std::abs(rhs)))
            throw std::domain_error("initial_frame: the on-curve identity fails "
                                    "numerically at the base point");
        const cplx y_curve =
            std::sqrt(x0) * std::sqrt(x0 - 1.0) * std::sqrt(x0 - ff.lambda);
        const int sign =
            std::abs(y_section - y_curve) <= std::abs(y_section + y_curve) ? 1 : -1;
        ff.z = elliptic_log_at(ff.lambda, x0, sign, 1e-9);
        frame.factors.push_back(std::move(ff));
    }
    return frame;
}

ContinuationRun continue_frame(const SchemeSpec& spec, const AnalyticFrame& start,
                               const std::vector<cplx>& path,
                               const ContinuationOptions& opts) {
    validate_scheme(spec);
    if (path.size() < 2)
        throw std::invalid_argument("continue_frame: the path needs at least two points");
    if (std::abs(start.t - path.front()) > 1e-12)
        throw std::invalid_argument("continue_frame: the frame is not at the path start");

    ContinuationRun run;
    run.residual = 0;
    run.frames_sampled = 1;
    std::vector<FactorState> states = resolve_states(spec, start, opts);

    double total_len = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        total_len += std::abs(path[i + 1] - path[i]);
    if (total_len < 1e-12)
        throw std::invalid_argument("continue_frame: the path has no length");
    const double base_step = total_len / std::max(1, opts.initial_segments);

    for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
        const cplx a = path[seg], b = path[seg + 1];
        const double seg_len = std::abs(b - a);
        if (seg_len < 1e-15) continue;
        const cplx dir = (b - a) / seg_len;
        const double min_step = seg_len / std::ldexp(1.0, opts.max_halvings);
        double done = 0;
        double step = std::min(base_step, seg_len);
        while (done < seg_len - 1e-13) {
            step = std::min(step, seg_len - done);
            // land exactly on the vertex so closed loops end on their start point
            const bool last = done + step >= seg_len * (1 - 1e-12);
            const cplx t_next = last ? b : a + (done + step) * dir;
            std::vector<FactorState> trial = states;
            bool ok = true;
            const char* reason = "";
            try {
                for (int i = 0; i < spec.k(); ++i) {
                    const PrincipalSample ps = principal_at(
                        spec.factors[static_cast<std::size_t>(i)], t_next, opts);
                    advance_factor(trial[static_cast<std::size_t>(i)], ps, opts);
                }
            } catch (const SampleReject& r) {
                ok = false;
                reason = r.reason;
            }
            if (!ok) {
                step *= 0.5;
                if (step < min_step)
                    throw std::runtime_error(
                        "continue_frame: no unambiguous continuation near t = " +
                        format_param(t_next) + " (" + reason + ")");
                continue;
            }
            states = std::move(trial);
            ++run.frames_sampled;
            done += step;
            step = std::min(step * 2.0, base_step);  // recover after refinement
        }
    }

    // closure solve at the exact endpoint: the deviation of every held integer
    // from its defining real solve is the extraction residual
    run.residual = 0;
    for (int i = 0; i < spec.k(); ++i) {
        const FactorState& st = states[static_cast<std::size_t>(i)];
        const PrincipalSample ps =
            principal_at(spec.factors[static_cast<std::size_t>(i)], path.back(), opts);
        const auto [a1, b1] = real_coeffs(st.omega1, ps.periods.omega1, ps.periods.omega2);
        const auto [a2, b2] = real_coeffs(st.omega2, ps.periods.omega1, ps.periods.omega2);
        run.residual = std::max(
            {run.residual, std::abs(a1 - static_cast<double>(st.m11)),
             std::abs(b1 - static_cast<double>(st.m12)),
             std::abs(a2 - static_cast<double>(st.m21)),
             std::abs(b2 - static_cast<double>(st.m22))});
        const auto [cu, cv] = real_coeffs(
            st.z - static_cast<double>(st.sigma) * ps.z, st.omega1, st.omega2);
        run.residual = std::max({run.residual, std::abs(cu - static_cast<double>(st.u)),
                                 std::abs(cv - static_cast<double>(st.v))});
    }

    run.frame.t = path.back();
    for (int i = 0; i < spec.k(); ++i) {
        const FactorState& st = states[static_cast<std::size_t>(i)];
        FactorFrame ff;
        ff.lambda = st.lambda;
        ff.omega1 = st.omega1;
        ff.omega2 = st.omega2;
        ff.z = st.z;
        ff.sqrt_signs = st.sqrt_signs;
        run.frame.factors.push_back(std::move(ff));

        FactorTransport tr;
        tr.period_turn(0, 0) = st.m11;
        tr.period_turn(0, 1) = st.m12;
        tr.period_turn(1, 0) = st.m21;
        tr.period_turn(1, 1) = st.m22;
        tr.log_sign = st.sigma;
        tr.shift1 = st.u;
        tr.shift2 = st.v;
        run.transport.push_back(std::move(tr));
    }
    return run;
}

// ---------------------------------------------------------------------------
// monodromy extraction
// ---------------------------------------------------------------------------

namespace {

ContinuationResult extract_once(const SchemeSpec& spec, const AnalyticFrame& base_frame,
                                const LoopPath& loop, const ContinuationOptions& opts) {
    // the extraction formulas assume a normalized start: identity period
    // correction and zero lattice coordinates (initial_frame output)
    const std::vector<FactorState> start_states = resolve_states(spec, base_frame, opts);
    for (const FactorState& st : start_states) {
        const bool identity_m =
            st.m11 == 1 && st.m12 == 0 && st.m21 == 0 && st.m22 == 1;
        if (!identity_m || st.u != 0 || st.v != 0)
            throw std::invalid_argument("loop_monodromy: the base frame is not "
                                        "principally normalized");
    }

    ContinuationRun run = continue_frame(spec, base_frame, loop.vertices, opts);

    ContinuationResult out;
    out.residual = run.residual;
    out.frames_sampled = run.frames_sampled;
    out.element.translation = IVecX(2 * spec.k());
    for (int i = 0; i < spec.k(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (run.frame.factors[idx].sqrt_signs != base_frame.factors[idx].sqrt_signs)
            throw std::runtime_error("loop '" + loop.name +
                                     "' does not close on the section cover "
                                     "(a square-root sign flips)");
        const FactorTransport& tr = run.transport[idx];
        if (tr.log_sign != start_states[idx].sigma)
            throw std::runtime_error("loop '" + loop.name +
                                     "' does not close on the section cover "
                                     "(the logarithm sign flips)");
        IMat2 T;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) T(r, c) = tr.period_turn(c, r);
        if (det2(T) != 1)
            throw std::runtime_error("loop '" + loop.name +
                                     "' produced an orientation-reversing period map");
        out.element.blocks.push_back(T);
        out.element.translation(2 * i) = T(0, 0) * tr.shift1 + T(0, 1) * tr.shift2;
        out.element.translation(2 * i + 1) = T(1, 0) * tr.shift1 + T(1, 1) * tr.shift2;
    }
    validate_element(out.element);
    return out;
}

}  // namespace

ContinuationResult loop_monodromy(const SchemeSpec& spec, const AnalyticFrame& base_frame,
                                  const LoopPath& loop, const ContinuationOptions& opts) {
    validate_loop(loop);
    if (std::abs(base_frame.t - loop.base_point) > 1e-12)
        throw std::invalid_argument("loop_monodromy: the frame is not at the base of "
                                    "loop '" + loop.name + "'");
    ContinuationResult first = extract_once(spec, base_frame, loop, opts);
    if (first.residual < opts.integer_tol) return first;
    ContinuationOptions fine = opts;
    fine.initial_segments = 2 * opts.initial_segments;
    ContinuationResult second = extract_once(spec, base_frame, loop, fine);
    second.frames_sampled += first.frames_sampled;
    if (second.residual < opts.integer_tol) return second;
    std::ostringstream os;
    os << "loop '" << loop.name << "': extraction residual " << second.residual
       << " exceeds tolerance " << opts.integer_tol << " after refinement";
    throw std::runtime_error(os.str());
}

Presentation<Int> build_presentation(const SchemeSpec& spec,
                                     const std::vector<LoopPath>& loops,
                                     const ContinuationOptions& opts) {
    if (loops.empty()) throw std::invalid_argument("build_presentation: no loops given");
    const cplx base = loops.front().base_point;
    for (const auto& l : loops) {
        validate_loop(l);
        if (std::abs(l.base_point - base) > 1e-12)
            throw std::invalid_argument("build_presentation: loop '" + l.name +
                                        "' has a different base point");
        if (!loop_closes_on_cover(spec, l))
            throw std::invalid_argument("build_presentation: loop '" + l.name +
                                        "' does not close on the section cover");
    }
    const AnalyticFrame frame = initial_frame(spec, base, opts);
    Presentation<Int> pres;
    for (const auto& l : loops) {
        ContinuationResult r = loop_monodromy(spec, frame, l, opts);
        pres.add(l.name, r.element, "loop:" + l.name);
    }
    return pres;
}

}  // namespace relmono
