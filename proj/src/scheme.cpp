/**
 * @file scheme.cpp
 * @brief Exact rational-function algebra, branch-point extraction, and loop
 *        geometry for family descriptions.
 */

#include "relmono/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace relmono {

// ---------------------------------------------------------------------------
// polynomial algebra
// ---------------------------------------------------------------------------

QPoly poly_add(const QPoly& a, const QPoly& b) {
    std::vector<Rat> c(std::max(a.c.size(), b.c.size()), Rat(0));
    for (std::size_t i = 0; i < a.c.size(); ++i) c[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) c[i] += b.c[i];
    return QPoly(std::move(c));
}

QPoly poly_sub(const QPoly& a, const QPoly& b) {
    std::vector<Rat> c(std::max(a.c.size(), b.c.size()), Rat(0));
    for (std::size_t i = 0; i < a.c.size(); ++i) c[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) c[i] -= b.c[i];
    return QPoly(std::move(c));
}

QPoly poly_mul(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return QPoly();
    std::vector<Rat> c(a.c.size() + b.c.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) c[i + j] += a.c[i] * b.c[j];
    return QPoly(std::move(c));
}

QPoly poly_scale(const QPoly& a, const Rat& s) {
    std::vector<Rat> c = a.c;
    for (auto& x : c) x *= s;
    return QPoly(std::move(c));
}

std::pair<QPoly, QPoly> poly_divmod(const QPoly& a, const QPoly& b) {
    if (b.is_zero()) throw std::invalid_argument("poly_divmod: division by zero polynomial");
    QPoly rem = a;
    if (rem.degree() < b.degree()) return {QPoly(), rem};
    std::vector<Rat> q(static_cast<std::size_t>(rem.degree() - b.degree() + 1), Rat(0));
    while (!rem.is_zero() && rem.degree() >= b.degree()) {
        const int shift = rem.degree() - b.degree();
        const Rat f = rem.leading() / b.leading();
        q[static_cast<std::size_t>(shift)] = f;
        std::vector<Rat> sub(static_cast<std::size_t>(shift), Rat(0));
        sub.insert(sub.end(), b.c.begin(), b.c.end());
        for (auto& x : sub) x *= f;
        rem = poly_sub(rem, QPoly(std::move(sub)));
    }
    return {QPoly(std::move(q)), rem};
}

QPoly poly_gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r = poly_divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.is_zero()) a = poly_scale(a, Rat(1) / a.leading());
    return a;
}

Rat poly_eval(const QPoly& p, const Rat& t) {
    Rat acc = 0;
    for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = acc * t + *it;
    return acc;
}

cplx poly_eval(const QPoly& p, cplx t) {
    cplx acc = 0;
    for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = acc * t + to_double(*it);
    return acc;
}

QPoly poly_const(const Rat& v) { return QPoly({v}); }

QPoly poly_from(std::initializer_list<long> ascending) {
    std::vector<Rat> c;
    for (long v : ascending) c.emplace_back(v);
    return QPoly(std::move(c));
}

std::vector<cplx> poly_roots(const QPoly& p) {
    const int deg = p.degree();
    if (deg <= 0) return {};
    if (deg == 1) {
        return {cplx(to_double(Rat(-p.c[0] / p.c[1])), 0.0)};
    }
    if (deg == 2) {
        const cplx a = to_double(p.c[2]), b = to_double(p.c[1]), c = to_double(p.c[0]);
        const cplx disc = std::sqrt(b * b - 4.0 * a * c);
        // NOTE: pick the larger-magnitude numerator first for stability
        const cplx q = (std::real(std::conj(b) * disc) >= 0.0) ? -(b + disc) / 2.0
                                                               : -(b - disc) / 2.0;
        if (std::abs(q) < 1e-300) return {cplx(0, 0), -b / a - cplx(0, 0)};
        return {q / a, c / q};
    }
    // Durand-Kerner with deterministic start values
    std::vector<cplx> coeff(static_cast<std::size_t>(deg) + 1);
    for (int i = 0; i <= deg; ++i)
        coeff[static_cast<std::size_t>(i)] =
            to_double(Rat(p.c[static_cast<std::size_t>(i)] / p.leading()));
    auto eval_monic = [&](cplx z) {
        cplx acc = 0;
        for (int i = deg; i >= 0; --i) acc = acc * z + coeff[static_cast<std::size_t>(i)];
        return acc;
    };
    std::vector<cplx> r(static_cast<std::size_t>(deg));
    const cplx seed(0.4, 0.9);
    cplx pw = 1.0;
    for (auto& z : r) {
        pw *= seed;
        z = pw;
    }
    for (int iter = 0; iter < 500; ++iter) {
        double shift = 0;
        for (int i = 0; i < deg; ++i) {
            cplx denom = 1.0;
            for (int j = 0; j < deg; ++j)
                if (j != i) denom *= r[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(j)];
            const cplx delta = eval_monic(r[static_cast<std::size_t>(i)]) / denom;
            r[static_cast<std::size_t>(i)] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < 1e-14) break;
    }
    std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
        if (std::real(a) != std::real(b)) return std::real(a) < std::real(b);
        return std::imag(a) < std::imag(b);
    });
    return r;
}

// ---------------------------------------------------------------------------
// rational functions
// ---------------------------------------------------------------------------

RationalFunction::RationalFunction(QPoly n, QPoly d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero())
        throw std::invalid_argument("RationalFunction: zero denominator");
    reduce();
}

void RationalFunction::reduce() {
    if (num.is_zero()) {
        den = poly_const(1);
        return;
    }
    QPoly g = poly_gcd(num, den);
    if (g.degree() > 0) {
        num = poly_divmod(num, g).first;
        den = poly_divmod(den, g).first;
    }
    const Rat lead = den.leading();
    num = poly_scale(num, Rat(1) / lead);
    den = poly_scale(den, Rat(1) / lead);
}

std::optional<Rat> RationalFunction::eval(const Rat& t) const {
    const Rat d = poly_eval(den, t);
    if (d == 0) return std::nullopt;
    return poly_eval(num, t) / d;
}

cplx RationalFunction::eval(cplx t) const { return poly_eval(num, t) / poly_eval(den, t); }

bool RationalFunction::operator==(const RationalFunction& o) const {
    return poly_mul(num, o.den) == poly_mul(o.num, den);
}

RationalFunction rf_add(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den)),
                            poly_mul(a.den, b.den));
}

RationalFunction rf_sub(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(poly_sub(poly_mul(a.num, b.den), poly_mul(b.num, a.den)),
                            poly_mul(a.den, b.den));
}

RationalFunction rf_mul(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(poly_mul(a.num, b.num), poly_mul(a.den, b.den));
}

RationalFunction rf_const(const Rat& v) { return RationalFunction(poly_const(v), poly_const(1)); }

RationalFunction rf_t() { return RationalFunction(poly_from({0, 1}), poly_const(1)); }

njson poly_to_json(const QPoly& p) {
    njson j = njson::array();
    for (const auto& c : p.c) j.push_back(scalar_to_string(c));
    return j;
}

QPoly poly_from_json(const njson& j) {
    if (!j.is_array()) throw std::invalid_argument("poly_from_json: expected array");
    std::vector<Rat> c;
    for (const auto& e : j) c.push_back(scalar_from_string<Rat>(e.get<std::string>()));
    return QPoly(std::move(c));
}

njson rf_to_json(const RationalFunction& f) {
    return njson{{"num", poly_to_json(f.num)}, {"den", poly_to_json(f.den)}};
}

RationalFunction rf_from_json(const njson& j) {
    if (!j.contains("num") || !j.contains("den"))
        throw std::invalid_argument("rf_from_json: need num and den");
    return RationalFunction(poly_from_json(j["num"]), poly_from_json(j["den"]));
}

// ---------------------------------------------------------------------------
// scheme validation and fixtures
// ---------------------------------------------------------------------------

void validate_scheme(const SchemeSpec& spec) {
    if (spec.factors.empty())
        throw std::invalid_argument("scheme: needs at least one factor");
    for (std::size_t i = 0; i < spec.factors.size(); ++i) {
        const auto& f = spec.factors[i];
        const std::string tag = "scheme factor " + std::to_string(i + 1);
        if (f.lambda.is_constant())
            throw std::invalid_argument(tag + ": parameter map must be nonconstant");
        const auto& sec = f.section;
        if (sec.sqrt_args.empty())
            throw std::invalid_argument(tag + ": section needs at least one root expression");
        // exact on-curve identity: product of squared roots = x (x-1) (x-lambda)
        RationalFunction prod = rf_const(1);
        for (const auto& arg : sec.sqrt_args) prod = rf_mul(prod, arg);
        const RationalFunction want = rf_mul(
            rf_mul(sec.x, rf_sub(sec.x, rf_const(1))), rf_sub(sec.x, f.lambda));
        if (prod != want)
            throw std::invalid_argument(
                tag + ": squared section height does not match x (x-1) (x-lambda)");
        if (sec.x.is_zero() || sec.x == rf_const(1) || sec.x == f.lambda)
            throw std::invalid_argument(tag + ": section x must avoid 0, 1, and the parameter");
    }
}

SchemeSpec iso_example_scheme() {
    SchemeSpec spec;
    FactorSpec f1;
    f1.lambda = rf_t();
    f1.section.x = rf_const(2);
    // y^2 = 2 * 1 * (2 - t)
    f1.section.sqrt_args = {RationalFunction(poly_from({4, -2}), poly_const(1))};
    FactorSpec f2;
    f2.lambda = rf_t();
    f2.section.x = RationalFunction(poly_from({1, 1}), poly_const(1));
    // y^2 = (t+1) * t * 1
    f2.section.sqrt_args = {RationalFunction(poly_from({0, 1, 1}), poly_const(1))};
    spec.factors = {f1, f2};
    validate_scheme(spec);
    return spec;
}

SchemeSpec noniso_example_scheme() {
    SchemeSpec spec;
    FactorSpec f1;
    f1.lambda = rf_t();
    f1.section.x = rf_const(2);
    f1.section.sqrt_args = {RationalFunction(poly_from({4, -2}), poly_const(1))};
    FactorSpec f2;
    f2.lambda = RationalFunction(poly_from({2, -1}), poly_const(1));
    f2.section.x = rf_const(2);
    // y^2 = 2 * 1 * (2 - (2 - t)) = 2 t
    f2.section.sqrt_args = {RationalFunction(poly_from({0, 2}), poly_const(1))};
    spec.factors = {f1, f2};
    validate_scheme(spec);
    return spec;
}

namespace {

void add_point(std::vector<cplx>& pts, cplx z) {
    for (cplx p : pts)
        if (std::abs(p - z) < 1e-9) return;
    pts.push_back(z);
}

void add_roots(std::vector<cplx>& pts, const QPoly& p) {
    for (cplx r : poly_roots(p)) add_point(pts, r);
}

}  // namespace

std::vector<cplx> branch_points(const SchemeSpec& spec) {
    validate_scheme(spec);
    std::vector<cplx> pts;
    add_point(pts, cplx(0, 0));
    add_point(pts, cplx(1, 0));
    for (const auto& f : spec.factors) {
        add_roots(pts, f.lambda.num);                             // lambda = 0
        add_roots(pts, poly_sub(f.lambda.num, f.lambda.den));     // lambda = 1
        add_roots(pts, f.lambda.den);                             // lambda = infinity
        for (const auto& arg : f.section.sqrt_args) {
            add_roots(pts, arg.num);
            add_roots(pts, arg.den);
        }
        const auto& x = f.section.x;
        add_roots(pts, x.num);                                    // x = 0
        add_roots(pts, poly_sub(x.num, x.den));                   // x = 1
        add_roots(pts, poly_sub(poly_mul(x.num, f.lambda.den),    // x = lambda
                                poly_mul(f.lambda.num, x.den)));
    }
    std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
        if (std::abs(std::real(a) - std::real(b)) > 1e-9) return std::real(a) < std::real(b);
        return std::imag(a) < std::imag(b) - 1e-9;
    });
    return pts;
}

std::vector<int> sqrt_flip_parity(const SchemeSpec& spec, cplx point) {
    std::vector<int> out;
    for (const auto& f : spec.factors) {
        for (const auto& arg : f.section.sqrt_args) {
            int mult = 0;
            for (cplx r : poly_roots(arg.num))
                if (std::abs(r - point) < 1e-9) ++mult;
            for (cplx r : poly_roots(arg.den))
                if (std::abs(r - point) < 1e-9) ++mult;
            out.push_back(mult % 2);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// loop geometry
// ---------------------------------------------------------------------------

void validate_loop(const LoopPath& loop) {
    const std::string tag = "loop '" + loop.name + "'";
    if (loop.vertices.size() < 3)
        throw std::invalid_argument(tag + ": needs at least three vertices");
    if (std::abs(loop.vertices.front() - loop.vertices.back()) > 1e-12)
        throw std::invalid_argument(tag + ": path is not closed");
    if (std::abs(loop.vertices.front() - loop.base_point) > 1e-12)
        throw std::invalid_argument(tag + ": path is not anchored at its base point");
    bool distinct = false;
    for (cplx v : loop.vertices)
        if (std::abs(v - loop.base_point) > 1e-12) distinct = true;
    if (!distinct) throw std::invalid_argument(tag + ": path is degenerate");
}

double point_segment_distance(cplx p, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 < 1e-300) return std::abs(p - a);
    double s = std::real(std::conj(ab) * (p - a)) / len2;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(p - (a + s * ab));
}

double loop_clearance(const LoopPath& loop, const std::vector<cplx>& points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < loop.vertices.size(); ++i)
        for (cplx p : points)
            best = std::min(best,
                            point_segment_distance(p, loop.vertices[i], loop.vertices[i + 1]));
    return best;
}

LoopPath reverse_loop(const LoopPath& loop) {
    LoopPath out = loop;
    std::reverse(out.vertices.begin(), out.vertices.end());
    if (!out.name.empty() && out.name.back() == '~') out.name.pop_back();
    else out.name += '~';
    return out;
}

LoopPath composite_loop(const LoopPath& a, const LoopPath& b) {
    if (std::abs(a.base_point - b.base_point) > 1e-12)
        throw std::invalid_argument("composite_loop: loops '" + a.name + "' and '" + b.name +
                                    "' have different base points");
    LoopPath out;
    out.name = a.name + "*" + b.name;
    out.base_point = a.base_point;
    out.vertices = b.vertices;  // traversed first
    out.vertices.insert(out.vertices.end(), a.vertices.begin() + 1, a.vertices.end());
    return out;
}

LoopPath power_loop(const LoopPath& loop, int n) {
    if (n == 0) throw std::invalid_argument("power_loop: exponent must be nonzero");
    const LoopPath base = n > 0 ? loop : reverse_loop(loop);
    LoopPath out = base;
    for (int i = 1; i < std::abs(n); ++i) {
        out.vertices.insert(out.vertices.end(), base.vertices.begin() + 1, base.vertices.end());
    }
    out.name = loop.name + "^" + std::to_string(n);
    return out;
}

LoopPath commutator_loop(const LoopPath& a, const LoopPath& b) {
    LoopPath out = composite_loop(a, composite_loop(b, composite_loop(reverse_loop(a),
                                                                      reverse_loop(b))));
    out.name = "[" + a.name + "," + b.name + "]";
    return out;
}

int winding_number(const LoopPath& loop, cplx point) {
    double total = 0;
    for (std::size_t i = 0; i + 1 < loop.vertices.size(); ++i) {
        const cplx a = loop.vertices[i] - point, b = loop.vertices[i + 1] - point;
        if (std::abs(a) < 1e-12 || std::abs(b) < 1e-12)
            throw std::invalid_argument("winding_number: point lies on the path");
        total += std::arg(b / a);
    }
    return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

bool loop_closes_on_cover(const SchemeSpec& spec, const LoopPath& loop) {
    std::vector<int> flips;
    for (cplx b : branch_points(spec)) {
        const int w = winding_number(loop, b);
        if (w == 0) continue;
        const std::vector<int> parity = sqrt_flip_parity(spec, b);
        if (flips.empty()) flips.assign(parity.size(), 0);
        for (std::size_t j = 0; j < parity.size(); ++j) flips[j] += w * parity[j];
    }
    for (int f : flips)
        if (f % 2 != 0) return false;
    return true;
}

std::string format_point(cplx z) {
    auto fmt = [](double v) {
        double r = std::round(v * 1e6) / 1e6;
        if (r == 0.0) r = 0.0;  // normalize -0
        std::ostringstream os;
        os << r;
        return os.str();
    };
    const double re = std::real(z), im = std::imag(z);
    if (std::abs(im) < 1e-9) return fmt(re);
    if (std::abs(re) < 1e-9) return fmt(im) + "i";
    return fmt(re) + (im > 0 ? "+" : "") + fmt(im) + "i";
}

std::vector<LoopPath> auto_loops(const SchemeSpec& spec, const LoopOptions& opts) {
    if (opts.clearance <= 0)
        throw std::invalid_argument("auto_loops: clearance must be positive");
    if (opts.circle_segments < 8)
        throw std::invalid_argument("auto_loops: need at least eight circle segments");
    const std::vector<cplx> pts = branch_points(spec);
    const double delta = opts.clearance;
    const double radius = 2.0 * delta;
    const cplx base = opts.base_point;
    for (cplx p : pts)
        if (std::abs(p - base) < 4.0 * delta)
            throw std::invalid_argument("auto_loops: base point too close to branch point " +
                                        format_point(p));

    std::vector<LoopPath> loops;
    for (cplx target : pts) {
        LoopPath loop;
        loop.name = "lasso_" + format_point(target);
        loop.base_point = base;

        const cplx dir = (target - base) / std::abs(target - base);
        const cplx entry = target - radius * dir;

        // spoke with detours around other branch points sitting near it
        std::vector<std::pair<double, cplx>> detours;
        const cplx seg = entry - base;
        const double seg_len2 = std::norm(seg);
        for (cplx other : pts) {
            if (std::abs(other - target) < 1e-12) continue;
            double s = std::real(std::conj(seg) * (other - base)) / seg_len2;
            if (s <= 0.0 || s >= 1.0) continue;
            const cplx proj = base + s * seg;
            if (std::abs(proj - other) >= 2.5 * delta) continue;
            cplx normal = proj - other;
            if (std::abs(normal) < 1e-9) normal = cplx(0, 1) * dir;  // sit exactly on the spoke
            normal /= std::abs(normal);
            detours.emplace_back(s, other + 3.0 * delta * normal);
        }
        std::sort(detours.begin(), detours.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });

        std::vector<cplx> outward;
        outward.push_back(base);
        for (const auto& [s, v] : detours) outward.push_back(v);
        outward.push_back(entry);

        loop.vertices = outward;
        // counterclockwise circle starting and ending at the entry point
        const double theta0 = std::arg(entry - target);
        for (int j = 1; j <= opts.circle_segments; ++j) {
            const double th = theta0 + 2.0 * M_PI * j / opts.circle_segments;
            loop.vertices.push_back(target + radius * cplx(std::cos(th), std::sin(th)));
        }
        for (auto it = outward.rbegin() + 1; it != outward.rend(); ++it)
            loop.vertices.push_back(*it);

        validate_loop(loop);
        const double clear = loop_clearance(loop, pts);
        if (clear < delta * 0.99)
            throw std::invalid_argument("auto_loops: loop '" + loop.name +
                                        "' violates clearance (distance " +
                                        std::to_string(clear) + " < " + std::to_string(delta) +
                                        ")");
        loops.push_back(std::move(loop));
    }
    return loops;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

njson cplx_to_json(cplx z) { return njson::array({std::real(z), std::imag(z)}); }

cplx cplx_from_json(const njson& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("point: expected [re, im]");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

njson loop_to_json(const LoopPath& loop) {
    njson j;
    j["name"] = loop.name;
    j["base"] = cplx_to_json(loop.base_point);
    njson verts = njson::array();
    for (cplx v : loop.vertices) verts.push_back(cplx_to_json(v));
    j["vertices"] = verts;
    return j;
}

LoopPath loop_from_json(const njson& j) {
    LoopPath loop;
    loop.name = j.at("name").get<std::string>();
    loop.base_point = cplx_from_json(j.at("base"));
    for (const auto& v : j.at("vertices")) loop.vertices.push_back(cplx_from_json(v));
    validate_loop(loop);
    return loop;
}

njson scheme_to_json(const SchemeSpec& spec) {
    njson factors = njson::array();
    for (const auto& f : spec.factors) {
        njson args = njson::array();
        for (const auto& a : f.section.sqrt_args) args.push_back(rf_to_json(a));
        factors.push_back(njson{{"lambda", rf_to_json(f.lambda)},
                                {"section", njson{{"x", rf_to_json(f.section.x)},
                                                  {"sqrt_args", args}}}});
    }
    return njson{{"factors", factors}};
}

SchemeSpec scheme_from_json(const njson& j) {
    SchemeSpec spec;
    for (const auto& fj : j.at("factors")) {
        FactorSpec f;
        f.lambda = rf_from_json(fj.at("lambda"));
        f.section.x = rf_from_json(fj.at("section").at("x"));
        for (const auto& aj : fj.at("section").at("sqrt_args"))
            f.section.sqrt_args.push_back(rf_from_json(aj));
        spec.factors.push_back(std::move(f));
    }
    validate_scheme(spec);
    return spec;
}

}  // namespace relmono
