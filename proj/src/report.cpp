/**
 * @file report.cpp
 * @brief Run configurations, the fixture library, deterministic loop
 *        planning, the content-addressed extraction cache, and the four
 *        commands with their text/JSON/SVG renderers.
 */

#include "relmono/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace relmono {

namespace {

// ---------------------------------------------------------------------------
// small helpers: complex JSON, files, formatting
// ---------------------------------------------------------------------------

njson cplx_to_json(cplx z) { return njson::array({std::real(z), std::imag(z)}); }

cplx cplx_from_json(const njson& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("config: complex values are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string dump_json(const njson& j) { return j.dump(2) + "\n"; }

std::string fmt_cplx(cplx z) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", std::real(z), std::imag(z));
    return buf;
}

std::string fmt_sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

/// Left-aligned plain-text table; first row is the header.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& r : rows) {
        if (widths.size() < r.size()) widths.resize(r.size(), 0);
        for (std::size_t i = 0; i < r.size(); ++i) widths[i] = std::max(widths[i], r[i].size());
    }
    std::string out;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            line += r[i];
            if (i + 1 < r.size()) line += std::string(widths[i] - r[i].size() + 2, ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    }
    return out;
}

template <class S>
std::string blocks_text(const AffineElement<S>& g) {
    std::vector<std::string> parts;
    for (const auto& b : g.blocks)
        parts.push_back("[[" + scalar_to_string(b(0, 0)) + "," + scalar_to_string(b(0, 1)) +
                        "],[" + scalar_to_string(b(1, 0)) + "," + scalar_to_string(b(1, 1)) + "]]");
    return join(parts, " ");
}

template <class S>
std::string translation_text(const AffineElement<S>& g) {
    std::vector<std::string> parts;
    for (Eigen::Index i = 0; i < g.translation.size(); ++i)
        parts.push_back(scalar_to_string(g.translation(i)));
    return "(" + join(parts, ",") + ")";
}

std::string qmat_text(const QMat2& m) {
    return "[[" + scalar_to_string(m(0, 0)) + "," + scalar_to_string(m(0, 1)) + "],[" +
           scalar_to_string(m(1, 0)) + "," + scalar_to_string(m(1, 1)) + "]]";
}

njson qmat_to_json(const QMat2& m) {
    return njson::array({scalar_to_string(m(0, 0)), scalar_to_string(m(0, 1)),
                         scalar_to_string(m(1, 0)), scalar_to_string(m(1, 1))});
}

std::string fixture_tag(const RunConfig& cfg) {
    return cfg.fixture.empty() ? std::string() : " [" + cfg.fixture + "]";
}

}  // namespace

// ---------------------------------------------------------------------------
// run configuration
// ---------------------------------------------------------------------------

void validate_run_config(const RunConfig& cfg) {
    if (cfg.scheme.has_value() == cfg.presentation.has_value())
        throw std::invalid_argument("config: exactly one of scheme/presentation must be set");
    if (cfg.scheme) validate_scheme(*cfg.scheme);
    if (cfg.auto_loops && !cfg.loops.empty())
        throw std::invalid_argument("config: auto loops exclude an explicit loop list");
    for (const auto& l : cfg.loops) validate_loop(l);
    validate_config(cfg.search);
    if (!(cfg.loop_options.clearance > 0) || cfg.loop_options.circle_segments < 3)
        throw std::invalid_argument("config: loop options out of range");
    if (!(cfg.continuation.clearance > 0) || cfg.continuation.initial_segments < 1 ||
        cfg.continuation.window < 1 || !(cfg.continuation.integer_tol > 0) ||
        cfg.continuation.max_halvings < 1)
        throw std::invalid_argument("config: continuation options out of range");
    for (cplx z : cfg.lambda_samples)
        if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z)))
            throw std::invalid_argument("config: lambda samples must be finite");
}

njson config_to_json(const RunConfig& cfg) {
    njson j;
    j["schema_version"] = 1;
    j["fixture"] = cfg.fixture;
    if (cfg.scheme) j["scheme"] = scheme_to_json(*cfg.scheme);
    if (cfg.presentation) j["presentation"] = presentation_to_json(*cfg.presentation);
    if (cfg.auto_loops) {
        j["loops"] = "auto";
    } else {
        njson ls = njson::array();
        for (const auto& l : cfg.loops) ls.push_back(loop_to_json(l));
        j["loops"] = ls;
    }
    j["loop_options"] = njson{{"base_point", cplx_to_json(cfg.loop_options.base_point)},
                              {"clearance", cfg.loop_options.clearance},
                              {"circle_segments", cfg.loop_options.circle_segments}};
    j["continuation"] = njson{{"clearance", cfg.continuation.clearance},
                              {"initial_segments", cfg.continuation.initial_segments},
                              {"window", cfg.continuation.window},
                              {"integer_tol", cfg.continuation.integer_tol},
                              {"max_halvings", cfg.continuation.max_halvings}};
    j["search"] = njson{{"max_depth", cfg.search.max_depth},
                        {"max_harvest", cfg.search.max_harvest},
                        {"density_prime", cfg.search.density_prime},
                        {"time_budget_seconds", cfg.search.time_budget_seconds},
                        {"node_budget", cfg.search.node_budget}};
    njson samples = njson::array();
    for (cplx z : cfg.lambda_samples) samples.push_back(cplx_to_json(z));
    j["lambda_samples"] = samples;
    j["output"] = njson{{"json", cfg.output.json}, {"text", cfg.output.text},
                        {"svg", cfg.output.svg}};
    j["cache"] = cfg.cache_dir;
    return j;
}

RunConfig config_from_json(const njson& j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
        throw std::invalid_argument("config: unsupported schema_version");
    RunConfig cfg;
    cfg.fixture = j.value("fixture", std::string());
    if (j.contains("scheme")) cfg.scheme = scheme_from_json(j.at("scheme"));
    if (j.contains("presentation"))
        cfg.presentation = presentation_from_json<Int>(j.at("presentation"));
    if (j.contains("loops")) {
        const njson& ls = j.at("loops");
        if (ls.is_string()) {
            if (ls.get<std::string>() != "auto")
                throw std::invalid_argument("config: loops must be \"auto\" or a list");
        } else {
            cfg.auto_loops = false;
            for (const auto& l : ls) cfg.loops.push_back(loop_from_json(l));
        }
    }
    if (j.contains("loop_options")) {
        const njson& o = j.at("loop_options");
        if (o.contains("base_point")) cfg.loop_options.base_point = cplx_from_json(o.at("base_point"));
        cfg.loop_options.clearance = o.value("clearance", cfg.loop_options.clearance);
        cfg.loop_options.circle_segments =
            o.value("circle_segments", cfg.loop_options.circle_segments);
    }
    if (j.contains("continuation")) {
        const njson& o = j.at("continuation");
        cfg.continuation.clearance = o.value("clearance", cfg.continuation.clearance);
        cfg.continuation.initial_segments =
            o.value("initial_segments", cfg.continuation.initial_segments);
        cfg.continuation.window = o.value("window", cfg.continuation.window);
        cfg.continuation.integer_tol = o.value("integer_tol", cfg.continuation.integer_tol);
        cfg.continuation.max_halvings = o.value("max_halvings", cfg.continuation.max_halvings);
    }
    if (j.contains("search")) {
        const njson& o = j.at("search");
        cfg.search.max_depth = o.value("max_depth", cfg.search.max_depth);
        cfg.search.max_harvest = o.value("max_harvest", cfg.search.max_harvest);
        cfg.search.density_prime = o.value("density_prime", cfg.search.density_prime);
        cfg.search.time_budget_seconds =
            o.value("time_budget_seconds", cfg.search.time_budget_seconds);
        cfg.search.node_budget = o.value("node_budget", cfg.search.node_budget);
    }
    if (j.contains("lambda_samples"))
        for (const auto& z : j.at("lambda_samples")) cfg.lambda_samples.push_back(cplx_from_json(z));
    if (j.contains("output")) {
        const njson& o = j.at("output");
        cfg.output.json = o.value("json", std::string());
        cfg.output.text = o.value("text", std::string());
        cfg.output.svg = o.value("svg", std::string());
    }
    cfg.cache_dir = j.value("cache", std::string());
    validate_run_config(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    njson j;
    try {
        j = njson::parse(read_file(path));
    } catch (const std::exception& e) {
        throw std::runtime_error("config file " + path + ": " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const std::exception& e) {
        throw std::runtime_error("config file " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names = {"ISO-EXAMPLE", "NONISO-EXAMPLE",
                                                   "REMARK-FIXTURE"};
    return names;
}

IPresentation synthetic_free_presentation() {
    auto el = [](long a, long b, long c, long d, long w1, long w2) {
        IAffine e;
        IMat2 m;
        m(0, 0) = a; m(0, 1) = b;
        m(1, 0) = c; m(1, 1) = d;
        e.blocks = {m};
        e.translation = IVecX(2);
        e.translation << w1, w2;
        return e;
    };
    IPresentation pres;
    pres.add("A", el(1, 2, 0, 1, 1, 0), "synthetic:A");
    pres.add("B", el(1, 0, 2, 1, 0, 1), "synthetic:B");
    return pres;
}

namespace {

std::string fixture_slug(const std::string& name) {
    std::string slug = name;
    std::transform(slug.begin(), slug.end(), slug.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return slug;
}

}  // namespace

RunConfig fixture_config(const std::string& name) {
    RunConfig cfg;
    cfg.fixture = name;
    const std::string slug = fixture_slug(name);
    if (name == "ISO-EXAMPLE") {
        cfg.scheme = iso_example_scheme();
    } else if (name == "NONISO-EXAMPLE") {
        cfg.scheme = noniso_example_scheme();
    } else if (name == "REMARK-FIXTURE") {
        cfg.presentation = synthetic_free_presentation();
        cfg.auto_loops = false;
        cfg.search.max_depth = 12;
    } else {
        throw std::invalid_argument("unknown fixture \"" + name +
                                    "\" (valid: " + join(fixture_names(), ", ") + ")");
    }
    if (cfg.scheme) {
        cfg.lambda_samples = {cplx(0.5, 0), cplx(0.25, 0), cplx(0.75, 0)};
        cfg.output.svg = slug + "-figure.svg";
    }
    cfg.output.json = slug + "-report.json";
    cfg.output.text = slug + "-report.txt";
    return cfg;
}

std::string fixture_config_path(const std::string& name) {
    fixture_config(name);  // validates the name
    return std::string(RELMONO_CONFIG_DIR) + "/" + fixture_slug(name) + ".json";
}

// ---------------------------------------------------------------------------
// loop planning
// ---------------------------------------------------------------------------

LoopPlan plan_loops(const SchemeSpec& spec, const LoopOptions& opts) {
    LoopPlan plan;
    const std::vector<LoopPath> lassos = auto_loops(spec, opts);
    std::vector<char> closes(lassos.size());
    for (std::size_t i = 0; i < lassos.size(); ++i)
        closes[i] = loop_closes_on_cover(spec, lassos[i]) ? 1 : 0;

    for (std::size_t i = 0; i < lassos.size(); ++i)
        if (closes[i]) {
            plan.loops.push_back(lassos[i]);
            plan.notes.push_back(lassos[i].name + ": closes on the sign cover; kept");
        }
    for (std::size_t i = 0; i < lassos.size(); ++i)
        if (!closes[i]) {
            plan.loops.push_back(power_loop(lassos[i], 2));
            plan.notes.push_back(lassos[i].name + ": does not close; contributing its square");
        }
    for (std::size_t p = 0; p < lassos.size(); ++p)
        for (std::size_t q = p + 1; q < lassos.size(); ++q) {
            if (closes[p] || closes[q]) continue;
            LoopPath pair = composite_loop(lassos[p], lassos[q]);
            if (loop_closes_on_cover(spec, pair)) {
                plan.notes.push_back(pair.name + ": sign flips cancel; kept");
                plan.loops.push_back(std::move(pair));
            }
        }
    // NOTE: a commutator winds zero net times around every point, so it
    // always closes on the cover and needs no test
    for (std::size_t p = 0; p < lassos.size(); ++p)
        for (std::size_t q = p + 1; q < lassos.size(); ++q) {
            LoopPath comm = commutator_loop(lassos[p], lassos[q]);
            plan.notes.push_back(comm.name + ": commutator circuit; always closes");
            plan.loops.push_back(std::move(comm));
        }
    return plan;
}

// ---------------------------------------------------------------------------
// extraction cache
// ---------------------------------------------------------------------------

std::string continuation_cache_key(const SchemeSpec& spec, const LoopPath& loop,
                                   const ContinuationOptions& opts) {
    njson j;
    j["scheme"] = scheme_to_json(spec);
    njson lj;
    lj["base"] = cplx_to_json(loop.base_point);
    njson verts = njson::array();
    for (cplx v : loop.vertices) verts.push_back(cplx_to_json(v));
    lj["vertices"] = verts;
    j["loop"] = lj;  // NOTE: the loop name is excluded — geometry decides the extraction
    j["continuation"] = njson{{"clearance", opts.clearance},
                              {"initial_segments", opts.initial_segments},
                              {"window", opts.window},
                              {"integer_tol", opts.integer_tol},
                              {"max_halvings", opts.max_halvings}};
    return hash_hex(hash128(j.dump()));
}

namespace {

std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

ContinuationResult cached_loop_monodromy(const SchemeSpec& spec, const AnalyticFrame& base_frame,
                                         const LoopPath& loop, const ContinuationOptions& opts,
                                         const std::string& cache_dir) {
    if (cache_dir.empty()) return loop_monodromy(spec, base_frame, loop, opts);
    const std::string key = continuation_cache_key(spec, loop, opts);
    const std::string path = cache_dir + "/" + key + ".json";
    {
        std::lock_guard<std::mutex> lock(cache_mutex());
        std::ifstream in(path, std::ios::binary);
        if (in) {
            try {
                const njson j = njson::parse(in);
                if (j.at("key").get<std::string>() == key) {
                    ContinuationResult r;
                    r.element = element_from_json<Int>(j.at("element"));
                    r.residual = j.at("residual").get<double>();
                    r.frames_sampled = j.at("frames_sampled").get<int>();
                    return r;
                }
            } catch (const std::exception&) {
                // NOTE: unreadable entries fall through to recomputation and
                // get overwritten below
            }
        }
    }
    const ContinuationResult r = loop_monodromy(spec, base_frame, loop, opts);
    njson j;
    j["key"] = key;
    j["element"] = element_to_json(r.element);
    j["residual"] = r.residual;
    j["frames_sampled"] = r.frames_sampled;
    std::lock_guard<std::mutex> lock(cache_mutex());
    std::filesystem::create_directories(cache_dir);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write cache entry " + path);
    out << dump_json(j);
    return r;
}

std::string resolve_cache_dir(const std::string& flag_value, const std::string& config_value) {
    if (const char* env = std::getenv("MONODROMY_CACHE"); env && *env) return env;
    return flag_value.empty() ? config_value : flag_value;
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

PresentationRun run_presentation(const RunConfig& cfg) {
    validate_run_config(cfg);
    PresentationRun out;
    if (cfg.presentation) {
        out.presentation = *cfg.presentation;
        out.residuals.assign(out.presentation.size(), 0.0);
        out.frames_sampled.assign(out.presentation.size(), 0);
        return out;
    }
    const SchemeSpec& spec = *cfg.scheme;
    std::vector<LoopPath> loops;
    if (cfg.auto_loops) {
        LoopPlan plan = plan_loops(spec, cfg.loop_options);
        loops = std::move(plan.loops);
        out.planning_notes = std::move(plan.notes);
    } else {
        loops = cfg.loops;
        for (const auto& l : loops)
            if (!loop_closes_on_cover(spec, l))
                throw std::invalid_argument("loop " + l.name +
                                            " does not close on the sign cover");
    }
    if (loops.empty()) throw std::invalid_argument("no loops to extract");
    const AnalyticFrame base = initial_frame(spec, loops.front().base_point, cfg.continuation);
    for (const auto& l : loops) {
        const ContinuationResult r =
            cached_loop_monodromy(spec, base, l, cfg.continuation, cfg.cache_dir);
        if (is_identity(r.element)) {
            out.dropped.push_back(l.name);
            continue;
        }
        out.presentation.add(l.name, r.element, "loop:" + l.name);
        out.residuals.push_back(r.residual);
        out.frames_sampled.push_back(r.frames_sampled);
    }
    if (out.presentation.generators.empty())
        throw std::runtime_error("every loop extracted the identity; nothing to present");
    return out;
}

// ---------------------------------------------------------------------------
// cmd_periods
// ---------------------------------------------------------------------------

int cmd_periods(const RunConfig& cfg, std::ostream& out, bool keep_going) {
    try {
        validate_run_config(cfg);
        if (!cfg.scheme) throw std::invalid_argument("periods requires a scheme configuration");
        if (cfg.lambda_samples.empty())
            throw std::invalid_argument("periods: no lambda samples configured");
        njson rows = njson::array();
        std::vector<std::vector<std::string>> table{{"lambda", "omega1", "omega2", "tau"}};
        bool any_error = false;
        for (cplx lam : cfg.lambda_samples) {
            njson row;
            row["lambda"] = cplx_to_json(lam);
            try {
                const PeriodPair p = periods_at(lam, cfg.continuation.clearance);
                const cplx tau = p.omega2 / p.omega1;
                row["omega1"] = cplx_to_json(p.omega1);
                row["omega2"] = cplx_to_json(p.omega2);
                row["tau"] = cplx_to_json(tau);
                table.push_back({fmt_cplx(lam), fmt_cplx(p.omega1), fmt_cplx(p.omega2),
                                 fmt_cplx(tau)});
            } catch (const std::exception& e) {
                any_error = true;
                row["error"] = e.what();
                table.push_back({fmt_cplx(lam), "error: " + std::string(e.what()), "", ""});
            }
            rows.push_back(row);
        }
        const std::string text = "periods" + fixture_tag(cfg) + "\n" + render_table(table);
        njson rep;
        rep["schema_version"] = 1;
        rep["command"] = "periods";
        rep["fixture"] = cfg.fixture;
        rep["rows"] = rows;
        out << text;
        if (!cfg.output.text.empty()) write_file(cfg.output.text, text);
        if (!cfg.output.json.empty()) write_file(cfg.output.json, dump_json(rep));
        return (any_error && !keep_going) ? 1 : 0;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

// ---------------------------------------------------------------------------
// cmd_monodromy
// ---------------------------------------------------------------------------

int cmd_monodromy(const RunConfig& cfg, std::ostream& out) {
    try {
        const PresentationRun run = run_presentation(cfg);
        std::vector<std::vector<std::string>> table{
            {"generator", "blocks", "translation", "residual", "frames"}};
        njson gens = njson::array();
        for (std::size_t i = 0; i < run.presentation.size(); ++i) {
            const auto& g = run.presentation.generators[i];
            table.push_back({run.presentation.names[i], blocks_text(g), translation_text(g),
                             fmt_sci(run.residuals[i]), std::to_string(run.frames_sampled[i])});
            njson gj;
            gj["name"] = run.presentation.names[i];
            gj["provenance"] = run.presentation.provenance[i];
            gj["element"] = element_to_json(g);
            gj["residual"] = run.residuals[i];
            gj["frames_sampled"] = run.frames_sampled[i];
            gens.push_back(gj);
        }
        std::string text = "monodromy presentation" + fixture_tag(cfg) + "\n" +
                           render_table(table);
        if (!run.dropped.empty())
            text += "dropped identity extractions: " + join(run.dropped, ", ") + "\n";
        njson rep;
        rep["schema_version"] = 1;
        rep["command"] = "monodromy";
        rep["fixture"] = cfg.fixture;
        rep["k"] = run.presentation.k();
        rep["generators"] = gens;
        rep["dropped"] = run.dropped;
        rep["planning_notes"] = run.planning_notes;
        out << text;
        if (!cfg.output.text.empty()) write_file(cfg.output.text, text);
        if (!cfg.output.json.empty()) write_file(cfg.output.json, dump_json(rep));
        return 0;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

// ---------------------------------------------------------------------------
// cmd_classify
// ---------------------------------------------------------------------------

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
    try {
        const PresentationRun run = run_presentation(cfg);
        const ClassificationReport rep = classify(run.presentation, cfg.search);

        std::string text = "classification" + fixture_tag(cfg) + "\n";
        text += "verdict: " + std::string(to_string(rep.verdict)) + "\n";
        text += "citation: " + rep.citation + "\n";
        if (rep.verdict == Verdict::TORSION_LIKE)
            text += "caveat: kernel search found nothing; consistent with trivial kernel\n";
        text += "ranks: K=" + std::to_string(rep.rank_K);
        if (run.presentation.k() == 2)
            text += " K1=" + std::to_string(rep.rank_K1) + " K2=" + std::to_string(rep.rank_K2) +
                    " H1=" + std::to_string(rep.rank_H1) + " H2=" + std::to_string(rep.rank_H2);
        text += "\n";
        text += "conjugator: " + (rep.conjugator ? qmat_text(*rep.conjugator)
                                                 : std::string("none")) + "\n";
        if (rep.intertwiner)
            text += "intertwiner: " + qmat_text(*rep.intertwiner) +
                    (rep.intertwiner_verdict
                         ? " (" + std::string(to_string(*rep.intertwiner_verdict)) + ")"
                         : "") + "\n";
        if (rep.mod_p_checked)
            text += "mod-p closure: " + std::string(rep.mod_p_full ? "full" : "proper") +
                    ", order " + std::to_string(rep.mod_p_order) + " (p=" +
                    std::to_string(rep.density_prime) + ")\n";
        text += "search: depth " + std::to_string(rep.depth_used) + ", " +
                std::to_string(rep.elements_found) + " kernel records, " +
                (rep.search_complete ? "complete" : "budget-truncated") + "\n";
        for (const auto& d : rep.diagnostics) text += "note: " + d + "\n";

        njson rj;
        rj["schema_version"] = 1;
        rj["command"] = "classify";
        rj["fixture"] = cfg.fixture;
        rj["k"] = run.presentation.k();
        rj["verdict"] = to_string(rep.verdict);
        rj["citation"] = rep.citation;
        if (rep.verdict == Verdict::TORSION_LIKE)
            rj["caveat"] = "kernel search found nothing; consistent with trivial kernel";
        rj["ranks"] = njson{{"K", rep.rank_K}, {"K1", rep.rank_K1}, {"K2", rep.rank_K2},
                            {"H1", rep.rank_H1}, {"H2", rep.rank_H2}};
        rj["conjugator"] = rep.conjugator ? qmat_to_json(*rep.conjugator) : njson(nullptr);
        rj["intertwiner"] = rep.intertwiner ? qmat_to_json(*rep.intertwiner) : njson(nullptr);
        rj["intertwiner_verdict"] = rep.intertwiner_verdict
                                        ? njson(to_string(*rep.intertwiner_verdict))
                                        : njson(nullptr);
        rj["mod_p"] = njson{{"checked", rep.mod_p_checked}, {"full", rep.mod_p_full},
                            {"order", rep.mod_p_order}, {"prime", rep.density_prime}};
        rj["depth_used"] = rep.depth_used;
        rj["elements_found"] = rep.elements_found;
        rj["search_complete"] = rep.search_complete;
        rj["diagnostics"] = rep.diagnostics;
        rj["generators"] = run.presentation.names;
        rj["kernel_translations"] = rep.kernel_translations;

        out << text;
        if (!cfg.output.text.empty()) write_file(cfg.output.text, text);
        if (!cfg.output.json.empty()) write_file(cfg.output.json, dump_json(rj));
        return 0;  // NOTE: every verdict, INCONCLUSIVE included, is a successful run
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

// ---------------------------------------------------------------------------
// cmd_plot
// ---------------------------------------------------------------------------

namespace {

const char* loop_palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#17becf"};
    return colors[i % 6];
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

/// Maps a centered square window in the plane onto the 640x640 canvas.
struct PlaneMap {
    double minx = 0, miny = 0, span = 1;
    double x(double re) const { return 20 + (re - minx) / span * 600; }
    double y(double im) const { return 620 - (im - miny) / span * 600; }
};

PlaneMap fit_plane(const std::vector<cplx>& pts) {
    double minx = -1, maxx = 1, miny = -1, maxy = 1;
    if (!pts.empty()) {
        minx = maxx = std::real(pts[0]);
        miny = maxy = std::imag(pts[0]);
        for (cplx p : pts) {
            minx = std::min(minx, std::real(p));
            maxx = std::max(maxx, std::real(p));
            miny = std::min(miny, std::imag(p));
            maxy = std::max(maxy, std::imag(p));
        }
    }
    double span = std::max({maxx - minx, maxy - miny, 1.0}) * 1.2;
    PlaneMap m;
    m.span = span;
    m.minx = (minx + maxx) / 2 - span / 2;
    m.miny = (miny + maxy) / 2 - span / 2;
    return m;
}

bool is_puncture_point(const SchemeSpec& spec, cplx pt) {
    for (const auto& f : spec.factors) {
        const cplx den = poly_eval(f.lambda.den, pt);
        if (std::abs(den) < 1e-9) continue;
        const cplx lam = poly_eval(f.lambda.num, pt) / den;
        if (std::abs(lam) < 1e-9 || std::abs(lam - 1.0) < 1e-9) return true;
    }
    return false;
}

std::string render_base_plane(const SchemeSpec& spec, const std::vector<LoopPath>& loops,
                              cplx base_pt) {
    const std::vector<cplx> marks = branch_points(spec);
    std::vector<cplx> extent = marks;
    extent.push_back(base_pt);
    for (const auto& l : loops)
        for (cplx v : l.vertices) extent.push_back(v);
    const PlaneMap m = fit_plane(extent);

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
           "viewBox=\"0 0 640 640\">\n";
    svg += "<rect width=\"640\" height=\"640\" fill=\"#ffffff\"/>\n";
    // axes, when the window contains them
    if (m.minx < 0 && m.minx + m.span > 0)
        svg += "<line x1=\"" + fmt_px(m.x(0)) + "\" y1=\"20\" x2=\"" + fmt_px(m.x(0)) +
               "\" y2=\"620\" stroke=\"#dddddd\"/>\n";
    if (m.miny < 0 && m.miny + m.span > 0)
        svg += "<line x1=\"20\" y1=\"" + fmt_px(m.y(0)) + "\" x2=\"620\" y2=\"" +
               fmt_px(m.y(0)) + "\" stroke=\"#dddddd\"/>\n";
    for (std::size_t i = 0; i < loops.size(); ++i) {
        std::string pts;
        for (cplx v : loops[i].vertices) {
            if (!pts.empty()) pts += ' ';
            pts += fmt_px(m.x(std::real(v))) + "," + fmt_px(m.y(std::imag(v)));
        }
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
               loop_palette(i) + "\" stroke-width=\"1.2\" opacity=\"0.85\"/>\n";
    }
    for (cplx p : marks) {
        const std::string cx = fmt_px(m.x(std::real(p))), cy = fmt_px(m.y(std::imag(p)));
        if (is_puncture_point(spec, p))
            svg += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"4\" fill=\"#b00020\"/>\n";
        else
            svg += "<circle cx=\"" + cx + "\" cy=\"" + cy +
                   "\" r=\"4\" fill=\"#ffffff\" stroke=\"#b00020\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + fmt_px(m.x(std::real(p)) + 7) + "\" y=\"" +
               fmt_px(m.y(std::imag(p)) - 7) +
               "\" font-family=\"monospace\" font-size=\"13\" fill=\"#b00020\">" +
               xml_escape(format_point(p)) + "</text>\n";
    }
    svg += "<circle cx=\"" + fmt_px(m.x(std::real(base_pt))) + "\" cy=\"" +
           fmt_px(m.y(std::imag(base_pt))) + "\" r=\"3\" fill=\"#000000\"/>\n";
    svg += "<text x=\"" + fmt_px(m.x(std::real(base_pt)) + 6) + "\" y=\"" +
           fmt_px(m.y(std::imag(base_pt)) + 14) +
           "\" font-family=\"monospace\" font-size=\"12\" fill=\"#000000\">base</text>\n";
    for (std::size_t i = 0; i < loops.size(); ++i) {
        const std::string yy = std::to_string(30 + 16 * static_cast<int>(i));
        svg += "<rect x=\"26\" y=\"" + std::to_string(22 + 16 * static_cast<int>(i)) +
               "\" width=\"10\" height=\"10\" fill=\"" + loop_palette(i) + "\"/>\n";
        svg += "<text x=\"42\" y=\"" + yy +
               "\" font-family=\"monospace\" font-size=\"12\" fill=\"#333333\">" +
               xml_escape(loops[i].name) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

double parse_decimal(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return std::strtod(s.c_str(), nullptr);
    return std::strtod(s.substr(0, slash).c_str(), nullptr) /
           std::strtod(s.substr(slash + 1).c_str(), nullptr);
}

std::string render_translations(int k, const std::vector<std::vector<double>>& vecs) {
    std::vector<cplx> pts;
    for (const auto& v : vecs) {
        pts.emplace_back(v[0], v[1]);
        if (k == 2) pts.emplace_back(v[2], v[3]);
    }
    pts.emplace_back(0, 0);
    const PlaneMap m = fit_plane(pts);

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
           "viewBox=\"0 0 640 640\">\n";
    svg += "<rect width=\"640\" height=\"640\" fill=\"#ffffff\"/>\n";
    svg += "<line x1=\"" + fmt_px(m.x(0)) + "\" y1=\"20\" x2=\"" + fmt_px(m.x(0)) +
           "\" y2=\"620\" stroke=\"#dddddd\"/>\n";
    svg += "<line x1=\"20\" y1=\"" + fmt_px(m.y(0)) + "\" x2=\"620\" y2=\"" + fmt_px(m.y(0)) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"26\" y=\"30\" font-family=\"monospace\" font-size=\"13\" "
           "fill=\"#333333\">harvested kernel translations (" +
           std::to_string(vecs.size()) + " records)</text>\n";
    for (const auto& v : vecs) {
        svg += "<circle cx=\"" + fmt_px(m.x(v[0])) + "\" cy=\"" + fmt_px(m.y(v[1])) +
               "\" r=\"3.5\" fill=\"#1f77b4\" opacity=\"0.8\"/>\n";
        if (k == 2)
            svg += "<rect x=\"" + fmt_px(m.x(v[2]) - 3) + "\" y=\"" + fmt_px(m.y(v[3]) - 3) +
                   "\" width=\"6\" height=\"6\" fill=\"#ff7f0e\" opacity=\"0.8\"/>\n";
    }
    svg += "<circle cx=\"26\" cy=\"46\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
    svg += "<text x=\"36\" y=\"50\" font-family=\"monospace\" font-size=\"12\" "
           "fill=\"#333333\">factor 1 coordinates</text>\n";
    if (k == 2) {
        svg += "<rect x=\"23\" y=\"59\" width=\"6\" height=\"6\" fill=\"#ff7f0e\"/>\n";
        svg += "<text x=\"36\" y=\"66\" font-family=\"monospace\" font-size=\"12\" "
               "fill=\"#333333\">factor 2 coordinates</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string translations_path(const std::string& svg_path) {
    const std::filesystem::path p(svg_path);
    std::filesystem::path q = p.parent_path();
    q /= p.stem().string() + "_translations" +
         (p.extension().empty() ? std::string(".svg") : p.extension().string());
    return q.string();
}

}  // namespace

int cmd_plot(const RunConfig& cfg, std::ostream& out) {
    try {
        validate_run_config(cfg);
        if (!cfg.scheme) throw std::invalid_argument("plot requires a scheme configuration");
        if (cfg.output.svg.empty()) throw std::invalid_argument("plot: no figure path configured");
        std::vector<LoopPath> loops;
        if (cfg.auto_loops) loops = plan_loops(*cfg.scheme, cfg.loop_options).loops;
        else loops = cfg.loops;
        write_file(cfg.output.svg,
                   render_base_plane(*cfg.scheme, loops, cfg.loop_options.base_point));
        out << "wrote " << cfg.output.svg << "\n";
        if (loops.empty()) return 0;  // points-only figure; nothing was harvested

        if (cfg.output.json.empty())
            throw std::invalid_argument(
                "plot: translation figure needs output.json pointing at a classify report");
        if (!std::filesystem::exists(cfg.output.json))
            throw std::runtime_error("plot: missing results at " + cfg.output.json +
                                     " (run classify first)");
        const njson rep = njson::parse(read_file(cfg.output.json));
        if (!rep.contains("kernel_translations"))
            throw std::runtime_error("plot: report at " + cfg.output.json +
                                     " has no kernel translations (run classify first)");
        const int k = rep.value("k", cfg.scheme->k());
        std::vector<std::vector<double>> vecs;
        for (const auto& wj : rep.at("kernel_translations")) {
            std::vector<double> v;
            for (const auto& c : wj) v.push_back(parse_decimal(c.get<std::string>()));
            if (static_cast<int>(v.size()) != 2 * k)
                throw std::runtime_error("plot: translation length disagrees with k");
            vecs.push_back(std::move(v));
        }
        const std::string path2 = translations_path(cfg.output.svg);
        write_file(path2, render_translations(k, vecs));
        out << "wrote " << path2 << "\n";
        return 0;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace relmono
