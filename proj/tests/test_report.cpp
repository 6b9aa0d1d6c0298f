/**
 * @file test_report.cpp
 * @brief Run-config schema round trips, fixture library and checked-in
 *        config files, loop planning on the sign cover, the extraction
 *        cache, and the four commands' exit codes and determinism.
 */

#include "doctest.h"

#include "relmono/report.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace relmono;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), ("cannot open " + path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Scratch directory for artifacts; wiped per call site.
std::filesystem::path fresh_dir(const std::string& leaf) {
    const auto dir = std::filesystem::temp_directory_path() / "relmono-report-tests" / leaf;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// k = 1 scheme: lambda(t) = t, section x = 2 with root argument 4 - 2t.
SchemeSpec single_factor_scheme() {
    SchemeSpec s;
    FactorSpec f;
    f.lambda = rf_t();
    f.section.x = rf_const(Rat(2));
    f.section.sqrt_args = {RationalFunction(poly_from({4, -2}), poly_const(Rat(1)))};
    s.factors.push_back(f);
    return s;
}

const LoopPath& find_loop(const std::vector<LoopPath>& loops, const std::string& name) {
    for (const auto& l : loops)
        if (l.name == name) return l;
    REQUIRE_MESSAGE(false, ("loop not found: " + name));
    return loops.front();
}

std::vector<std::string> loop_names(const LoopPlan& plan) {
    std::vector<std::string> names;
    for (const auto& l : plan.loops) names.push_back(l.name);
    return names;
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration schema
// ---------------------------------------------------------------------------

TEST_CASE("run config round trips through JSON for every fixture") {
    for (const auto& name : fixture_names()) {
        const RunConfig cfg = fixture_config(name);
        const njson j = config_to_json(cfg);
        const RunConfig back = config_from_json(j);
        CHECK(config_to_json(back) == j);
        CHECK(back.fixture == name);
    }
}

TEST_CASE("run config validation rejects malformed inputs") {
    SUBCASE("scheme and presentation together") {
        RunConfig cfg = fixture_config("ISO-EXAMPLE");
        cfg.presentation = synthetic_free_presentation();
        CHECK_THROWS_AS(validate_run_config(cfg), std::invalid_argument);
    }
    SUBCASE("neither scheme nor presentation") {
        RunConfig cfg;
        CHECK_THROWS_AS(validate_run_config(cfg), std::invalid_argument);
    }
    SUBCASE("auto loops with an explicit list") {
        RunConfig cfg = fixture_config("ISO-EXAMPLE");
        cfg.loops = auto_loops(*cfg.scheme);
        CHECK_THROWS_AS(validate_run_config(cfg), std::invalid_argument);
    }
    SUBCASE("bad continuation window") {
        RunConfig cfg = fixture_config("ISO-EXAMPLE");
        cfg.continuation.window = 0;
        CHECK_THROWS_AS(validate_run_config(cfg), std::invalid_argument);
    }
    SUBCASE("non-finite lambda sample") {
        RunConfig cfg = fixture_config("ISO-EXAMPLE");
        cfg.lambda_samples.push_back(cplx(std::nan(""), 0));
        CHECK_THROWS_AS(validate_run_config(cfg), std::invalid_argument);
    }
    SUBCASE("unknown fixture names the valid ones") {
        CHECK_THROWS_WITH_AS(fixture_config("NO-SUCH"),
                             doctest::Contains("ISO-EXAMPLE"), std::invalid_argument);
    }
}

TEST_CASE("checked-in fixture configs are byte-exact serializations") {
    for (const auto& name : fixture_names()) {
        CAPTURE(name);
        const std::string path = fixture_config_path(name);
        const std::string bytes = slurp(path);
        CHECK(bytes == config_to_json(fixture_config(name)).dump(2) + "\n");
        const RunConfig loaded = load_config_file(path);
        CHECK(config_to_json(loaded) == config_to_json(fixture_config(name)));
    }
}

TEST_CASE("synthetic fixture carries the configured generator pair exactly") {
    const IPresentation pres = synthetic_free_presentation();
    REQUIRE(pres.size() == 2);
    CHECK(pres.names[0] == "A");
    CHECK(pres.names[1] == "B");
    CHECK(pres.k() == 1);
    CHECK(canonical_string(pres.generators[0]) == "k1;B1,2,0,1,;T1,0,");
    CHECK(canonical_string(pres.generators[1]) == "k1;B1,0,2,1,;T0,1,");
    const RunConfig cfg = fixture_config("REMARK-FIXTURE");
    REQUIRE(cfg.presentation.has_value());
    CHECK(cfg.search.max_depth == 12);
    CHECK(canonical_string(cfg.presentation->generators[0]) ==
          canonical_string(pres.generators[0]));
}

// ---------------------------------------------------------------------------
// loop planning
// ---------------------------------------------------------------------------

TEST_CASE("loop plan for the shared-parameter pair fixture") {
    const SchemeSpec spec = iso_example_scheme();
    const LoopPlan plan = plan_loops(spec, LoopOptions{});
    const std::vector<std::string> expect = {
        "lasso_1",
        "lasso_-1^2", "lasso_0^2", "lasso_2^2",
        "lasso_-1*lasso_0",
        "[lasso_-1,lasso_0]", "[lasso_-1,lasso_1]", "[lasso_-1,lasso_2]",
        "[lasso_0,lasso_1]", "[lasso_0,lasso_2]", "[lasso_1,lasso_2]"};
    CHECK(loop_names(plan) == expect);
    CHECK(plan.notes.size() == plan.loops.size());
}

TEST_CASE("loop plan for the mirrored-parameter pair fixture") {
    const SchemeSpec spec = noniso_example_scheme();
    const LoopPlan plan = plan_loops(spec, LoopOptions{});
    const std::vector<std::string> expect = {
        "lasso_1",
        "lasso_0^2", "lasso_2^2",
        "[lasso_0,lasso_1]", "[lasso_0,lasso_2]", "[lasso_1,lasso_2]"};
    CHECK(loop_names(plan) == expect);
}

// PROPERTY: every planned circuit closes on the sign cover (exact predicate).
TEST_CASE("planned circuits always close on the sign cover") {
    for (const SchemeSpec& spec : {iso_example_scheme(), noniso_example_scheme(),
                                   single_factor_scheme()}) {
        const LoopPlan plan = plan_loops(spec, LoopOptions{});
        REQUIRE(!plan.loops.empty());
        for (const auto& l : plan.loops) {
            CAPTURE(l.name);
            CHECK(loop_closes_on_cover(spec, l));
        }
    }
}

// ---------------------------------------------------------------------------
// extraction cache
// ---------------------------------------------------------------------------

TEST_CASE("cache keys track geometry and tolerances, not names") {
    const SchemeSpec spec = single_factor_scheme();
    const auto lassos = auto_loops(spec);
    const LoopPath& l0 = find_loop(lassos, "lasso_0");
    const LoopPath& l1 = find_loop(lassos, "lasso_1");
    const ContinuationOptions opts;

    const std::string base = continuation_cache_key(spec, l0, opts);
    CHECK(base == continuation_cache_key(spec, l0, opts));
    CHECK(base != continuation_cache_key(spec, l1, opts));

    LoopPath renamed = l0;
    renamed.name = "anything-else";
    CHECK(base == continuation_cache_key(spec, renamed, opts));

    ContinuationOptions tighter = opts;
    tighter.integer_tol = 1e-9;
    CHECK(base != continuation_cache_key(spec, l0, tighter));
    ContinuationOptions finer = opts;
    finer.initial_segments = 128;
    CHECK(base != continuation_cache_key(spec, l0, finer));
}

TEST_CASE("cache hit reproduces the exact extracted element") {
    const SchemeSpec spec = single_factor_scheme();
    const auto dir = fresh_dir("cache-exact");
    const auto lassos = auto_loops(spec);
    const LoopPath& l0 = find_loop(lassos, "lasso_0");
    const ContinuationOptions opts;
    const AnalyticFrame base = initial_frame(spec, l0.base_point, opts);

    const ContinuationResult cold = cached_loop_monodromy(spec, base, l0, opts, dir.string());
    const std::string key = continuation_cache_key(spec, l0, opts);
    CHECK(std::filesystem::exists(dir / (key + ".json")));

    const ContinuationResult warm = cached_loop_monodromy(spec, base, l0, opts, dir.string());
    CHECK(canonical_string(warm.element) == canonical_string(cold.element));
    CHECK(warm.residual == cold.residual);
    CHECK(warm.frames_sampled == cold.frames_sampled);

    SUBCASE("corrupt entries are recomputed and overwritten") {
        {
            std::ofstream out(dir / (key + ".json"), std::ios::binary);
            out << "{not json";
        }
        const ContinuationResult again = cached_loop_monodromy(spec, base, l0, opts, dir.string());
        CHECK(canonical_string(again.element) == canonical_string(cold.element));
        const njson stored = njson::parse(slurp((dir / (key + ".json")).string()));
        CHECK(stored.at("key").get<std::string>() == key);
    }
}

TEST_CASE("cache directory resolution: env beats flag beats config") {
    unsetenv("MONODROMY_CACHE");
    CHECK(resolve_cache_dir("", "") == "");
    CHECK(resolve_cache_dir("", "from-config") == "from-config");
    CHECK(resolve_cache_dir("from-flag", "from-config") == "from-flag");
    setenv("MONODROMY_CACHE", "from-env", 1);
    CHECK(resolve_cache_dir("from-flag", "from-config") == "from-env");
    CHECK(resolve_cache_dir("", "") == "from-env");
    unsetenv("MONODROMY_CACHE");
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

TEST_CASE("synthetic route hands the configured presentation through untouched") {
    const RunConfig cfg = fixture_config("REMARK-FIXTURE");
    const PresentationRun run = run_presentation(cfg);
    REQUIRE(run.presentation.size() == 2);
    CHECK(canonical_string(run.presentation.generators[0]) == "k1;B1,2,0,1,;T1,0,");
    CHECK(canonical_string(run.presentation.generators[1]) == "k1;B1,0,2,1,;T0,1,");
    CHECK(run.residuals == std::vector<double>{0.0, 0.0});
    CHECK(run.dropped.empty());
}

TEST_CASE("analytic route drops identity extractions and keeps the rest") {
    RunConfig cfg;
    cfg.scheme = single_factor_scheme();
    const PresentationRun run = run_presentation(cfg);
    // the squared flip lasso continues to the identity and must not appear
    CHECK(std::find(run.dropped.begin(), run.dropped.end(), "lasso_2^2") != run.dropped.end());
    const auto& names = run.presentation.names;
    CHECK(std::find(names.begin(), names.end(), "lasso_0") != names.end());
    CHECK(std::find(names.begin(), names.end(), "lasso_1") != names.end());
    CHECK(std::find(names.begin(), names.end(), "[lasso_0,lasso_1]") != names.end());
    CHECK(std::find(names.begin(), names.end(), "lasso_2^2") == names.end());
    for (double r : run.residuals) CHECK(r < 1e-6);
    for (const auto& g : run.presentation.generators) CHECK(!is_identity(g));
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

TEST_CASE("periods command: determinism, error rows, keep-going") {
    const auto dir = fresh_dir("periods");
    RunConfig cfg;
    cfg.scheme = single_factor_scheme();
    cfg.lambda_samples = {cplx(0.5, 0), cplx(0.5, 0), cplx(0, 0)};
    cfg.output.json = (dir / "periods.json").string();
    cfg.output.text = (dir / "periods.txt").string();

    std::ostringstream out;
    CHECK(cmd_periods(cfg, out, /*keep_going=*/true) == 0);
    const std::string text = out.str();

    // identical sample rows render identically
    std::vector<std::string> lines;
    std::istringstream iss(text);
    for (std::string line; std::getline(iss, line);) lines.push_back(line);
    REQUIRE(lines.size() >= 5);  // title, header, three rows
    CHECK(lines[2] == lines[3]);
    CHECK(lines[4].find("error") != std::string::npos);

    const njson rep = njson::parse(slurp(cfg.output.json));
    REQUIRE(rep.at("rows").size() == 3);
    const auto& row = rep.at("rows")[0];
    const cplx tau(row.at("tau")[0].get<double>(), row.at("tau")[1].get<double>());
    CHECK(std::abs(tau - cplx(0, 1)) < 1e-12);  // tau at the symmetric parameter
    CHECK(rep.at("rows")[2].contains("error"));
    CHECK(slurp(cfg.output.text) == text);

    std::ostringstream strict;
    CHECK(cmd_periods(cfg, strict, /*keep_going=*/false) == 1);
}

TEST_CASE("monodromy command emits the synthetic generators verbatim") {
    const auto dir = fresh_dir("monodromy-synthetic");
    RunConfig cfg = fixture_config("REMARK-FIXTURE");
    cfg.output.json = (dir / "report.json").string();
    cfg.output.text = (dir / "report.txt").string();

    std::ostringstream out;
    REQUIRE(cmd_monodromy(cfg, out) == 0);
    const std::string text = out.str();
    CHECK(text.find("[[1,2],[0,1]]") != std::string::npos);
    CHECK(text.find("(1,0)") != std::string::npos);
    CHECK(text.find("[[1,0],[2,1]]") != std::string::npos);
    CHECK(text.find("(0,1)") != std::string::npos);

    const njson rep = njson::parse(slurp(cfg.output.json));
    REQUIRE(rep.at("generators").size() == 2);
    const auto& a = rep.at("generators")[0];
    CHECK(a.at("name") == "A");
    CHECK(a.at("element").at("blocks")[0] == njson::array({"1", "2", "0", "1"}));
    CHECK(a.at("element").at("translation") == njson::array({"1", "0"}));
    CHECK(a.at("residual").get<double>() == 0.0);

    // rerun is byte-identical
    std::ostringstream out2;
    REQUIRE(cmd_monodromy(cfg, out2) == 0);
    CHECK(out2.str() == text);
}

TEST_CASE("monodromy command: warm cache rerun is byte-identical") {
    const auto dir = fresh_dir("monodromy-cache");
    RunConfig cfg;
    cfg.scheme = single_factor_scheme();
    cfg.cache_dir = (dir / "cache").string();
    cfg.output.json = (dir / "report.json").string();

    std::ostringstream cold;
    REQUIRE(cmd_monodromy(cfg, cold) == 0);
    const std::string cold_json = slurp(cfg.output.json);

    std::ostringstream warm;
    REQUIRE(cmd_monodromy(cfg, warm) == 0);
    CHECK(warm.str() == cold.str());
    CHECK(slurp(cfg.output.json) == cold_json);

    // the cache directory actually holds one entry per planned loop
    std::size_t entries = 0;
    for (const auto& e : std::filesystem::directory_iterator(cfg.cache_dir)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == plan_loops(*cfg.scheme, cfg.loop_options).loops.size());
}

TEST_CASE("classify command on the synthetic fixture: trivial kernel with caveat") {
    const auto dir = fresh_dir("classify-synthetic");
    RunConfig cfg = fixture_config("REMARK-FIXTURE");
    cfg.output.json = (dir / "report.json").string();
    cfg.output.text = (dir / "report.txt").string();

    std::ostringstream out;
    CHECK(cmd_classify(cfg, out) == 0);
    const std::string text = out.str();
    CHECK(text.find("verdict: TORSION_LIKE") != std::string::npos);
    CHECK(text.find("caveat: kernel search found nothing; consistent with trivial kernel") !=
          std::string::npos);
    CHECK(text.find("depth 12") != std::string::npos);

    const njson rep = njson::parse(slurp(cfg.output.json));
    CHECK(rep.at("verdict") == "TORSION_LIKE");
    CHECK(rep.at("depth_used").get<int>() == 12);
    CHECK(rep.at("search_complete").get<bool>() == true);
    CHECK(rep.at("caveat") ==
          "kernel search found nothing; consistent with trivial kernel");
    CHECK(rep.at("kernel_translations").empty());
}

TEST_CASE("classify command: INCONCLUSIVE is still exit 0; operational failure is not") {
    SUBCASE("rank-1 evidence never yields a verdict") {
        RunConfig cfg;
        IPresentation pres;
        IAffine t = identity_element<Int>(1);
        t.translation << 1, 0;
        pres.add("T", t, "synthetic:T");
        cfg.presentation = pres;
        cfg.auto_loops = false;
        cfg.search.max_depth = 4;
        std::ostringstream out;
        CHECK(cmd_classify(cfg, out) == 0);
        CHECK(out.str().find("INCONCLUSIVE") != std::string::npos);
    }
    SUBCASE("malformed config is an operational failure") {
        RunConfig cfg;  // neither scheme nor presentation
        std::ostringstream out;
        CHECK(cmd_classify(cfg, out) == 1);
        CHECK(out.str().find("error:") != std::string::npos);
    }
}

TEST_CASE("plot command: figures, determinism, and the missing-results error") {
    const auto dir = fresh_dir("plot");
    RunConfig cfg = fixture_config("ISO-EXAMPLE");
    cfg.output.svg = (dir / "figure.svg").string();
    cfg.output.json = (dir / "classify.json").string();
    cfg.output.text.clear();

    SUBCASE("missing classify results are an operational error") {
        std::ostringstream out;
        CHECK(cmd_plot(cfg, out) == 1);
        CHECK(out.str().find("missing results") != std::string::npos);
        CHECK(std::filesystem::exists(cfg.output.svg));  // the map itself is still drawn
    }

    SUBCASE("loop-free config yields the points-only figure") {
        RunConfig bare = cfg;
        bare.auto_loops = false;
        bare.loops.clear();
        std::ostringstream out;
        CHECK(cmd_plot(bare, out) == 0);
        const std::string svg = slurp(bare.output.svg);
        CHECK(svg.find("<polyline") == std::string::npos);
        for (const char* label : {">-1<", ">0<", ">1<", ">2<"})
            CHECK(svg.find(label) != std::string::npos);
    }

    SUBCASE("with prior results both figures appear and bytes are stable") {
        njson fake;
        fake["k"] = 2;
        fake["kernel_translations"] =
            njson::array({njson::array({"2", "0", "0", "0"}), njson::array({"0", "2", "0", "0"})});
        {
            std::ofstream out(cfg.output.json, std::ios::binary);
            out << fake.dump(2) << "\n";
        }
        std::ostringstream out;
        REQUIRE(cmd_plot(cfg, out) == 0);
        const std::string fig = slurp(cfg.output.svg);
        const std::string trans = slurp((dir / "figure_translations.svg").string());
        CHECK(fig.find("lasso_0") != std::string::npos);
        CHECK(trans.find("2 records") != std::string::npos);

        std::ostringstream out2;
        REQUIRE(cmd_plot(cfg, out2) == 0);
        CHECK(slurp(cfg.output.svg) == fig);
        CHECK(slurp((dir / "figure_translations.svg").string()) == trans);
        CHECK(out2.str() == out.str());
    }
}
