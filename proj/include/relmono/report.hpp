#pragma once
/**
 * @file report.hpp
 * @brief Command-line front end: run configurations and their JSON schema,
 *        the named fixture library, deterministic loop planning on the sign
 *        cover, content-addressed caching of loop extractions, pipeline
 *        orchestration, and report/figure rendering.
 *
 * Every command is a plain function taking a RunConfig and an output stream
 * and returning a process exit code, so the CLI binary stays a thin argument
 * parser and everything here is testable in-process. Exit-code contract:
 * 0 covers every mathematical outcome including INCONCLUSIVE; nonzero means
 * an operational failure (bad config, numerics that refused, missing files).
 */

#include "relmono/periods.hpp"
#include "relmono/search.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace relmono {

// ---------------------------------------------------------------------------
// run configuration
// ---------------------------------------------------------------------------

/// Artifact destinations; empty strings skip the artifact. The figure path
/// also derives the translation-scatter name (stem + "_translations.svg").
struct OutputPaths {
    std::string json;
    std::string text;
    std::string svg;
};

/**
 * One fully specified run. Exactly one of scheme/presentation is set: a
 * scheme runs the analytic continuation pipeline, a presentation (synthetic
 * fixtures) feeds the word search directly with no numerics. When
 * auto_loops is true the loop list is generated by plan_loops; otherwise the
 * explicit loops are used as given.
 */
struct RunConfig {
    std::string fixture;  ///< provenance label when expanded from a fixture
    std::optional<SchemeSpec> scheme;
    std::optional<IPresentation> presentation;
    bool auto_loops = true;
    std::vector<LoopPath> loops;  ///< used only when auto_loops is false
    LoopOptions loop_options;
    ContinuationOptions continuation;
    SearchConfig search;
    std::vector<cplx> lambda_samples;  ///< rows of the periods table
    OutputPaths output;
    std::string cache_dir;  ///< empty disables the extraction cache
};

/// Structural checks (exactly one input route, loops closed, samples finite).
/// Throws std::invalid_argument with the offending field.
void validate_run_config(const RunConfig& cfg);

njson config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const njson& j);

/// Parses a config file; errors mention the path.
RunConfig load_config_file(const std::string& path);

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

/// Names accepted by fixture_config, in display order.
const std::vector<std::string>& fixture_names();

/// The synthetic two-generator presentation (k = 1): A = ([[1,2],[0,1]];
/// (1,0)), B = ([[1,0],[2,1]]; (0,1)). The block pair generates a free
/// group, so the word search finds an empty kernel at any depth.
IPresentation synthetic_free_presentation();

/**
 * Expands a fixture name {ISO-EXAMPLE, NONISO-EXAMPLE, REMARK-FIXTURE} to a
 * full RunConfig. Built in code; the checked-in files under configs/ are the
 * serialized forms of exactly these objects and are compared in tests.
 * Unknown names throw std::invalid_argument listing the valid ones.
 */
RunConfig fixture_config(const std::string& name);

/// Path of the checked-in config file for a fixture name.
std::string fixture_config_path(const std::string& name);

// ---------------------------------------------------------------------------
// loop planning
// ---------------------------------------------------------------------------

/// Deterministic generating circuits with one policy note per decision.
struct LoopPlan {
    std::vector<LoopPath> loops;
    std::vector<std::string> notes;
};

/**
 * Plans generating circuits from the automatic lassos, using only the
 * algebraic closure test on the sign cover (no numerics): closing lassos are
 * kept as-is; a non-closing lasso contributes its square; pairs of
 * non-closing lassos whose sign flips cancel contribute their composite;
 * and every lasso pair contributes its commutator (commutators always
 * close). Order: singles, squares, pairs, commutators, each in branch-point
 * order.
 */
LoopPlan plan_loops(const SchemeSpec& spec, const LoopOptions& opts);

// ---------------------------------------------------------------------------
// extraction cache
// ---------------------------------------------------------------------------

/// Content hash (hex) of everything an extraction depends on: the scheme,
/// the loop (name excluded — geometry only), and the continuation
/// tolerances. Changing any tolerance changes the key.
std::string continuation_cache_key(const SchemeSpec& spec, const LoopPath& loop,
                                   const ContinuationOptions& opts);

/**
 * loop_monodromy behind a file cache. A hit reproduces the exact integer
 * element (decimal-string serialization, no numeric rebuild); a miss runs
 * the extraction and stores it. Empty cache_dir bypasses the cache. File
 * access is lock-guarded within the process; the last writer wins.
 */
ContinuationResult cached_loop_monodromy(const SchemeSpec& spec, const AnalyticFrame& base_frame,
                                         const LoopPath& loop, const ContinuationOptions& opts,
                                         const std::string& cache_dir);

/// Cache directory resolution: MONODROMY_CACHE env var beats the CLI flag,
/// which beats the config field; empty result disables caching.
std::string resolve_cache_dir(const std::string& flag_value, const std::string& config_value);

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

/// Presentation plus per-generator extraction metadata (synthetic route:
/// residual 0, frames 0). Identity extractions are dropped and listed.
struct PresentationRun {
    IPresentation presentation;
    std::vector<double> residuals;
    std::vector<int> frames_sampled;
    std::vector<std::string> planning_notes;
    std::vector<std::string> dropped;  ///< loop names whose extraction was the identity
};

/// Runs the configured route end to end (loop planning, cached extraction,
/// identity dropping). Throws on operational failure.
PresentationRun run_presentation(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

/// Period/τ table at the configured λ samples. Rows that refuse (punctures,
/// invalid values) become error rows; with keep_going those still exit 0.
int cmd_periods(const RunConfig& cfg, std::ostream& out, bool keep_going);

/// Extracts the presentation and emits the generator table plus reports.
/// The synthetic route emits the configured generators verbatim.
int cmd_monodromy(const RunConfig& cfg, std::ostream& out);

/// Full pipeline: presentation, word search, classification. Exit 0 on any
/// verdict including INCONCLUSIVE; nonzero only on operational failure.
int cmd_classify(const RunConfig& cfg, std::ostream& out);

/**
 * Figures: the base-plane map (branch points labeled, punctures filled,
 * loops drawn) at output.svg, and — when loops exist — a 2D scatter of the
 * harvested kernel translations read from the classify report at
 * output.json (stem + "_translations.svg"). Missing prior results are an
 * operational error; a loop-free config yields the points-only figure alone.
 * Byte-deterministic for a fixed config and report.
 */
int cmd_plot(const RunConfig& cfg, std::ostream& out);

}  // namespace relmono
