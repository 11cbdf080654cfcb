#pragma once

// End-to-end evaluation: datasets, per-sample pipeline, metrics, reports.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slroute/fol_engine.hpp"
#include "slroute/gateway.hpp"
#include "slroute/ir.hpp"
#include "slroute/lp_engine.hpp"
#include "slroute/router.hpp"

namespace slroute::harness {

enum class Strategy { FixedFol, FixedLp, FixedSat, Random, Adaptive, AdaptiveHeuristic };

/// fixed-fol, fixed-lp, fixed-sat, random, adaptive, adaptive-heuristic.
std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view text);
/// Row label used in markdown reports.
std::string_view display_name(Strategy s);

// -- datasets ---------------------------------------------------------------

struct LoadError {
  int line = 0;
  std::string message;
};

struct Dataset {
  std::vector<Problem> problems;
  std::vector<LoadError> errors;
};

/// One JSON object per line:
///   {"id", "context": [string...], "question", "options": [string...], "answer_index"}
/// Blank lines are skipped. Malformed lines and repeated ids become errors.
Dataset parse_dataset(std::string_view text);
/// Throws std::runtime_error when the file cannot be read.
Dataset load_dataset(const std::string& path);

/// A single problem object in the dataset schema. Throws std::invalid_argument.
Problem parse_problem(std::string_view json_text);
std::string problem_to_json(const Problem& p);

/// `per_source` problems from each named source, ids prefixed "<name>/".
std::vector<Problem> mix_datasets(const std::vector<std::pair<std::string, std::vector<Problem>>>& sources,
                                  std::size_t per_source = 100);

/// Mean of 1 / option count over the problems.
double chance_of(const std::vector<Problem>& problems);

// -- pipeline ---------------------------------------------------------------

struct SolverLimits {
  fol::SaturationLimits fol;
  lp::Limits lp;
};

struct Deps {
  gateway::LlmClient* client = nullptr;  // must be safe for concurrent use
  std::uint64_t seed = 0;
  route::RouterConfig router = route::RouterConfig::defaults();
  SolverLimits limits;
};

/// True when every option reads True, False or Unknown.
bool is_verdict_style(const Problem& p);

/// Removes Markdown code-fence lines.
std::string strip_fences(std::string_view text);

struct Outcome {
  bool executed = false;
  std::optional<int> predicted;
  std::string verdict;
  FailureKind failure = FailureKind::None;
  std::string detail;
};

/// Parses and solves a translation and maps the verdict to an option.
///
/// Verdict-style problems take one task (FOL, LP) or one option statement
/// (SAT) and the True/False/Unknown label selects the option with that text.
/// Other problems take one task per option separated by `---` lines (FOL,
/// LP) or one statement per option (SAT); the unique entailed option wins.
Outcome solve_translation(const Problem& p, SlKind k, std::string_view translation,
                          const SolverLimits& limits = {});

/// Parse-only validation of a translation; the diagnostic text on failure.
std::optional<std::string> check_translation(const Problem& p, SlKind k,
                                             std::string_view translation);

/// Route, translate, parse, solve, map. Never throws.
RunRecord run_sample(const Problem& p, Strategy s, const Deps& deps);

/// Evaluates all problems on up to `jobs` workers; records sorted by id.
std::vector<RunRecord> run_all(const std::vector<Problem>& problems, Strategy s, const Deps& deps,
                               int jobs = 1);

// -- metrics and reports ----------------------------------------------------

/// Non-executed samples are credited `chance`. Throws std::invalid_argument
/// on an empty record list.
Metrics compute_metrics(const std::vector<RunRecord>& records, double chance);

struct ReportRow {
  std::string strategy;
  std::string dataset;
  Metrics metrics;
};

enum class ReportFormat { Csv, Markdown };

/// strategy,dataset,overall_acc,exec_rate,exec_acc,n with percentages to
/// two decimals.
std::string render_csv(const std::vector<ReportRow>& rows);
/// One row per strategy, three columns per dataset, a Chance row first and
/// the maximum of every column in bold.
std::string render_markdown(const std::vector<ReportRow>& rows);
/// Throws std::runtime_error on I/O failure.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path);

std::string run_record_to_json(const RunRecord& r);

}  // namespace slroute::harness
