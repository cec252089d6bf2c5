#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqfuse/data.hpp"
#include "seqfuse/ensemble.hpp"
#include "seqfuse/metrics.hpp"
#include "seqfuse/types.hpp"

namespace seqfuse {

// ---------------------------------------------------------------------------
// Predictions interchange: JSON Lines, one (id, model) pair per line, with
// either "tokens" (gloss strings) or "logits" (T rows of N+1 probabilities).
// A file holds one kind only. An optional numeric "val_wacc" carries the
// model's validation word accuracy.

enum class PredictionKind { Tokens, Logits };

struct PredictionRecord {
  std::string id;
  int model = 0;
  Sequence tokens;  // decoded already when the line held logits
  std::optional<double> val_wacc;
};

struct PredictionSet {
  PredictionKind kind = PredictionKind::Tokens;
  std::vector<PredictionRecord> records;  // file order

  int num_models() const;
  // Predictions for one id indexed by model; missing models are nullopt.
  std::map<std::string, std::vector<std::optional<Sequence>>> by_id() const;
  // Ids in order of first appearance.
  std::vector<std::string> ids() const;
};

PredictionSet parse_predictions(const std::string& text, const GlossAlphabet& alphabet,
                                const std::string& source = "<predictions>");
PredictionSet read_predictions(const std::filesystem::path& path, const GlossAlphabet& alphabet);

std::string predictions_to_jsonl(std::span<const PredictionRecord> records, const GlossAlphabet& alphabet);

struct SampleConsensus {
  std::string id;
  EnsembleTrace trace;
};

/// Ensembles every id of the set, in first-appearance order. Every id needs a
/// prediction from each of the num_models() models.
std::vector<SampleConsensus> ensemble_predictions(const PredictionSet& preds, const VoteConfig& config);

std::string trace_to_json(std::span<const SampleConsensus> traces, const GlossAlphabet& alphabet);

// ---------------------------------------------------------------------------
// Evaluation report

struct MetricCells {
  double slacc = 0;
  double sacc = 0;
  double wacc = 0;
  double wwacc = 0;
};

MetricCells cells_of(const MetricsReport& r);

enum class SelectionBasis {
  Validation,  // every model carried val_wacc
  Evaluation,  // picked on the evaluated data itself (optimistic)
};

struct SubjectEval {
  int subject = 0;
  std::size_t samples = 0;
  SelectionBasis basis = SelectionBasis::Evaluation;
  std::vector<double> selection_score;  // per model
  std::vector<int> model_rank;          // per model, 1 = best
  int best_model = 0;
  MetricCells before;  // best single model
  MetricCells after;   // ensembled
};

struct EvalReport {
  int num_models = 0;
  ScoringScheme scheme{};
  GapPolicy gap_policy = GapPolicy::Participate;
  std::vector<SubjectEval> subjects;  // ascending subject id
  MetricCells average_before;         // arithmetic mean over subjects
  MetricCells average_after;

  bool optimistic_selection() const;
};

/// Per-subject metrics of the best single model and of the ensemble.
/// Every manifest id must be covered by every model.
EvalReport evaluate(const PredictionSet& preds, const Manifest& manifest, const GlossAlphabet& alphabet,
                    const VoteConfig& config = {});

std::string to_json(const EvalReport& report);
EvalReport eval_report_from_json(const std::string& text);

/// Metric rows by subject columns, "before / after" cells with two decimals.
std::string to_markdown(const EvalReport& report);

// ---------------------------------------------------------------------------
// Rank analysis across variants

// One variant's values over a fixed set of named cells.
struct MetricGrid {
  std::string name;
  std::vector<std::string> keys;
  std::vector<double> values;
};

/// The before and after grids of a report: "<name> pre" and "<name> post",
/// cells = 4 metrics x (subjects + average).
std::vector<MetricGrid> grids_from_report(const EvalReport& report, const std::string& name);

struct RankTable {
  std::vector<std::string> names;
  std::vector<double> average_rank;  // 1 = worst
  std::size_t cells = 0;
};

/// Ranks variants within every cell in ascending order of value (ties share
/// the mean of their positions) and averages each variant's ranks.
RankTable rank_report(std::span<const MetricGrid> variants);

std::string to_json(const RankTable& table);
std::string to_markdown(const RankTable& table);

std::string format_fixed2(double v);

}  // namespace seqfuse
