// seqfuse: command-line front end for alignment, ensembling and evaluation.
//
// Exit codes: 0 success, 2 input error (bad files, flags or labels),
// 3 contract violation (inputs parse but break an operation's preconditions).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqfuse/alignment.hpp"
#include "seqfuse/data.hpp"
#include "seqfuse/ensemble.hpp"
#include "seqfuse/harness.hpp"
#include "seqfuse/preprocess.hpp"
#include "seqfuse/simulator.hpp"
#include "seqfuse/types.hpp"

namespace fs = std::filesystem;
using namespace seqfuse;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitContract = 3;

struct GlobalOptions {
  ScoringScheme scheme{};
  std::uint64_t seed = 42;
  std::string alphabet_path;
  std::string gap_policy = "participate";

  GlossAlphabet alphabet() const {
    return alphabet_path.empty() ? GlossAlphabet::standard() : GlossAlphabet::from_json_file(alphabet_path);
  }

  VoteConfig vote_config() const {
    VoteConfig c;
    c.scheme = scheme;
    c.gap_policy = gap_policy == "exclude" ? GapPolicy::Exclude : GapPolicy::Participate;
    return c;
  }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << text;
}

void warn_scheme(const ScoringScheme& s) {
  if (!s.is_sane()) {
    std::cerr << "warning: S_match=" << s.match << " is below S_mis or S_gap; alignments may be degenerate\n";
  }
}

// --- align -------------------------------------------------------------------

struct AlignOptions {
  std::vector<std::string> seqs;
  bool letters = false;
  bool json = false;
};

int run_align(const GlobalOptions& g, const AlignOptions& o) {
  warn_scheme(g.scheme);
  std::optional<GlossAlphabet> alphabet;
  std::vector<Sequence> seqs;
  if (o.letters) {
    std::set<std::string> chars;
    for (const auto& s : o.seqs) {
      for (char c : s) chars.insert(std::string(1, c));
    }
    if (chars.empty()) chars.insert("?");
    alphabet.emplace(std::vector<std::string>(chars.begin(), chars.end()));
    for (const auto& s : o.seqs) {
      Sequence seq;
      for (char c : s) seq.push_back(alphabet->id(std::string(1, c)));
      seqs.push_back(std::move(seq));
    }
  } else {
    alphabet.emplace(g.alphabet());
    for (const auto& s : o.seqs) {
      const auto words = split_words(s);
      seqs.push_back(encode(words, *alphabet));
    }
  }

  const StarResult star = star_align(seqs, g.scheme);
  auto symbol = [&](Token t) { return t == kGap ? std::string("-") : alphabet->gloss(t); };

  if (o.json) {
    nlohmann::ordered_json j;
    j["center"] = star.center_index;
    j["total_score"] = star.total_score;
    j["merge_order"] = star.merge_order;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : star.aligned) {
      nlohmann::ordered_json r = nlohmann::ordered_json::array();
      for (Token t : row) r.push_back(symbol(t));
      rows.push_back(std::move(r));
    }
    j["aligned"] = std::move(rows);
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  std::cout << "center: " << star.center_index << "\ntotal_score: " << star.total_score << '\n';
  std::vector<std::size_t> width(star.width(), 1);
  for (const auto& row : star.aligned) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], symbol(row[c]).size());
  }
  for (const auto& row : star.aligned) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::string cell = symbol(row[c]);
      if (!o.letters) cell.resize(width[c], ' ');
      std::cout << cell << (o.letters || c + 1 == row.size() ? "" : " ");
    }
    std::cout << '\n';
  }
  return 0;
}

// --- decode / ensemble / evaluate ---------------------------------------------

struct DecodeOptions {
  std::string logits;
  std::string out;
};

int run_decode(const GlobalOptions& g, const DecodeOptions& o) {
  const GlossAlphabet alphabet = g.alphabet();
  const PredictionSet set = read_predictions(o.logits, alphabet);
  emit(o.out, predictions_to_jsonl(set.records, alphabet));
  return 0;
}

struct EnsembleOptions {
  std::string predictions;
  std::string out;
  std::string trace;
};

int run_ensemble(const GlobalOptions& g, const EnsembleOptions& o) {
  warn_scheme(g.scheme);
  const GlossAlphabet alphabet = g.alphabet();
  const PredictionSet set = read_predictions(o.predictions, alphabet);
  const auto consensus = ensemble_predictions(set, g.vote_config());
  std::vector<PredictionRecord> out;
  out.reserve(consensus.size());
  for (const auto& c : consensus) out.push_back({c.id, 0, c.trace.output, std::nullopt});
  emit(o.out, predictions_to_jsonl(out, alphabet));
  if (!o.trace.empty()) emit(o.trace, trace_to_json(consensus, alphabet) + "\n");
  return 0;
}

struct EvaluateOptions {
  std::string predictions;
  std::string manifest;
  std::string out;
  std::string markdown;
};

int run_evaluate(const GlobalOptions& g, const EvaluateOptions& o) {
  warn_scheme(g.scheme);
  const GlossAlphabet alphabet = g.alphabet();
  const PredictionSet set = read_predictions(o.predictions, alphabet);
  const Manifest manifest = read_manifest(o.manifest);
  const EvalReport report = evaluate(set, manifest, alphabet, g.vote_config());
  emit(o.out, to_json(report));
  if (!o.markdown.empty()) emit(o.markdown, to_markdown(report));
  return 0;
}

// --- simulate ----------------------------------------------------------------

struct SimulateOptions {
  std::size_t n = 200;
  std::size_t k = 5;
  std::size_t min_len = 1;
  std::size_t max_len = 8;
  int subjects = 5;
  double p_sub = 0.05;
  double p_ins = 0.05;
  double p_del = 0.05;
  std::string out_dir;
};

int run_simulate(const GlobalOptions& g, const SimulateOptions& o) {
  if (o.subjects < 1) throw Error(ErrorCode::InvalidArgument, "--subjects must be positive");
  const GlossAlphabet alphabet = g.alphabet();
  const NoiseModel noise{o.p_sub, o.p_ins, o.p_del, g.seed};
  const SimulatedExperiment exp = simulate_experiment(o.n, o.min_len, o.max_len, o.k, noise, alphabet.size());

  Manifest manifest;
  std::vector<PredictionRecord> preds;
  for (std::size_t i = 0; i < o.n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "sim-%05zu", i);
    manifest.entries.push_back(
        {id, static_cast<int>(i % static_cast<std::size_t>(o.subjects)) + 1, "", decode(exp.ground_truth[i], alphabet)});
  }
  for (std::size_t i = 0; i < o.n; ++i) {
    for (std::size_t m = 0; m < o.k; ++m) {
      preds.push_back({manifest.entries[i].id, static_cast<int>(m), exp.predictions[m][i], std::nullopt});
    }
  }
  fs::create_directories(o.out_dir);
  write_manifest(fs::path(o.out_dir) / "manifest.jsonl", manifest);
  emit((fs::path(o.out_dir) / "predictions.jsonl").string(), predictions_to_jsonl(preds, alphabet));
  return 0;
}

// --- preprocess --------------------------------------------------------------

struct PreprocessOptions {
  std::string train_manifest;
  std::string apply_manifest;
  std::string stats;
  std::string out_dir;
};

std::string safe_name(const std::string& id) {
  std::string s = id;
  for (char& c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return s;
}

void write_split(const fs::path& dir, const LoadedDataset& source, const std::vector<SampleRecord>& kept,
                 const NormalizationStats& norm) {
  fs::create_directories(dir / "frames");
  Manifest out;
  out.tag = source.manifest.tag;
  std::map<std::string, const ManifestEntry*> entry_of;
  for (const auto& e : source.manifest.entries) entry_of[e.id] = &e;
  for (const auto& s : kept) {
    const SampleRecord normalized = apply_normalizer(s, norm);
    const std::string rel = "frames/" + safe_name(s.id) + ".csv";
    emit((dir / rel).string(), frames_to_csv(normalized.frames));
    out.entries.push_back({s.id, s.subject, rel, entry_of.at(s.id)->label});
  }
  write_manifest(dir / "manifest.jsonl", out);
}

int run_preprocess(const GlobalOptions& g, const PreprocessOptions& o) {
  const GlossAlphabet alphabet = g.alphabet();
  const LoadedDataset train = load_manifest(o.train_manifest, alphabet);
  std::optional<LoadedDataset> apply;
  if (!o.apply_manifest.empty()) apply = load_manifest(o.apply_manifest, alphabet);

  PreprocessStats stats;
  std::vector<SampleRecord> train_kept;
  if (!o.stats.empty()) {
    stats = preprocess_stats_from_json(slurp(o.stats));
    OutlierSplit split = reject_outliers(train.samples, stats.quartiles);
    train_kept = std::move(split.kept);
    stats.rejected = std::move(split.rejected);
  } else {
    stats.quartiles = fit_quartiles(train.samples);
    OutlierSplit split = reject_outliers(train.samples, stats.quartiles);
    train_kept = std::move(split.kept);
    stats.rejected = std::move(split.rejected);
    stats.normalizer = fit_normalizer(train_kept);
  }

  const fs::path out(o.out_dir);
  write_split(out / "train", train, train_kept, stats.normalizer);
  if (apply) {
    OutlierSplit split = reject_outliers(apply->samples, stats.quartiles);
    stats.rejected.insert(stats.rejected.end(), split.rejected.begin(), split.rejected.end());
    write_split(out / "apply", *apply, split.kept, stats.normalizer);
  }
  emit((out / "stats.json").string(), to_json(stats) + "\n");
  std::cerr << "rejected " << stats.rejected.size() << " outlier sample(s)\n";
  return 0;
}

// --- split / report / rank -----------------------------------------------------

struct SplitOptions {
  std::string manifest;
  std::string mode = "kfold";
  int k = 5;
  std::string out;
};

int run_split(const GlobalOptions& g, const SplitOptions& o) {
  const Manifest manifest = read_manifest(o.manifest);
  std::vector<SplitPlan> plans;
  if (o.mode == "kfold") {
    plans.push_back(split_kfold(manifest, o.k, g.seed));
  } else {
    plans = split_loso(manifest);
  }
  emit(o.out, to_json(plans) + "\n");
  return 0;
}

struct ReportOptions {
  std::string report;
  std::string out;
};

int run_report(const ReportOptions& o) {
  emit(o.out, to_markdown(eval_report_from_json(slurp(o.report))));
  return 0;
}

struct RankOptions {
  std::vector<std::string> reports;
  std::vector<std::string> names;
  std::string out;
  std::string json;
};

int run_rank(const RankOptions& o) {
  if (!o.names.empty() && o.names.size() != o.reports.size()) {
    throw Error(ErrorCode::InvalidArgument, "--names must match --reports one to one");
  }
  std::vector<MetricGrid> grids;
  for (std::size_t i = 0; i < o.reports.size(); ++i) {
    const std::string name = o.names.empty() ? fs::path(o.reports[i]).stem().string() : o.names[i];
    for (auto& grid : grids_from_report(eval_report_from_json(slurp(o.reports[i])), name)) {
      grids.push_back(std::move(grid));
    }
  }
  const RankTable table = rank_report(grids);
  emit(o.out, to_markdown(table));
  if (!o.json.empty()) emit(o.json, to_json(table));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqfuse: fuse variable-length predictions by star alignment and voting"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--s-match", g.scheme.match, "Score of a match")->capture_default_str();
  app.add_option("--s-mis", g.scheme.mismatch, "Score of a mismatch")->capture_default_str();
  app.add_option("--s-gap", g.scheme.gap, "Score of a gap")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--alphabet", g.alphabet_path, "JSON array of glosses (default: the 16 built-in glosses)");
  app.add_option("--gap-policy", g.gap_policy, "Whether GAP competes in column votes")
      ->check(CLI::IsMember({"participate", "exclude"}))
      ->capture_default_str();

  AlignOptions align;
  auto* align_cmd = app.add_subcommand("align", "Star-align sequences and print the aligned rows");
  align_cmd->add_option("seqs", align.seqs, "Sequences: quoted gloss lists, or strings with --letters")->required();
  align_cmd->add_flag("--letters", align.letters, "Treat every character as one token");
  align_cmd->add_flag("--json", align.json, "Print JSON");

  DecodeOptions dec;
  auto* decode_cmd = app.add_subcommand("decode", "Greedy CTC decoding of a logits predictions file");
  decode_cmd->add_option("--logits", dec.logits, "Predictions file with logits rows")->required();
  decode_cmd->add_option("--out", dec.out, "Output tokens predictions file (default stdout)");

  EnsembleOptions ens;
  auto* ensemble_cmd = app.add_subcommand("ensemble", "Fuse the k model predictions of every sample");
  ensemble_cmd->add_option("--predictions", ens.predictions, "Predictions file")->required();
  ensemble_cmd->add_option("--out", ens.out, "Consensus predictions file (default stdout)");
  ensemble_cmd->add_option("--dump-trace", ens.trace, "Write per-sample alignment and vote traces as JSON");

  EvaluateOptions ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Best-single vs ensembled metrics per subject");
  evaluate_cmd->add_option("--predictions", ev.predictions, "Predictions file")->required();
  evaluate_cmd->add_option("--manifest", ev.manifest, "Ground-truth manifest")->required();
  evaluate_cmd->add_option("--out", ev.out, "JSON report (default stdout)");
  evaluate_cmd->add_option("--markdown", ev.markdown, "Also write the markdown table here");

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate ground truth plus noisy predictions of k models");
  simulate_cmd->add_option("--n", sim.n, "Sentences")->capture_default_str();
  simulate_cmd->add_option("--k", sim.k, "Models")->capture_default_str();
  simulate_cmd->add_option("--min-len", sim.min_len, "Shortest sentence")->capture_default_str();
  simulate_cmd->add_option("--max-len", sim.max_len, "Longest sentence")->capture_default_str();
  simulate_cmd->add_option("--subjects", sim.subjects, "Subjects, assigned round robin")->capture_default_str();
  simulate_cmd->add_option("--p-sub", sim.p_sub, "Substitution probability")->capture_default_str();
  simulate_cmd->add_option("--p-ins", sim.p_ins, "Insertion probability")->capture_default_str();
  simulate_cmd->add_option("--p-del", sim.p_del, "Deletion probability")->capture_default_str();
  simulate_cmd->add_option("--out-dir", sim.out_dir, "Writes manifest.jsonl and predictions.jsonl")->required();

  PreprocessOptions pre;
  auto* preprocess_cmd = app.add_subcommand("preprocess", "IQR outlier rejection and min-max normalization");
  preprocess_cmd->add_option("--train-manifest", pre.train_manifest, "Training manifest")->required();
  preprocess_cmd->add_option("--apply-manifest", pre.apply_manifest, "Held-out manifest normalized with train stats");
  preprocess_cmd->add_option("--stats", pre.stats, "Reuse a stats.json sidecar instead of fitting");
  preprocess_cmd->add_option("--out-dir", pre.out_dir, "Output directory")->required();

  SplitOptions split;
  auto* split_cmd = app.add_subcommand("split", "k-fold or leave-one-subject-out split plans");
  split_cmd->add_option("--manifest", split.manifest, "Manifest")->required();
  split_cmd->add_option("--mode", split.mode, "kfold or loso")
      ->check(CLI::IsMember({"kfold", "loso"}))
      ->capture_default_str();
  split_cmd->add_option("--k", split.k, "Folds")->capture_default_str();
  split_cmd->add_option("--out", split.out, "Plan JSON (default stdout)");

  ReportOptions rep;
  auto* report_cmd = app.add_subcommand("report", "Render an evaluation report as markdown");
  report_cmd->add_option("--report", rep.report, "JSON report from evaluate")->required();
  report_cmd->add_option("--out", rep.out, "Markdown output (default stdout)");

  RankOptions rank;
  auto* rank_cmd = app.add_subcommand("rank", "Average per-cell ranks of before/after variants of several reports");
  rank_cmd->add_option("--reports", rank.reports, "JSON reports from evaluate")->required();
  rank_cmd->add_option("--names", rank.names, "Variant names, one per report");
  rank_cmd->add_option("--out", rank.out, "Markdown output (default stdout)");
  rank_cmd->add_option("--json", rank.json, "Also write JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*align_cmd) return run_align(g, align);
    if (*decode_cmd) return run_decode(g, dec);
    if (*ensemble_cmd) return run_ensemble(g, ens);
    if (*evaluate_cmd) return run_evaluate(g, ev);
    if (*simulate_cmd) return run_simulate(g, sim);
    if (*preprocess_cmd) return run_preprocess(g, pre);
    if (*split_cmd) return run_split(g, split);
    if (*report_cmd) return run_report(rep);
    if (*rank_cmd) return run_rank(rank);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_input_error(e.code()) || e.code() == ErrorCode::InvalidArgument ? kExitInput : kExitContract;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  }
  return 0;
}
