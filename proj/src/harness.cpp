#include "seqfuse/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "seqfuse/ctc.hpp"

namespace seqfuse {

using ojson = nlohmann::ordered_json;

std::string format_fixed2(double v) {
  // half away from zero, so exact ties such as 3.125 print as 3.13
  double r = std::round(v * 100.0) / 100.0;
  if (r == 0.0) r = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", r);
  return buf;
}

// --- predictions -----------------------------------------------------------

int PredictionSet::num_models() const {
  int k = 0;
  for (const auto& r : records) k = std::max(k, r.model + 1);
  return k;
}

std::map<std::string, std::vector<std::optional<Sequence>>> PredictionSet::by_id() const {
  const auto k = static_cast<std::size_t>(num_models());
  std::map<std::string, std::vector<std::optional<Sequence>>> out;
  for (const auto& r : records) {
    auto& slot = out[r.id];
    slot.resize(k);
    slot[static_cast<std::size_t>(r.model)] = r.tokens;
  }
  return out;
}

std::vector<std::string> PredictionSet::ids() const {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.id).second) ids.push_back(r.id);
  }
  return ids;
}

PredictionSet parse_predictions(const std::string& text, const GlossAlphabet& alphabet, const std::string& source) {
  PredictionSet set;
  std::optional<PredictionKind> kind;
  std::set<std::pair<std::string, int>> seen;
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string at = source + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, at + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("model")) {
      throw Error(ErrorCode::SchemaError, at + ": need id and model");
    }
    const bool has_tokens = j.contains("tokens");
    const bool has_logits = j.contains("logits");
    if (has_tokens == has_logits) throw Error(ErrorCode::SchemaError, at + ": need exactly one of tokens, logits");
    const PredictionKind line_kind = has_tokens ? PredictionKind::Tokens : PredictionKind::Logits;
    if (kind && *kind != line_kind) throw Error(ErrorCode::SchemaError, at + ": tokens and logits mixed in one file");
    kind = line_kind;

    PredictionRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      r.model = j.at("model").get<int>();
      if (j.contains("val_wacc")) r.val_wacc = j.at("val_wacc").get<double>();
      if (r.model < 0) throw Error(ErrorCode::SchemaError, at + ": negative model index");
      if (has_tokens) {
        for (const auto& g : j.at("tokens").get<std::vector<std::string>>()) {
          if (!alphabet.contains(g)) throw Error(ErrorCode::AlphabetMismatch, at + ": gloss '" + g + "' not in alphabet");
          r.tokens.push_back(alphabet.id(g));
        }
      } else {
        const auto rows = j.at("logits").get<std::vector<std::vector<double>>>();
        if (rows.empty()) throw Error(ErrorCode::SchemaError, at + ": logits need at least one frame");
        FrameScores<double> scores(static_cast<Eigen::Index>(rows.size()),
                                   static_cast<Eigen::Index>(alphabet.num_ctc_classes()));
        for (std::size_t t = 0; t < rows.size(); ++t) {
          if (rows[t].size() != alphabet.num_ctc_classes()) {
            throw Error(ErrorCode::AlphabetMismatch, at + ": logits row has " + std::to_string(rows[t].size()) +
                                                         " classes, alphabet needs " +
                                                         std::to_string(alphabet.num_ctc_classes()));
          }
          for (std::size_t c = 0; c < rows[t].size(); ++c) {
            scores(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = rows[t][c];
          }
        }
        r.tokens = greedy_decode(scores);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError, at + ": " + e.what());
    }
    if (!seen.emplace(r.id, r.model).second) {
      throw Error(ErrorCode::SchemaError, at + ": duplicate (" + r.id + ", " + std::to_string(r.model) + ")");
    }
    set.records.push_back(std::move(r));
  }
  set.kind = kind.value_or(PredictionKind::Tokens);
  return set;
}

PredictionSet read_predictions(const std::filesystem::path& path, const GlossAlphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_predictions(ss.str(), alphabet, path.string());
}

std::string predictions_to_jsonl(std::span<const PredictionRecord> records, const GlossAlphabet& alphabet) {
  std::string out;
  for (const auto& r : records) {
    ojson j;
    j["id"] = r.id;
    j["model"] = r.model;
    j["tokens"] = decode(r.tokens, alphabet);
    if (r.val_wacc) j["val_wacc"] = *r.val_wacc;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<SampleConsensus> ensemble_predictions(const PredictionSet& preds, const VoteConfig& config) {
  const auto table = preds.by_id();
  const int k = preds.num_models();
  std::vector<SampleConsensus> out;
  for (const auto& id : preds.ids()) {
    const auto& slots = table.at(id);
    std::vector<Sequence> seqs;
    seqs.reserve(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m) {
      const auto& s = slots[static_cast<std::size_t>(m)];
      if (!s) throw Error(ErrorCode::MissingPrediction, "id " + id + ", model " + std::to_string(m));
      seqs.push_back(*s);
    }
    out.push_back({id, ensemble(seqs, config)});
  }
  return out;
}

namespace {

ojson glosses_with_gaps(const AlignedSequence& row, const GlossAlphabet& alphabet) {
  ojson arr = ojson::array();
  for (Token t : row) arr.push_back(t == kGap ? std::string("-") : alphabet.gloss(t));
  return arr;
}

}  // namespace

std::string trace_to_json(std::span<const SampleConsensus> traces, const GlossAlphabet& alphabet) {
  ojson arr = ojson::array();
  for (const auto& [id, trace] : traces) {
    ojson j;
    j["id"] = id;
    ojson inputs = ojson::array();
    for (const auto& s : trace.inputs) inputs.push_back(decode(s, alphabet));
    j["inputs"] = std::move(inputs);
    j["center"] = trace.aligned.center_index;
    j["total_score"] = trace.aligned.total_score;
    ojson aligned = ojson::array();
    for (const auto& row : trace.aligned.aligned) aligned.push_back(glosses_with_gaps(row, alphabet));
    j["aligned"] = std::move(aligned);
    ojson columns = ojson::array();
    for (const auto& col : trace.columns) {
      ojson c;
      ojson votes = ojson::array();
      for (const auto& [tok, n] : col.counts) {
        votes.push_back(ojson{{"symbol", tok == kGap ? std::string("-") : alphabet.gloss(tok)}, {"votes", n}});
      }
      c["votes"] = std::move(votes);
      c["winner"] = col.winner == kGap ? std::string("-") : alphabet.gloss(col.winner);
      columns.push_back(std::move(c));
    }
    j["columns"] = std::move(columns);
    j["output"] = decode(trace.output, alphabet);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

// --- evaluation ------------------------------------------------------------

MetricCells cells_of(const MetricsReport& r) { return {r.slacc, r.sacc, r.total_wacc, r.wwacc}; }

bool EvalReport::optimistic_selection() const {
  return std::any_of(subjects.begin(), subjects.end(),
                     [](const SubjectEval& s) { return s.basis == SelectionBasis::Evaluation; });
}

namespace {

MetricCells mean_cells(const std::vector<SubjectEval>& subjects, MetricCells SubjectEval::*field) {
  MetricCells m;
  if (subjects.empty()) return m;
  for (const auto& s : subjects) {
    const MetricCells& c = s.*field;
    m.slacc += c.slacc;
    m.sacc += c.sacc;
    m.wacc += c.wacc;
    m.wwacc += c.wwacc;
  }
  const auto n = static_cast<double>(subjects.size());
  m.slacc /= n;
  m.sacc /= n;
  m.wacc /= n;
  m.wwacc /= n;
  return m;
}

}  // namespace

EvalReport evaluate(const PredictionSet& preds, const Manifest& manifest, const GlossAlphabet& alphabet,
                    const VoteConfig& config) {
  if (manifest.entries.empty()) throw Error(ErrorCode::EmptyInput, "manifest has no samples");
  const int k = preds.num_models();
  if (k == 0) throw Error(ErrorCode::EmptyInput, "no predictions");
  const auto table = preds.by_id();

  // Validation WAcc per (subject, model), first value seen.
  std::map<std::pair<int, int>, double> val;
  std::map<std::string, int> subject_of;
  for (const auto& e : manifest.entries) subject_of[e.id] = e.subject;
  for (const auto& r : preds.records) {
    auto it = subject_of.find(r.id);
    if (r.val_wacc && it != subject_of.end()) val.emplace(std::make_pair(it->second, r.model), *r.val_wacc);
  }

  struct Row {
    Sequence gt;
    std::vector<Sequence> preds;
  };
  std::map<int, std::vector<Row>> by_subject;
  for (const auto& e : manifest.entries) {
    Row row{encode(e.label, alphabet), {}};
    auto it = table.find(e.id);
    for (int m = 0; m < k; ++m) {
      if (it == table.end() || !it->second[static_cast<std::size_t>(m)]) {
        throw Error(ErrorCode::MissingPrediction, "id " + e.id + ", model " + std::to_string(m));
      }
      row.preds.push_back(*it->second[static_cast<std::size_t>(m)]);
    }
    by_subject[e.subject].push_back(std::move(row));
  }

  EvalReport report;
  report.num_models = k;
  report.scheme = config.scheme;
  report.gap_policy = config.gap_policy;
  for (const auto& [subject, rows] : by_subject) {
    SubjectEval se;
    se.subject = subject;
    se.samples = rows.size();

    std::vector<MetricsReport> per_model;
    for (int m = 0; m < k; ++m) {
      std::vector<ReferencePair> pairs;
      pairs.reserve(rows.size());
      for (const auto& r : rows) pairs.emplace_back(r.gt, r.preds[static_cast<std::size_t>(m)]);
      per_model.push_back(aggregate(pairs));
    }

    bool all_val = true;
    for (int m = 0; m < k; ++m) all_val = all_val && val.count({subject, m}) > 0;
    se.basis = all_val ? SelectionBasis::Validation : SelectionBasis::Evaluation;
    for (int m = 0; m < k; ++m) {
      se.selection_score.push_back(all_val ? val.at({subject, m}) : per_model[static_cast<std::size_t>(m)].total_wacc);
    }
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return se.selection_score[static_cast<std::size_t>(a)] > se.selection_score[static_cast<std::size_t>(b)];
    });
    se.model_rank.assign(static_cast<std::size_t>(k), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) se.model_rank[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos) + 1;
    se.best_model = order.front();
    se.before = cells_of(per_model[static_cast<std::size_t>(se.best_model)]);

    std::vector<ReferencePair> fused;
    fused.reserve(rows.size());
    for (const auto& r : rows) fused.emplace_back(r.gt, ensemble(r.preds, config).output);
    se.after = cells_of(aggregate(fused));
    report.subjects.push_back(std::move(se));
  }
  report.average_before = mean_cells(report.subjects, &SubjectEval::before);
  report.average_after = mean_cells(report.subjects, &SubjectEval::after);
  return report;
}

namespace {

ojson cells_json(const MetricCells& c) {
  return ojson{{"slacc", c.slacc}, {"sacc", c.sacc}, {"wacc", c.wacc}, {"wwacc", c.wwacc}};
}

MetricCells cells_from(const nlohmann::json& j) {
  return {j.at("slacc").get<double>(), j.at("sacc").get<double>(), j.at("wacc").get<double>(),
          j.at("wwacc").get<double>()};
}

const char* basis_name(SelectionBasis b) { return b == SelectionBasis::Validation ? "validation" : "evaluation"; }

}  // namespace

std::string to_json(const EvalReport& report) {
  ojson j;
  j["num_models"] = report.num_models;
  j["scheme"] = ojson{{"match", report.scheme.match}, {"mismatch", report.scheme.mismatch}, {"gap", report.scheme.gap}};
  j["gap_policy"] = report.gap_policy == GapPolicy::Participate ? "participate" : "exclude";
  j["optimistic_selection"] = report.optimistic_selection();
  ojson subjects = ojson::array();
  for (const auto& s : report.subjects) {
    ojson o;
    o["subject"] = s.subject;
    o["samples"] = s.samples;
    o["selection_basis"] = basis_name(s.basis);
    o["selection_score"] = s.selection_score;
    o["model_rank"] = s.model_rank;
    o["best_model"] = s.best_model;
    o["before"] = cells_json(s.before);
    o["after"] = cells_json(s.after);
    subjects.push_back(std::move(o));
  }
  j["subjects"] = std::move(subjects);
  j["average"] = ojson{{"before", cells_json(report.average_before)}, {"after", cells_json(report.average_after)}};
  return j.dump(2) + "\n";
}

EvalReport eval_report_from_json(const std::string& text) {
  EvalReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.num_models = j.at("num_models").get<int>();
    const auto& sc = j.at("scheme");
    r.scheme = {sc.at("match").get<int>(), sc.at("mismatch").get<int>(), sc.at("gap").get<int>()};
    r.gap_policy = j.at("gap_policy").get<std::string>() == "exclude" ? GapPolicy::Exclude : GapPolicy::Participate;
    for (const auto& o : j.at("subjects")) {
      SubjectEval s;
      s.subject = o.at("subject").get<int>();
      s.samples = o.at("samples").get<std::size_t>();
      s.basis = o.at("selection_basis").get<std::string>() == "validation" ? SelectionBasis::Validation
                                                                            : SelectionBasis::Evaluation;
      s.selection_score = o.at("selection_score").get<std::vector<double>>();
      s.model_rank = o.at("model_rank").get<std::vector<int>>();
      s.best_model = o.at("best_model").get<int>();
      s.before = cells_from(o.at("before"));
      s.after = cells_from(o.at("after"));
      r.subjects.push_back(std::move(s));
    }
    r.average_before = cells_from(j.at("average").at("before"));
    r.average_after = cells_from(j.at("average").at("after"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("eval report: ") + e.what());
  }
  return r;
}

namespace {

struct MetricField {
  const char* name;
  double MetricCells::*field;
};

constexpr MetricField kMetricFields[] = {
    {"SLAcc", &MetricCells::slacc},
    {"SAcc", &MetricCells::sacc},
    {"WAcc", &MetricCells::wacc},
    {"WWAcc", &MetricCells::wwacc},
};

}  // namespace

std::string to_markdown(const EvalReport& report) {
  std::ostringstream out;
  out << "| Metric |";
  for (const auto& s : report.subjects) out << " Subject " << s.subject << " |";
  out << " Average |\n|---|";
  for (std::size_t i = 0; i <= report.subjects.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& [name, field] : kMetricFields) {
    out << "| " << name << " |";
    for (const auto& s : report.subjects) {
      out << ' ' << format_fixed2(s.before.*field) << " / " << format_fixed2(s.after.*field) << " |";
    }
    out << ' ' << format_fixed2(report.average_before.*field) << " / " << format_fixed2(report.average_after.*field)
        << " |\n";
  }
  out << "\nCells: best single model / ensembled (" << report.num_models << " models, S_match=" << report.scheme.match
      << ", S_mis=" << report.scheme.mismatch << ", S_gap=" << report.scheme.gap << ").\n";
  out << "Best models:";
  for (const auto& s : report.subjects) out << " subject " << s.subject << " -> model " << s.best_model << ';';
  out << '\n';
  if (report.optimistic_selection()) {
    out << "\nNote: no validation scores were supplied for some subjects; their best single model was chosen on the "
           "evaluated data, which biases the left-hand numbers upward.\n";
  }
  return out.str();
}

// --- ranks -------------------------------------------------------------------

std::vector<MetricGrid> grids_from_report(const EvalReport& report, const std::string& name) {
  MetricGrid pre{name + " pre", {}, {}};
  MetricGrid post{name + " post", {}, {}};
  for (const auto& [metric, field] : kMetricFields) {
    for (const auto& s : report.subjects) {
      const std::string key = std::string(metric) + "/subject " + std::to_string(s.subject);
      pre.keys.push_back(key);
      post.keys.push_back(key);
      pre.values.push_back(s.before.*field);
      post.values.push_back(s.after.*field);
    }
    const std::string key = std::string(metric) + "/average";
    pre.keys.push_back(key);
    post.keys.push_back(key);
    pre.values.push_back(report.average_before.*field);
    post.values.push_back(report.average_after.*field);
  }
  return {pre, post};
}

RankTable rank_report(std::span<const MetricGrid> variants) {
  if (variants.size() < 2) throw Error(ErrorCode::ShapeMismatch, "rank analysis needs at least two variants");
  const auto& keys = variants.front().keys;
  for (const auto& v : variants) {
    if (v.keys != keys || v.values.size() != keys.size()) {
      throw Error(ErrorCode::ShapeMismatch, "variant '" + v.name + "' does not share the cell layout");
    }
  }
  if (keys.empty()) throw Error(ErrorCode::ShapeMismatch, "variants have no cells");

  const std::size_t n = variants.size();
  RankTable table;
  table.cells = keys.size();
  table.average_rank.assign(n, 0.0);
  for (const auto& v : variants) table.names.push_back(v.name);

  std::vector<std::size_t> order(n);
  for (std::size_t c = 0; c < keys.size(); ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return variants[a].values[c] < variants[b].values[c]; });
    for (std::size_t lo = 0; lo < n;) {
      std::size_t hi = lo;
      while (hi + 1 < n && variants[order[hi + 1]].values[c] == variants[order[lo]].values[c]) ++hi;
      const double shared = (static_cast<double>(lo + 1) + static_cast<double>(hi + 1)) / 2.0;
      for (std::size_t p = lo; p <= hi; ++p) table.average_rank[order[p]] += shared;
      lo = hi + 1;
    }
  }
  for (double& r : table.average_rank) r /= static_cast<double>(keys.size());
  return table;
}

std::string to_json(const RankTable& table) {
  ojson j;
  j["cells"] = table.cells;
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < table.names.size(); ++i) {
    rows.push_back(ojson{{"variant", table.names[i]}, {"average_rank", table.average_rank[i]}});
  }
  j["variants"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string to_markdown(const RankTable& table) {
  std::ostringstream out;
  out << "| Variant | Average rank |\n|---|---|\n";
  for (std::size_t i = 0; i < table.names.size(); ++i) {
    out << "| " << table.names[i] << " | " << format_fixed2(table.average_rank[i]) << " |\n";
  }
  out << "\nRanks per cell run from 1 (worst) to " << table.names.size() << " (best) over " << table.cells
      << " cells; ties share the mean rank.\n";
  return out.str();
}

}  // namespace seqfuse
