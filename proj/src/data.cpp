#include "seqfuse/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "seqfuse/random.hpp"

namespace seqfuse {

const char* to_string(DatasetTag tag) {
  switch (tag) {
    case DatasetTag::Short: return "D1-3";
    case DatasetTag::Long: return "D4-8";
    case DatasetTag::Mixed: return "mixed";
  }
  return "mixed";
}

DatasetTag infer_tag(const std::vector<ManifestEntry>& entries) {
  if (entries.empty()) return DatasetTag::Mixed;
  auto all = [&](std::size_t lo, std::size_t hi) {
    return std::all_of(entries.begin(), entries.end(),
                       [&](const ManifestEntry& e) { return e.label.size() >= lo && e.label.size() <= hi; });
  };
  if (all(1, 3)) return DatasetTag::Short;
  if (all(4, 8)) return DatasetTag::Long;
  return DatasetTag::Mixed;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line); }

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& source) {
  Manifest m;
  std::unordered_set<std::string> seen;
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, where(source, lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("subject") || !j.contains("label")) {
      throw Error(ErrorCode::SchemaError, where(source, lineno) + ": need id, subject and label");
    }
    ManifestEntry e;
    try {
      e.id = j.at("id").get<std::string>();
      e.subject = j.at("subject").get<int>();
      if (j.contains("frames")) e.frames = j.at("frames").get<std::string>();
      const auto& label = j.at("label");
      e.label = label.is_string() ? split_words(label.get<std::string>()) : label.get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::SchemaError, where(source, lineno) + ": " + ex.what());
    }
    if (!seen.insert(e.id).second) throw Error(ErrorCode::SchemaError, where(source, lineno) + ": duplicate id " + e.id);
    m.entries.push_back(std::move(e));
  }
  m.tag = infer_tag(m.entries);
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  Manifest m = parse_manifest(read_file(path), path.string());
  m.base_dir = path.parent_path();
  return m;
}

std::string manifest_to_jsonl(const Manifest& manifest) {
  std::string out;
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["subject"] = e.subject;
    if (!e.frames.empty()) j["frames"] = e.frames;
    j["label"] = e.label;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << manifest_to_jsonl(manifest);
}

FrameMatrix frames_from_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                              const std::string& source) {
  std::array<std::size_t, kNumFeatures> column_of{};
  for (Eigen::Index f = 0; f < kNumFeatures; ++f) {
    auto it = std::find(header.begin(), header.end(), kChannelNames[static_cast<std::size_t>(f)]);
    if (it == header.end()) {
      throw Error(ErrorCode::SchemaError, source + ": missing channel '" + kChannelNames[static_cast<std::size_t>(f)] + "'");
    }
    column_of[static_cast<std::size_t>(f)] = static_cast<std::size_t>(it - header.begin());
  }
  FrameMatrix frames(static_cast<Eigen::Index>(rows.size()), kNumFeatures);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != header.size()) {
      throw Error(ErrorCode::SchemaError, where(source, t + 2) + ": expected " + std::to_string(header.size()) +
                                              " columns, got " + std::to_string(rows[t].size()));
    }
    for (Eigen::Index f = 0; f < kNumFeatures; ++f) {
      frames(static_cast<Eigen::Index>(t), f) = rows[t][column_of[static_cast<std::size_t>(f)]];
    }
  }
  return frames;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

FrameMatrix read_frames_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::SchemaError, path.string() + ": empty frames file");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() != static_cast<std::size_t>(kNumFeatures)) {
    throw Error(ErrorCode::SchemaError, path.string() + ": expected 17 columns, header has " +
                                            std::to_string(header.size()));
  }

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::SchemaError, where(path.string(), lineno) + ": expected 17 columns, got " +
                                              std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const char* first = cells[c].data();
      const char* last = first + cells[c].size();
      auto [ptr, ec] = std::from_chars(first, last, row[c]);
      if (ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::ParseError, where(path.string(), lineno) + ": bad number '" + cells[c] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::SchemaError, path.string() + ": no frames");
  return frames_from_table(header, rows, path.string());
}

std::string frames_to_csv(const FrameMatrix& frames) {
  std::string out;
  for (std::size_t f = 0; f < kChannelNames.size(); ++f) {
    if (f) out += ',';
    out += kChannelNames[f];
  }
  out += '\n';
  char buf[64];
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    for (Eigen::Index f = 0; f < kNumFeatures; ++f) {
      if (f) out += ',';
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), frames(t, f));
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

LoadedDataset load_manifest(const std::filesystem::path& path, const GlossAlphabet& alphabet) {
  LoadedDataset ds;
  ds.manifest = read_manifest(path);
  ds.samples.reserve(ds.manifest.entries.size());
  for (const auto& e : ds.manifest.entries) {
    if (e.frames.empty()) throw Error(ErrorCode::SchemaError, path.string() + ": sample " + e.id + " has no frames file");
    SampleRecord s;
    s.id = e.id;
    s.subject = e.subject;
    s.frames = read_frames_csv(ds.manifest.frames_path(e));
    s.label = encode(e.label, alphabet);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

std::vector<std::string> SplitPlan::fold_ids(int fold) const {
  std::vector<std::string> ids;
  for (const auto& [id, f] : assignments) {
    if (f == fold) ids.push_back(id);
  }
  return ids;
}

std::vector<std::string> SplitPlan::test_ids() const {
  return fold_ids(mode == SplitMode::LeaveOneSubjectOut ? heldout_subject : 0);
}

std::vector<std::string> SplitPlan::train_ids() const {
  const int test = mode == SplitMode::LeaveOneSubjectOut ? heldout_subject : 0;
  std::vector<std::string> ids;
  for (const auto& [id, f] : assignments) {
    if (f != test) ids.push_back(id);
  }
  return ids;
}

SplitPlan split_kfold(const Manifest& manifest, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "kfold needs k >= 2");
  const std::size_t n = manifest.entries.size();
  if (n < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::TooFewSamples, std::to_string(n) + " samples for " + std::to_string(k) + " folds");
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  StreamRng rng(seed, /*stream=*/0x5D117);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  std::vector<int> fold(n);
  for (std::size_t p = 0; p < n; ++p) fold[order[p]] = static_cast<int>(p % static_cast<std::size_t>(k));

  SplitPlan plan;
  plan.mode = SplitMode::KFold;
  plan.k = k;
  plan.seed = seed;
  for (std::size_t i = 0; i < n; ++i) plan.assignments.emplace_back(manifest.entries[i].id, fold[i]);
  return plan;
}

std::vector<SplitPlan> split_loso(const Manifest& manifest) {
  std::set<int> subjects;
  for (const auto& e : manifest.entries) subjects.insert(e.subject);
  if (subjects.size() < 2) throw Error(ErrorCode::SingleSubject, "leave-one-subject-out needs two or more subjects");

  std::vector<SplitPlan> plans;
  for (int s : subjects) {
    SplitPlan plan;
    plan.mode = SplitMode::LeaveOneSubjectOut;
    plan.heldout_subject = s;
    for (const auto& e : manifest.entries) plan.assignments.emplace_back(e.id, e.subject);
    plans.push_back(std::move(plan));
  }
  return plans;
}

std::string to_json(const std::vector<SplitPlan>& plans) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& p : plans) {
    nlohmann::ordered_json j;
    if (p.mode == SplitMode::KFold) {
      j["mode"] = "kfold";
      j["k"] = p.k;
      j["seed"] = p.seed;
    } else {
      j["mode"] = "loso";
      j["heldout_subject"] = p.heldout_subject;
    }
    nlohmann::ordered_json a = nlohmann::ordered_json::object();
    for (const auto& [id, f] : p.assignments) a[id] = f;
    j["assignments"] = std::move(a);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::vector<SplitPlan> split_plans_from_json(const std::string& text) {
  std::vector<SplitPlan> plans;
  try {
    const auto arr = nlohmann::ordered_json::parse(text);
    for (const auto& j : arr) {
      SplitPlan p;
      const std::string mode = j.at("mode").get<std::string>();
      if (mode == "kfold") {
        p.mode = SplitMode::KFold;
        p.k = j.at("k").get<int>();
        p.seed = j.at("seed").get<std::uint64_t>();
      } else if (mode == "loso") {
        p.mode = SplitMode::LeaveOneSubjectOut;
        p.heldout_subject = j.at("heldout_subject").get<int>();
      } else {
        throw Error(ErrorCode::SchemaError, "unknown split mode '" + mode + "'");
      }
      for (const auto& [id, f] : j.at("assignments").items()) p.assignments.emplace_back(id, f.get<int>());
      plans.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("split plan: ") + e.what());
  }
  return plans;
}

}  // namespace seqfuse
