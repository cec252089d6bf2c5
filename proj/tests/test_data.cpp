#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "seqfuse/data.hpp"

using namespace seqfuse;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("seqfuse_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  void write(const std::string& rel, const std::string& text) const {
    fs::create_directories((path / rel).parent_path());
    std::ofstream(path / rel, std::ios::binary) << text;
  }
};

std::string csv_of(Eigen::Index frames, double base) {
  FrameMatrix m(frames, kNumFeatures);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (Eigen::Index f = 0; f < kNumFeatures; ++f) m(t, f) = base + static_cast<double>(t) + 0.01 * static_cast<double>(f);
  return frames_to_csv(m);
}

Manifest synthetic(std::size_t n, int subjects = 1) {
  Manifest m;
  for (std::size_t i = 0; i < n; ++i) {
    m.entries.push_back({"s" + std::to_string(i), 1 + static_cast<int>(i % static_cast<std::size_t>(subjects)), "",
                         {"Father"}});
  }
  return m;
}

}  // namespace

TEST_CASE("load_manifest reads labels and frames") {
  TempDir dir("load");
  dir.write("frames/a.csv", csv_of(4, 0));
  dir.write("frames/b.csv", csv_of(2, 10));
  dir.write("frames/c.csv", csv_of(3, 20));
  dir.write("manifest.jsonl",
            "{\"id\": \"a\", \"subject\": 1, \"frames\": \"frames/a.csv\", \"label\": [\"Father\", \"Luck\"]}\n"
            "{\"id\": \"b\", \"subject\": 2, \"frames\": \"frames/b.csv\", \"label\": \"Father Luck\"}\n"
            "\n"
            "{\"id\": \"c\", \"subject\": 2, \"frames\": \"frames/c.csv\", \"label\": [\"Green\"]}\n");
  const auto alphabet = GlossAlphabet::standard();
  const auto ds = load_manifest(dir.path / "manifest.jsonl", alphabet);
  REQUIRE(ds.samples.size() == 3);
  CHECK(ds.manifest.tag == DatasetTag::Short);
  CHECK(ds.samples[0].frames.rows() == 4);
  CHECK(ds.samples[1].frames(1, 16) == doctest::Approx(11.16));
  CHECK(ds.samples[1].label.size() == 2);
  CHECK(ds.samples[0].label == ds.samples[1].label);
  CHECK(ds.samples[2].subject == 2);
  CHECK(decode(ds.samples[2].label, alphabet) == std::vector<std::string>{"Green"});
}

TEST_CASE("load_manifest input errors") {
  TempDir dir("errors");
  const auto alphabet = GlossAlphabet::standard();
  auto code_of = [&](const std::string& manifest) {
    dir.write("manifest.jsonl", manifest);
    try {
      load_manifest(dir.path / "manifest.jsonl", alphabet);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;  // no error
  };

  std::string sixteen = "flex1";
  for (int i = 2; i <= 16; ++i) sixteen += ",c" + std::to_string(i);
  sixteen += "\n";
  for (int i = 1; i <= 16; ++i) sixteen += i == 1 ? "0" : ",0";
  dir.write("short.csv", sixteen + "\n");
  dir.write("good.csv", csv_of(2, 0));
  dir.write("bad_number.csv", csv_of(1, 0) + "1,2,x,4,5,6,7,8,9,10,11,12,13,14,15,16,17\n");

  CHECK(code_of(R"({"id": "a", "subject": 1, "frames": "short.csv", "label": ["Father"]})") == ErrorCode::SchemaError);
  CHECK(code_of(R"({"id": "a", "subject": 1, "frames": "bad_number.csv", "label": ["Father"]})") == ErrorCode::ParseError);
  CHECK(code_of(R"({"id": "a", "subject": 1, "frames": "good.csv", "label": ["Dog"]})") == ErrorCode::UnknownGloss);
  CHECK(code_of(R"({"id": "a", "subject": 1, "label": ["Father"]})") == ErrorCode::SchemaError);
  CHECK(code_of(R"({"id": "a", "subject": 1})") == ErrorCode::SchemaError);
  CHECK(code_of("{not json") == ErrorCode::ParseError);
  CHECK(code_of(R"({"id": "a", "subject": 1, "frames": "good.csv", "label": ["Father"]})"
                "\n"
                R"({"id": "a", "subject": 2, "frames": "good.csv", "label": ["Luck"]})") == ErrorCode::SchemaError);
}

TEST_CASE("manifest text round trip and tag inference") {
  const std::string text =
      "{\"id\":\"x\",\"subject\":3,\"frames\":\"f/x.csv\",\"label\":[\"Year\",\"is\",\"Very\",\"Good\"]}\n"
      "{\"id\":\"y\",\"subject\":4,\"label\":[\"Blue\",\"Green\",\"Day\",\"Summer\",\"Good\"]}\n";
  const auto m = parse_manifest(text);
  CHECK(m.tag == DatasetTag::Long);
  CHECK(manifest_to_jsonl(m) == text);
  CHECK(m.entries[1].frames.empty());

  Manifest mixed = synthetic(2);
  mixed.entries[1].label = {"A", "B", "C", "D"};
  CHECK(infer_tag(mixed.entries) == DatasetTag::Mixed);
}

TEST_CASE("frames_from_table reorders columns by channel name") {
  std::vector<std::string> header{"timestamp"};
  for (auto it = kChannelNames.rbegin(); it != kChannelNames.rend(); ++it) header.emplace_back(*it);
  std::vector<double> row{99.0};
  for (int f = kNumFeatures - 1; f >= 0; --f) row.push_back(f);
  const auto frames = frames_from_table(header, {row});
  for (Eigen::Index f = 0; f < kNumFeatures; ++f) CHECK(frames(0, f) == static_cast<double>(f));

  header.pop_back();
  row.pop_back();
  CHECK_THROWS_AS(frames_from_table(header, {row}), Error);
}

TEST_CASE("frames CSV round trip is exact") {
  TempDir dir("csv");
  FrameMatrix m(3, kNumFeatures);
  m.setRandom();
  m(0, 0) = 0.1 + 0.2;
  dir.write("f.csv", frames_to_csv(m));
  CHECK(read_frames_csv(dir.path / "f.csv") == m);
}

TEST_CASE("split_kfold sizes, partition and determinism") {
  auto sizes = [](const SplitPlan& p) {
    std::vector<std::size_t> s;
    for (int f = 0; f < p.k; ++f) s.push_back(p.fold_ids(f).size());
    return s;
  };
  const auto p100 = split_kfold(synthetic(100), 5, 42);
  CHECK(sizes(p100) == std::vector<std::size_t>(5, 20));
  const auto p101 = split_kfold(synthetic(101), 5, 42);
  CHECK(sizes(p101) == std::vector<std::size_t>{21, 20, 20, 20, 20});

  // disjoint, exhaustive
  std::multiset<std::string> seen;
  for (int f = 0; f < 5; ++f)
    for (const auto& id : p101.fold_ids(f)) seen.insert(id);
  CHECK(seen.size() == 101);
  CHECK(std::set<std::string>(seen.begin(), seen.end()).size() == 101);

  CHECK(split_kfold(synthetic(101), 5, 42).assignments == p101.assignments);
  CHECK(split_kfold(synthetic(101), 5, 43).assignments != p101.assignments);
  CHECK(p100.train_ids().size() + p100.test_ids().size() == 100);

  try {
    split_kfold(synthetic(10), 1, 0);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  try {
    split_kfold(synthetic(3), 5, 0);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
}

TEST_CASE("split_loso") {
  const auto m = synthetic(23, 5);
  const auto plans = split_loso(m);
  REQUIRE(plans.size() == 5);
  std::map<std::string, int> subject_of;
  for (const auto& e : m.entries) subject_of[e.id] = e.subject;
  std::set<std::string> union_test;
  for (const auto& p : plans) {
    for (const auto& id : p.test_ids()) {
      CHECK(subject_of[id] == p.heldout_subject);
      union_test.insert(id);
    }
    for (const auto& id : p.train_ids()) CHECK(subject_of[id] != p.heldout_subject);
    CHECK(p.test_ids().size() + p.train_ids().size() == m.entries.size());
  }
  CHECK(union_test.size() == m.entries.size());

  try {
    split_loso(synthetic(10, 1));
    FAIL("expected SingleSubject");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingleSubject);
  }
}

TEST_CASE("split plans JSON round trip") {
  auto plans = split_loso(synthetic(12, 3));
  plans.push_back(split_kfold(synthetic(12), 4, 7));
  const auto back = split_plans_from_json(to_json(plans));
  REQUIRE(back.size() == plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    CHECK(back[i].mode == plans[i].mode);
    CHECK(back[i].k == plans[i].k);
    CHECK(back[i].heldout_subject == plans[i].heldout_subject);
    CHECK(back[i].seed == plans[i].seed);
    CHECK(back[i].assignments == plans[i].assignments);
  }
  CHECK(to_json(back) == to_json(plans));
  CHECK_THROWS_AS(split_plans_from_json("[{\"mode\": \"bogus\", \"assignments\": {}}]"), Error);
}
