#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seqfuse/preprocess.hpp"
#include "seqfuse/types.hpp"

namespace seqfuse {

enum class DatasetTag {
  Short,  // every label has 1..3 glosses
  Long,   // every label has 4..8 glosses
  Mixed,  // anything else, e.g. simulated sentences of 1..8 glosses
};

const char* to_string(DatasetTag tag);

struct ManifestEntry {
  std::string id;
  int subject = 0;
  std::string frames;  // relative to the manifest directory; empty if absent
  std::vector<std::string> label;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  DatasetTag tag = DatasetTag::Mixed;
  std::filesystem::path base_dir;

  std::filesystem::path frames_path(const ManifestEntry& e) const { return base_dir / e.frames; }
};

DatasetTag infer_tag(const std::vector<ManifestEntry>& entries);

/// Parses a JSON Lines manifest. Does not touch the frames files.
/// "label" may be an array of glosses or one whitespace-separated string.
Manifest read_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const std::string& text, const std::string& source = "<manifest>");

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
std::string manifest_to_jsonl(const Manifest& manifest);

struct LoadedDataset {
  Manifest manifest;
  std::vector<SampleRecord> samples;  // manifest order
};

/// Reads the manifest and every frames file it names; labels are encoded.
LoadedDataset load_manifest(const std::filesystem::path& path, const GlossAlphabet& alphabet);

/// Reorders a parsed table into canonical channel order by header name.
/// Columns not named in kChannelNames (timestamps, indices) are ignored.
FrameMatrix frames_from_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                              const std::string& source = "<table>");

FrameMatrix read_frames_csv(const std::filesystem::path& path);
std::string frames_to_csv(const FrameMatrix& frames);

enum class SplitMode { KFold, LeaveOneSubjectOut };

struct SplitPlan {
  SplitMode mode = SplitMode::KFold;
  int k = 0;                // folds, kfold only
  int heldout_subject = 0;  // LOSO only
  std::uint64_t seed = 0;
  // (sample id, fold index) for kfold, (sample id, subject) for LOSO; manifest order.
  std::vector<std::pair<std::string, int>> assignments;

  std::vector<std::string> fold_ids(int fold) const;
  std::vector<std::string> test_ids() const;   // LOSO: held-out subject's ids
  std::vector<std::string> train_ids() const;  // LOSO: everyone else
};

SplitPlan split_kfold(const Manifest& manifest, int k, std::uint64_t seed);
std::vector<SplitPlan> split_loso(const Manifest& manifest);

std::string to_json(const std::vector<SplitPlan>& plans);
std::vector<SplitPlan> split_plans_from_json(const std::string& text);

}  // namespace seqfuse
