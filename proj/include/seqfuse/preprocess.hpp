#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "seqfuse/types.hpp"

namespace seqfuse {

inline constexpr Eigen::Index kNumFeatures = 17;

// Channel order of a frames file: 5 flex sensors then the IMU triples.
inline constexpr std::array<const char*, kNumFeatures> kChannelNames = {
    "flex1", "flex2",    "flex3",    "flex4",    "flex5",  "acc_x",  "acc_y",  "acc_z", "linacc_x",
    "linacc_y", "linacc_z", "gyro_x", "gyro_y", "gyro_z", "grav_x", "grav_y", "grav_z"};

using FrameMatrix = Eigen::Matrix<double, Eigen::Dynamic, kNumFeatures, Eigen::RowMajor>;
using FeatureRow = Eigen::Array<double, 1, kNumFeatures>;

struct SampleRecord {
  std::string id;
  int subject = 0;
  FrameMatrix frames;
  Sequence label;
};

struct QuartileStats {
  FeatureRow q1;
  FeatureRow q3;

  FeatureRow iqr() const { return q3 - q1; }
  FeatureRow lower() const { return q1 - 1.5 * iqr(); }
  FeatureRow upper() const { return q3 + 1.5 * iqr(); }
};

struct NormalizationStats {
  FeatureRow min;
  FeatureRow max;
};

// Linear interpolation between order statistics of sorted data, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Per-feature quartiles pooled over every frame of every sample.
/// Needs at least four frames in total.
QuartileStats fit_quartiles(std::span<const SampleRecord> samples);

struct OutlierSplit {
  std::vector<SampleRecord> kept;
  std::vector<std::string> rejected;
};

/// Rejects a whole sample when any value lies strictly outside its feature's
/// [lower, upper] fence.
OutlierSplit reject_outliers(std::span<const SampleRecord> samples, const QuartileStats& stats);

NormalizationStats fit_normalizer(std::span<const SampleRecord> train);

/// Min-max scaling with training statistics, no clipping. A constant feature
/// (min == max) maps to 0.
SampleRecord apply_normalizer(const SampleRecord& sample, const NormalizationStats& stats);

// JSON sidecar with both stat blocks plus the ids dropped as outliers.
struct PreprocessStats {
  QuartileStats quartiles;
  NormalizationStats normalizer;
  std::vector<std::string> rejected;
};

std::string to_json(const PreprocessStats& stats);
PreprocessStats preprocess_stats_from_json(const std::string& text);

}  // namespace seqfuse
