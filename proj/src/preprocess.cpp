#include "seqfuse/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace seqfuse {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::InsufficientData, "quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

QuartileStats fit_quartiles(std::span<const SampleRecord> samples) {
  Eigen::Index total = 0;
  for (const auto& s : samples) total += s.frames.rows();
  if (total < 4) {
    throw Error(ErrorCode::InsufficientData, "quartiles need at least 4 frames, got " + std::to_string(total));
  }

  QuartileStats stats;
  std::vector<double> column(static_cast<std::size_t>(total));
  for (Eigen::Index f = 0; f < kNumFeatures; ++f) {
    std::size_t pos = 0;
    for (const auto& s : samples) {
      for (Eigen::Index t = 0; t < s.frames.rows(); ++t) column[pos++] = s.frames(t, f);
    }
    std::sort(column.begin(), column.end());
    stats.q1(f) = quantile_sorted(column, 0.25);
    stats.q3(f) = quantile_sorted(column, 0.75);
  }
  return stats;
}

OutlierSplit reject_outliers(std::span<const SampleRecord> samples, const QuartileStats& stats) {
  const FeatureRow lower = stats.lower();
  const FeatureRow upper = stats.upper();
  OutlierSplit split;
  for (const auto& s : samples) {
    bool outlier = false;
    for (Eigen::Index t = 0; t < s.frames.rows() && !outlier; ++t) {
      const FeatureRow row = s.frames.row(t).array();
      outlier = (row < lower).any() || (row > upper).any();
    }
    if (outlier) {
      split.rejected.push_back(s.id);
    } else {
      split.kept.push_back(s);
    }
  }
  return split;
}

NormalizationStats fit_normalizer(std::span<const SampleRecord> train) {
  NormalizationStats stats;
  stats.min.setConstant(std::numeric_limits<double>::infinity());
  stats.max.setConstant(-std::numeric_limits<double>::infinity());
  Eigen::Index frames = 0;
  for (const auto& s : train) {
    if (s.frames.rows() == 0) continue;
    stats.min = stats.min.min(s.frames.colwise().minCoeff().array());
    stats.max = stats.max.max(s.frames.colwise().maxCoeff().array());
    frames += s.frames.rows();
  }
  if (frames == 0) throw Error(ErrorCode::InsufficientData, "normalizer needs at least one training frame");
  return stats;
}

SampleRecord apply_normalizer(const SampleRecord& sample, const NormalizationStats& stats) {
  SampleRecord out = sample;
  const FeatureRow range = stats.max - stats.min;
  for (Eigen::Index f = 0; f < kNumFeatures; ++f) {
    if (range(f) == 0.0) {
      out.frames.col(f).setZero();
    } else {
      out.frames.col(f) = (sample.frames.col(f).array() - stats.min(f)) / range(f);
    }
  }
  return out;
}

namespace {

nlohmann::json row_json(const FeatureRow& row) {
  return std::vector<double>(row.data(), row.data() + kNumFeatures);
}

FeatureRow row_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != static_cast<std::size_t>(kNumFeatures)) {
    throw Error(ErrorCode::SchemaError, std::string("stats field '") + key + "' must hold 17 numbers");
  }
  FeatureRow row;
  for (Eigen::Index f = 0; f < kNumFeatures; ++f) row(f) = j.at(key).at(static_cast<std::size_t>(f)).get<double>();
  return row;
}

}  // namespace

std::string to_json(const PreprocessStats& stats) {
  nlohmann::json j;
  j["channels"] = std::vector<std::string>(kChannelNames.begin(), kChannelNames.end());
  j["q1"] = row_json(stats.quartiles.q1);
  j["q3"] = row_json(stats.quartiles.q3);
  j["lower"] = row_json(stats.quartiles.lower());
  j["upper"] = row_json(stats.quartiles.upper());
  j["min"] = row_json(stats.normalizer.min);
  j["max"] = row_json(stats.normalizer.max);
  j["rejected"] = stats.rejected;
  return j.dump(2);
}

PreprocessStats preprocess_stats_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("stats sidecar: ") + e.what());
  }
  PreprocessStats stats;
  stats.quartiles.q1 = row_from_json(j, "q1");
  stats.quartiles.q3 = row_from_json(j, "q3");
  stats.normalizer.min = row_from_json(j, "min");
  stats.normalizer.max = row_from_json(j, "max");
  if (j.contains("rejected")) stats.rejected = j.at("rejected").get<std::vector<std::string>>();
  return stats;
}

}  // namespace seqfuse
