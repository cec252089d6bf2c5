#pragma once

#include <span>
#include <utility>
#include <vector>

#include "seqfuse/types.hpp"

namespace seqfuse {

struct EditStats {
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;
  int reference_length = 0;

  int distance() const noexcept { return substitutions + deletions + insertions; }
  friend bool operator==(const EditStats&, const EditStats&) = default;
};

/// Levenshtein distance from `gt` to `pred` with an S/D/I breakdown taken from
/// one canonical backtrack (substitution, then deletion, then insertion).
EditStats levenshtein(const Sequence& gt, const Sequence& pred);

/// 100 - WER. Unclamped: more edits than reference tokens go negative.
double wacc(const Sequence& gt, const Sequence& pred);

struct MetricsReport {
  std::vector<double> per_sample_wacc;
  std::vector<int> lengths;
  double total_wacc = 0;  // plain mean of per-sample WAcc
  double wwacc = 0;       // mean weighted by reference length
  double sacc = 0;        // % exact matches
  double slacc = 0;       // % length matches
  std::size_t count() const noexcept { return per_sample_wacc.size(); }
};

using ReferencePair = std::pair<Sequence, Sequence>;  // (ground truth, prediction)

MetricsReport aggregate(std::span<const ReferencePair> pairs);

}  // namespace seqfuse
