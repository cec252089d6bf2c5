#include "seqfuse/metrics.hpp"

#include <algorithm>

#include <Eigen/Core>

namespace seqfuse {

EditStats levenshtein(const Sequence& gt, const Sequence& pred) {
  const auto m = static_cast<Eigen::Index>(gt.size());
  const auto n = static_cast<Eigen::Index>(pred.size());
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> d(m + 1, n + 1);
  for (Eigen::Index i = 0; i <= m; ++i) d(i, 0) = static_cast<int>(i);
  for (Eigen::Index j = 0; j <= n; ++j) d(0, j) = static_cast<int>(j);
  for (Eigen::Index i = 1; i <= m; ++i) {
    for (Eigen::Index j = 1; j <= n; ++j) {
      const int sub = d(i - 1, j - 1) + (gt[static_cast<std::size_t>(i - 1)] == pred[static_cast<std::size_t>(j - 1)] ? 0 : 1);
      d(i, j) = std::min({sub, d(i - 1, j) + 1, d(i, j - 1) + 1});
    }
  }

  EditStats stats;
  stats.reference_length = static_cast<int>(m);
  Eigen::Index i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = gt[static_cast<std::size_t>(i - 1)] == pred[static_cast<std::size_t>(j - 1)];
      if (d(i, j) == d(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++stats.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d(i, j) == d(i - 1, j) + 1) {
      ++stats.deletions;
      --i;
    } else {
      ++stats.insertions;
      --j;
    }
  }
  return stats;
}

double wacc(const Sequence& gt, const Sequence& pred) {
  if (gt.empty()) throw Error(ErrorCode::EmptyReference, "word accuracy needs a non-empty reference");
  const EditStats e = levenshtein(gt, pred);
  return 100.0 - 100.0 * static_cast<double>(e.distance()) / static_cast<double>(e.reference_length);
}

MetricsReport aggregate(std::span<const ReferencePair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "aggregate over zero samples");
  MetricsReport r;
  r.per_sample_wacc.reserve(pairs.size());
  r.lengths.reserve(pairs.size());
  double sum = 0, weighted = 0;
  long total_len = 0;
  std::size_t exact = 0, same_len = 0;
  for (const auto& [gt, pred] : pairs) {
    const double w = wacc(gt, pred);
    const int len = static_cast<int>(gt.size());
    r.per_sample_wacc.push_back(w);
    r.lengths.push_back(len);
    sum += w;
    weighted += w * len;
    total_len += len;
    exact += gt == pred ? 1 : 0;
    same_len += gt.size() == pred.size() ? 1 : 0;
  }
  const auto n = static_cast<double>(pairs.size());
  r.total_wacc = sum / n;
  r.wwacc = weighted / static_cast<double>(total_len);
  r.sacc = 100.0 * static_cast<double>(exact) / n;
  r.slacc = 100.0 * static_cast<double>(same_len) / n;
  return r;
}

}  // namespace seqfuse
