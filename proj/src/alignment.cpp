#include "seqfuse/alignment.hpp"

#include <algorithm>
#include <numeric>

namespace seqfuse {

AlignmentTable fill_table(const Sequence& a, const Sequence& b, const ScoringScheme& scheme) {
  const Eigen::Index m = static_cast<Eigen::Index>(a.size());
  const Eigen::Index n = static_cast<Eigen::Index>(b.size());
  AlignmentTable t;
  t.cells.resize(m + 1, n + 1);
  t.moves.resize(m + 1, n + 1);

  t.cells(0, 0) = 0;
  t.moves(0, 0) = static_cast<std::uint8_t>(Move::None);
  for (Eigen::Index i = 1; i <= m; ++i) {
    t.cells(i, 0) = static_cast<int>(i) * scheme.gap;
    t.moves(i, 0) = static_cast<std::uint8_t>(Move::Up);
  }
  for (Eigen::Index j = 1; j <= n; ++j) {
    t.cells(0, j) = static_cast<int>(j) * scheme.gap;
    t.moves(0, j) = static_cast<std::uint8_t>(Move::Left);
  }

  for (Eigen::Index i = 1; i <= m; ++i) {
    const Token ai = a[static_cast<std::size_t>(i - 1)];
    for (Eigen::Index j = 1; j <= n; ++j) {
      const int diag = t.cells(i - 1, j - 1) + scheme.substitution(ai, b[static_cast<std::size_t>(j - 1)]);
      const int up = t.cells(i - 1, j) + scheme.gap;
      const int left = t.cells(i, j - 1) + scheme.gap;
      int best = diag;
      Move mv = Move::Diag;
      if (up > best) {
        best = up;
        mv = Move::Up;
      }
      if (left > best) {
        best = left;
        mv = Move::Left;
      }
      t.cells(i, j) = best;
      t.moves(i, j) = static_cast<std::uint8_t>(mv);
    }
  }
  return t;
}

PairwiseResult nw_align(const Sequence& a, const Sequence& b, const ScoringScheme& scheme) {
  const AlignmentTable t = fill_table(a, b, scheme);
  Eigen::Index i = static_cast<Eigen::Index>(a.size());
  Eigen::Index j = static_cast<Eigen::Index>(b.size());

  std::vector<Token> ra, rb;
  ra.reserve(a.size() + b.size());
  rb.reserve(a.size() + b.size());
  while (i > 0 || j > 0) {
    switch (t.move(i, j)) {
      case Move::Diag:
        ra.push_back(a[static_cast<std::size_t>(--i)]);
        rb.push_back(b[static_cast<std::size_t>(--j)]);
        break;
      case Move::Up:
        ra.push_back(a[static_cast<std::size_t>(--i)]);
        rb.push_back(kGap);
        break;
      case Move::Left:
      case Move::None:
        ra.push_back(kGap);
        rb.push_back(b[static_cast<std::size_t>(--j)]);
        break;
    }
  }
  std::reverse(ra.begin(), ra.end());
  std::reverse(rb.begin(), rb.end());
  return {AlignedSequence(std::move(ra)), AlignedSequence(std::move(rb)),
          t.cells(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()))};
}

int alignment_score(const AlignedSequence& a, const AlignedSequence& b, const ScoringScheme& scheme) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "aligned rows differ in length");
  int score = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (a[c] == kGap && b[c] == kGap) continue;
    score += (a[c] == kGap || b[c] == kGap) ? scheme.gap : scheme.substitution(a[c], b[c]);
  }
  return score;
}

int SimilarityMatrix::center_sum(std::size_t j) const {
  const auto row = static_cast<Eigen::Index>(j);
  return scores.row(row).sum() - scores(row, row);
}

SimilarityMatrix similarity_matrix(std::span<const Sequence> seqs, const ScoringScheme& scheme) {
  const std::size_t k = seqs.size();
  SimilarityMatrix sim;
  sim.scores = ScoreMatrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  sim.pairs.assign(k, std::vector<PairwiseResult>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      // both orientations
      sim.pairs[i][j] = nw_align(seqs[i], seqs[j], scheme);
      sim.pairs[j][i] = nw_align(seqs[j], seqs[i], scheme);
      sim.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sim.pairs[i][j].score;
      sim.scores(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = sim.pairs[j][i].score;
    }
  }
  return sim;
}

namespace {

// Threads the pairwise alignment (center_row, new_row) into the current
// profile. rows[center] is the gapped center; rows of sequences not yet merged
// are empty and stay empty.
void merge_into_profile(std::vector<std::vector<Token>>& rows, std::vector<bool>& merged, std::size_t center,
                        std::size_t incoming, const AlignedSequence& center_row, const AlignedSequence& new_row) {
  const std::vector<Token> profile_center = rows[center];
  std::vector<std::vector<Token>> out(rows.size());
  const std::size_t width = profile_center.size() + new_row.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (merged[r]) out[r].reserve(width);
  }
  out[incoming].reserve(width);

  auto emit = [&](std::size_t p, bool from_profile, Token incoming_token) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (merged[r]) out[r].push_back(from_profile ? rows[r][p] : kGap);
    }
    out[incoming].push_back(incoming_token);
  };

  std::size_t p = 0, q = 0;
  while (p < profile_center.size() || q < center_row.size()) {
    const bool profile_gap = p < profile_center.size() && profile_center[p] == kGap;
    const bool pair_gap = q < center_row.size() && center_row[q] == kGap;
    if (profile_gap && pair_gap) {
      emit(p++, true, new_row[q++]);
    } else if (profile_gap || q == center_row.size()) {
      emit(p++, true, kGap);
    } else if (pair_gap || p == profile_center.size()) {
      emit(0, false, new_row[q++]);
    } else {
      emit(p++, true, new_row[q++]);
    }
  }
  merged[incoming] = true;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (merged[r]) rows[r] = std::move(out[r]);
  }
}

}  // namespace

StarResult star_align(std::span<const Sequence> seqs, const ScoringScheme& scheme) {
  const std::size_t k = seqs.size();
  if (k == 0) throw Error(ErrorCode::EmptyInput, "star_align needs at least one sequence");

  const SimilarityMatrix sim = similarity_matrix(seqs, scheme);

  std::size_t center = 0;
  int best = sim.center_sum(0);
  for (std::size_t j = 1; j < k; ++j) {
    const int s = sim.center_sum(j);
    if (s > best) {
      best = s;
      center = j;
    }
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < k; ++i) {
    if (i != center) order.push_back(i);
  }
  const auto c = static_cast<Eigen::Index>(center);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return sim.scores(c, static_cast<Eigen::Index>(x)) > sim.scores(c, static_cast<Eigen::Index>(y));
  });

  std::vector<std::vector<Token>> rows(k);
  std::vector<bool> merged(k, false);
  rows[center].assign(seqs[center].begin(), seqs[center].end());
  merged[center] = true;
  for (std::size_t i : order) {
    const PairwiseResult& pr = sim.pairs[center][i];
    merge_into_profile(rows, merged, center, i, pr.aligned_a, pr.aligned_b);
  }

  StarResult result;
  result.center_index = center;
  result.total_score = best;
  result.merge_order = std::move(order);
  result.aligned.reserve(k);
  for (auto& r : rows) result.aligned.emplace_back(std::move(r));
  return result;
}

}  // namespace seqfuse
