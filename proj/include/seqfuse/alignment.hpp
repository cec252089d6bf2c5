#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "seqfuse/types.hpp"

namespace seqfuse {

// Backtrack direction stored per DP cell.
enum class Move : std::uint8_t { None = 0, Diag, Up, Left };

using ScoreMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
// Holds Move values; Eigen wants an arithmetic scalar.
using MoveMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Needleman-Wunsch table for sequences of length m and n: (m+1) x (n+1) cells.
// Row i consumes a[i-1], column j consumes b[j-1]. "Up" puts a gap in b,
// "Left" puts a gap in a.
struct AlignmentTable {
  ScoreMatrix cells;
  MoveMatrix moves;

  Move move(Eigen::Index i, Eigen::Index j) const { return static_cast<Move>(moves(i, j)); }
};

/// Fills the global-alignment DP table. Border cells hold multiples of the gap
/// score; ties between predecessors resolve Diag, then Up, then Left.
AlignmentTable fill_table(const Sequence& a, const Sequence& b, const ScoringScheme& scheme);

struct PairwiseResult {
  AlignedSequence aligned_a;
  AlignedSequence aligned_b;
  int score = 0;
};

/// Optimal global alignment of `a` against `b` with deterministic backtracking.
PairwiseResult nw_align(const Sequence& a, const Sequence& b, const ScoringScheme& scheme);

/// Score of an explicit alignment, summed column by column.
int alignment_score(const AlignedSequence& a, const AlignedSequence& b, const ScoringScheme& scheme);

// Pairwise scores among k sequences plus the alignments needed for merging.
struct SimilarityMatrix {
  ScoreMatrix scores;  // symmetric, diagonal left at zero
  // pairs[i][j]: alignment of sequence i (first row) against sequence j.
  std::vector<std::vector<PairwiseResult>> pairs;

  // Row sum excluding the self pair.
  int center_sum(std::size_t j) const;
};

SimilarityMatrix similarity_matrix(std::span<const Sequence> seqs, const ScoringScheme& scheme);

struct StarResult {
  std::vector<AlignedSequence> aligned;  // in input order
  std::size_t center_index = 0;
  int total_score = 0;                   // sum of center-to-other pairwise scores
  std::vector<std::size_t> merge_order;  // non-center indices in merge order
  std::size_t width() const { return aligned.empty() ? 0 : aligned.front().size(); }
};

/// Center-star multiple alignment.
///
/// The center maximises the sum of pairwise scores to all other sequences
/// (lowest index wins ties). Remaining sequences are merged in descending
/// order of their score against the center, ties by index. Each merge threads
/// the cached pairwise alignment against the original center through the
/// current gapped center: gaps already present in the profile are reused
/// before new all-gap columns are opened, so every row keeps its insertions
/// left-justified within a center slot.
StarResult star_align(std::span<const Sequence> seqs, const ScoringScheme& scheme);

}  // namespace seqfuse
