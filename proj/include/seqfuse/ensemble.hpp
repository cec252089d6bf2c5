#pragma once

#include <span>
#include <utility>
#include <vector>

#include "seqfuse/alignment.hpp"
#include "seqfuse/types.hpp"

namespace seqfuse {

enum class GapPolicy {
  Participate,  // GAP is a candidate; a winning GAP drops the column
  Exclude,      // GAP only wins when the column has no token at all
};

// Ties go to the candidate whose earliest voter has the lowest model index.
enum class TiePolicy { LowestModelIndex };

struct VoteConfig {
  ScoringScheme scheme{};  // match 0, mismatch -1, gap -1
  GapPolicy gap_policy = GapPolicy::Participate;
  TiePolicy tie_policy = TiePolicy::LowestModelIndex;
};

struct ColumnTally {
  // (candidate, votes) in order of first appearance by model index.
  std::vector<std::pair<Token, int>> counts;
  Token winner = kGap;
};

struct EnsembleTrace {
  std::vector<Sequence> inputs;
  StarResult aligned;
  std::vector<ColumnTally> columns;
  Sequence output;
};

/// Plurality vote over one alignment column; entry i is model i's symbol.
Token vote_column(std::span<const Token> column, const VoteConfig& config = {});

ColumnTally tally_column(std::span<const Token> column, const VoteConfig& config = {});

/// Aligns the k predictions with star_align and votes column by column.
EnsembleTrace ensemble(std::span<const Sequence> preds, const VoteConfig& config = {});

}  // namespace seqfuse
