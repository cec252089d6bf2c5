#include "seqfuse/ensemble.hpp"

#include <algorithm>

namespace seqfuse {

ColumnTally tally_column(std::span<const Token> column, const VoteConfig& config) {
  if (column.empty()) throw Error(ErrorCode::EmptyInput, "vote over an empty column");

  ColumnTally tally;
  for (Token t : column) {
    auto it = std::find_if(tally.counts.begin(), tally.counts.end(), [t](const auto& c) { return c.first == t; });
    if (it == tally.counts.end()) {
      tally.counts.emplace_back(t, 1);
    } else {
      ++it->second;
    }
  }

  // counts is ordered by first voter, so the first maximum is the
  // lowest-model-index winner among tied candidates.
  int best = 0;
  for (const auto& [token, votes] : tally.counts) {
    if (config.gap_policy == GapPolicy::Exclude && token == kGap) continue;
    if (votes > best) {
      best = votes;
      tally.winner = token;
    }
  }
  return tally;
}

Token vote_column(std::span<const Token> column, const VoteConfig& config) {
  return tally_column(column, config).winner;
}

EnsembleTrace ensemble(std::span<const Sequence> preds, const VoteConfig& config) {
  if (preds.empty()) throw Error(ErrorCode::EmptyInput, "ensemble needs at least one prediction");

  EnsembleTrace trace;
  trace.inputs.assign(preds.begin(), preds.end());
  trace.aligned = star_align(preds, config.scheme);

  const std::size_t width = trace.aligned.width();
  std::vector<Token> column(preds.size());
  trace.columns.reserve(width);
  for (std::size_t c = 0; c < width; ++c) {
    for (std::size_t m = 0; m < preds.size(); ++m) column[m] = trace.aligned.aligned[m][c];
    ColumnTally tally = tally_column(column, config);
    if (tally.winner != kGap) trace.output.push_back(tally.winner);
    trace.columns.push_back(std::move(tally));
  }
  return trace;
}

}  // namespace seqfuse
