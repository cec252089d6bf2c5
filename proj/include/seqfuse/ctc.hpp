#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "seqfuse/types.hpp"

namespace seqfuse {

// T frames x (N glosses + 1) classes; the last column is BLANK.
template <typename Scalar>
using FrameScores = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ScoreKind { Probabilities, LogProbabilities };

/// Merges adjacent repeats, then drops blanks.
inline Sequence collapse(std::span<const Token> path, Token blank) {
  Sequence out;
  Token prev = kGap;
  for (Token t : path) {
    if (t != prev && t != blank) out.push_back(t);
    prev = t;
  }
  return out;
}

/// Throws unless `scores` has at least one frame and, for probabilities,
/// every row is non-negative and sums to 1 within 1e-6.
template <typename Derived>
void validate_frame_scores(const Eigen::MatrixBase<Derived>& scores, ScoreKind kind) {
  if (scores.rows() < 1) throw Error(ErrorCode::InvalidArgument, "frame scores need at least one frame");
  if (scores.cols() < 1) throw Error(ErrorCode::InvalidArgument, "frame scores need at least one class");
  if (kind != ScoreKind::Probabilities) return;
  for (Eigen::Index t = 0; t < scores.rows(); ++t) {
    const double sum = static_cast<double>(scores.row(t).sum());
    if (std::abs(sum - 1.0) > 1e-6 || static_cast<double>(scores.row(t).minCoeff()) < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "frame " + std::to_string(t) + " is not a probability row");
    }
  }
}

/// Per-frame argmax; ties go to the lowest class id.
template <typename Derived>
std::vector<Token> greedy_path(const Eigen::MatrixBase<Derived>& scores) {
  std::vector<Token> path(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index t = 0; t < scores.rows(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(t, c) > scores(t, best)) best = c;
    }
    path[static_cast<std::size_t>(t)] = static_cast<Token>(best);
  }
  return path;
}

/// Best-path decoding. Works for probabilities and log-probabilities alike.
template <typename Derived>
Sequence greedy_decode(const Eigen::MatrixBase<Derived>& scores) {
  if (scores.rows() < 1 || scores.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, "frame scores need at least one frame and one class");
  }
  const auto path = greedy_path(scores);
  return collapse(path, static_cast<Token>(scores.cols() - 1));
}

template <typename Scalar>
struct CtcLoss {
  Scalar value = 0;         // -log P(target | frames), +inf when infeasible
  bool infeasible = false;  // no path with non-zero probability collapses to target
};

namespace detail {

template <typename Scalar>
Scalar log_add(Scalar a, Scalar b) {
  constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace detail

/// Negative log-likelihood of `target` under CTC, by the alpha recursion over
/// the blank-interleaved target, in log space.
template <typename Derived>
CtcLoss<typename Derived::Scalar> ctc_forward_loss(const Eigen::MatrixBase<Derived>& scores, const Sequence& target,
                                                   ScoreKind kind = ScoreKind::Probabilities) {
  using Scalar = typename Derived::Scalar;
  constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
  validate_frame_scores(scores, kind);

  const Token blank = static_cast<Token>(scores.cols() - 1);
  for (Token t : target) {
    if (t < 0 || t >= blank) throw Error(ErrorCode::InvalidTokenId, "target token " + std::to_string(t));
  }

  auto log_score = [&](Eigen::Index t, Token c) -> Scalar {
    const Scalar v = scores(t, static_cast<Eigen::Index>(c));
    if (kind == ScoreKind::LogProbabilities) return v;
    return v > Scalar(0) ? std::log(v) : kNegInf;
  };

  // Extended label: blank, l1, blank, l2, ..., blank.
  std::vector<Token> ext(2 * target.size() + 1, blank);
  for (std::size_t u = 0; u < target.size(); ++u) ext[2 * u + 1] = target[u];
  const auto states = static_cast<Eigen::Index>(ext.size());

  Eigen::Array<Scalar, Eigen::Dynamic, 1> alpha = Eigen::Array<Scalar, Eigen::Dynamic, 1>::Constant(states, kNegInf);
  Eigen::Array<Scalar, Eigen::Dynamic, 1> next(states);
  alpha(0) = log_score(0, ext[0]);
  if (states > 1) alpha(1) = log_score(0, ext[1]);

  for (Eigen::Index t = 1; t < scores.rows(); ++t) {
    for (Eigen::Index s = 0; s < states; ++s) {
      Scalar acc = alpha(s);
      if (s >= 1) acc = detail::log_add(acc, alpha(s - 1));
      const auto su = static_cast<std::size_t>(s);
      if (s >= 2 && ext[su] != blank && ext[su] != ext[su - 2]) acc = detail::log_add(acc, alpha(s - 2));
      next(s) = acc == kNegInf ? kNegInf : acc + log_score(t, ext[su]);
    }
    alpha.swap(next);
  }

  Scalar log_total = alpha(states - 1);
  if (states > 1) log_total = detail::log_add(log_total, alpha(states - 2));

  if (log_total == kNegInf) return {std::numeric_limits<Scalar>::infinity(), true};
  return {std::max(Scalar(0), -log_total), false};
}

}  // namespace seqfuse
