#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "seqfuse/alignment.hpp"

using namespace seqfuse;
using oracle::row;
using oracle::seq;
using oracle::str;

namespace {

const ScoringScheme kFiveScheme{3, -1, -2};
const std::vector<Sequence> kFiveInputs{seq("ABCFB"), seq("ABCBBC"), seq("ACFBC"), seq("BCFCC"), seq("ABEFBBC")};

}  // namespace

TEST_CASE("nw_align: identical sequences") {
  const auto r = nw_align(seq("AB"), seq("AB"), ScoringScheme{0, -1, -1});
  CHECK(r.score == 0);
  CHECK(str(r.aligned_a.tokens()) == "AB");
  CHECK(str(r.aligned_b.tokens()) == "AB");
}

TEST_CASE("nw_align: empty side is all gaps") {
  const auto r = nw_align(seq("ABC"), seq(""), kFiveScheme);
  CHECK(r.score == -6);
  CHECK(str(r.aligned_a.tokens()) == "ABC");
  CHECK(str(r.aligned_b.tokens()) == "---");
  const auto e = nw_align(seq(""), seq(""), kFiveScheme);
  CHECK(e.score == 0);
  CHECK(e.aligned_a.empty());
}

TEST_CASE("nw_align: first pair of the five-sequence example") {
  // 9 is the enumerated optimum over all global alignments of the pair.
  CHECK(oracle::best_alignment_score(seq("ABCFB"), seq("ABCBBC"), kFiveScheme) == 9);
  const auto r = nw_align(seq("ABCFB"), seq("ABCBBC"), kFiveScheme);
  CHECK(r.score == 9);
  CHECK(str(r.aligned_a.tokens()) == "ABCFB-");
  CHECK(str(r.aligned_b.tokens()) == "ABCBBC");
}

TEST_CASE("alignment table borders and recurrence") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Sequence a = oracle::random_sequence(rng, 7, 4);
    const Sequence b = oracle::random_sequence(rng, 7, 4);
    const ScoringScheme s{static_cast<int>(rng() % 4), -static_cast<int>(rng() % 3), -1 - static_cast<int>(rng() % 3)};
    const AlignmentTable t = fill_table(a, b, s);
    REQUIRE(t.cells.rows() == static_cast<Eigen::Index>(a.size() + 1));
    REQUIRE(t.cells.cols() == static_cast<Eigen::Index>(b.size() + 1));
    for (Eigen::Index i = 0; i < t.cells.rows(); ++i) CHECK(t.cells(i, 0) == i * s.gap);
    for (Eigen::Index j = 0; j < t.cells.cols(); ++j) CHECK(t.cells(0, j) == j * s.gap);
    for (Eigen::Index i = 1; i < t.cells.rows(); ++i) {
      for (Eigen::Index j = 1; j < t.cells.cols(); ++j) {
        const int diag = t.cells(i - 1, j - 1) + s.substitution(a[i - 1], b[j - 1]);
        CHECK(t.cells(i, j) == std::max({diag, t.cells(i - 1, j) + s.gap, t.cells(i, j - 1) + s.gap}));
      }
    }
  }
}

TEST_CASE("nw_align: ties prefer diagonal, then up, then left") {
  // Under (0,-1,-1), "A" vs "B" scores -1 as a mismatch or -2 with gaps.
  auto r = nw_align(seq("A"), seq("B"), ScoringScheme{0, -1, -1});
  CHECK(str(r.aligned_a.tokens()) == "A");
  // With mismatch -2 a substitution ties with gap+gap; diag still wins.
  r = nw_align(seq("A"), seq("B"), ScoringScheme{0, -2, -1});
  CHECK(str(r.aligned_a.tokens()) == "A");
  // With mismatch -3, the gapped alignment is forced; backtrack from (1,1)
  // meets an up/left tie and takes up first, so a's token comes last.
  r = nw_align(seq("A"), seq("B"), ScoringScheme{0, -3, -1});
  CHECK(str(r.aligned_a.tokens()) == "-A");
  CHECK(str(r.aligned_b.tokens()) == "B-");
}

TEST_CASE("nw_align is optimal, symmetric in score and round-trips") {
  std::mt19937_64 rng(2024);
  const ScoringScheme schemes[] = {{0, -1, -1}, {3, -1, -2}, {1, 0, -1}, {2, -3, -1}};
  for (int trial = 0; trial < 200; ++trial) {
    const Sequence a = oracle::random_sequence(rng, 6, 4);
    const Sequence b = oracle::random_sequence(rng, 6, 4);
    const ScoringScheme& s = schemes[trial % 4];
    const auto r = nw_align(a, b, s);
    CHECK(r.score == oracle::best_alignment_score(a, b, s));
    CHECK(r.score == nw_align(b, a, s).score);
    CHECK(r.aligned_a.size() == r.aligned_b.size());
    CHECK(alignment_score(r.aligned_a, r.aligned_b, s) == r.score);
    CHECK(strip_gaps(r.aligned_a) == a);
    CHECK(strip_gaps(r.aligned_b) == b);
  }
}

TEST_CASE("star_align: center of the five-sequence example") {
  const StarResult r = star_align(kFiveInputs, kFiveScheme);
  CHECK(r.center_index == 1);
  CHECK(r.aligned.size() == 5);
}

TEST_CASE("star_align: center maximizes the off-diagonal score sum") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Sequence> seqs(1 + rng() % 5);
    for (auto& s : seqs) s = oracle::random_sequence(rng, 6, 4);
    const StarResult r = star_align(seqs, kFiveScheme);
    std::vector<int> sums(seqs.size(), 0);
    for (std::size_t j = 0; j < seqs.size(); ++j) {
      for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (i != j) sums[j] += oracle::best_alignment_score(seqs[j], seqs[i], kFiveScheme);
      }
    }
    const auto best = std::max_element(sums.begin(), sums.end());
    CHECK(r.center_index == static_cast<std::size_t>(best - sums.begin()));
    CHECK(r.total_score == *best);
  }
}

TEST_CASE("star_align: identical inputs") {
  const std::vector<Sequence> seqs(5, seq("ABC"));
  const StarResult r = star_align(seqs, kFiveScheme);
  CHECK(r.center_index == 0);
  for (const auto& a : r.aligned) CHECK(str(a.tokens()) == "ABC");
}

TEST_CASE("star_align: single sequence and empty input") {
  const std::vector<Sequence> one{seq("AB")};
  const StarResult r = star_align(one, kFiveScheme);
  CHECK(r.center_index == 0);
  CHECK(str(r.aligned[0].tokens()) == "AB");
  CHECK(r.total_score == 0);
  try {
    star_align(std::vector<Sequence>{}, kFiveScheme);
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyInput);
  }
}

TEST_CASE("star_align: merge order is descending similarity to the center") {
  const StarResult r = star_align(kFiveInputs, kFiveScheme);
  const SimilarityMatrix sim = similarity_matrix(kFiveInputs, kFiveScheme);
  REQUIRE(r.merge_order.size() == 4);
  for (std::size_t p = 1; p < r.merge_order.size(); ++p) {
    const int prev = sim.scores(1, static_cast<Eigen::Index>(r.merge_order[p - 1]));
    const int cur = sim.scores(1, static_cast<Eigen::Index>(r.merge_order[p]));
    CHECK(prev >= cur);
    if (prev == cur) CHECK(r.merge_order[p - 1] < r.merge_order[p]);
  }
  CHECK(sim.scores.isApprox(sim.scores.transpose()));
}

namespace {

void check_against_slot_oracle(const std::vector<Sequence>& seqs, const ScoringScheme& s) {
  const StarResult r = star_align(seqs, s);
  const std::size_t c = r.center_index;
  std::vector<std::pair<AlignedSequence, AlignedSequence>> pairs(seqs.size());
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (i == c) continue;
    const auto pr = nw_align(seqs[c], seqs[i], s);
    pairs[i] = {pr.aligned_a, pr.aligned_b};
  }
  const auto expected = oracle::slot_profile_merge(std::vector<Token>(seqs[c].begin(), seqs[c].end()), c, pairs);
  REQUIRE(r.aligned.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(str(r.aligned[i].tokens()) == str(expected[i]));
  }
}

}  // namespace

TEST_CASE("star_align: five-sequence example matches the slot-profile oracle") {
  check_against_slot_oracle(kFiveInputs, kFiveScheme);
  const StarResult r = star_align(kFiveInputs, kFiveScheme);
  std::vector<std::string> rows;
  for (const auto& a : r.aligned) rows.push_back(str(a.tokens()));
  CHECK(rows == std::vector<std::string>{"AB-CFB-", "AB-CBBC", "A--CFBC", "-B-CFCC", "ABEFBBC"});
}

TEST_CASE("star_align: random inputs match the slot-profile oracle and keep invariants") {
  std::mt19937_64 rng(99);
  const ScoringScheme schemes[] = {{0, -1, -1}, {3, -1, -2}};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Sequence> seqs(1 + rng() % 5);
    for (auto& s : seqs) s = oracle::random_sequence(rng, 7, 4);
    const ScoringScheme& s = schemes[trial % 2];
    check_against_slot_oracle(seqs, s);

    const StarResult r = star_align(seqs, s);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      CHECK(r.aligned[i].size() == r.width());
      CHECK(strip_gaps(r.aligned[i]) == seqs[i]);
    }
    for (std::size_t col = 0; col < r.width(); ++col) {
      bool any = false;
      for (const auto& a : r.aligned) any = any || a[col] != kGap;
      CHECK(any);
    }
    // deterministic
    const StarResult again = star_align(seqs, s);
    CHECK(again.aligned == r.aligned);
  }
}

TEST_CASE("similarity_matrix caches each pair in both orientations") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Sequence> seqs(2 + rng() % 4);
    for (auto& s : seqs) s = oracle::random_sequence(rng, 6, 3);
    const SimilarityMatrix sim = similarity_matrix(seqs, kFiveScheme);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      for (std::size_t j = 0; j < seqs.size(); ++j) {
        if (i == j) continue;
        const auto direct = nw_align(seqs[i], seqs[j], kFiveScheme);
        CHECK(sim.pairs[i][j].aligned_a == direct.aligned_a);
        CHECK(sim.pairs[i][j].aligned_b == direct.aligned_b);
        CHECK(sim.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == direct.score);
      }
    }
  }
}
