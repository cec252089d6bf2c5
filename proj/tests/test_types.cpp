#include <doctest.h>

#include <random>

#include "seqfuse/types.hpp"

using namespace seqfuse;

TEST_CASE("standard alphabet ids follow declaration order") {
  const auto a = GlossAlphabet::standard();
  CHECK(a.size() == 16);
  CHECK(a.blank() == 16);
  CHECK(a.num_ctc_classes() == 17);
  const std::vector<std::string> labels{"is", "Very"};
  CHECK(encode(labels, a) == Sequence{6, 7});
  CHECK(a.gloss(0) == "Agreement");
  CHECK(decode(Sequence{0}, a) == std::vector<std::string>{"Agreement"});
}

TEST_CASE("encode edge cases") {
  const auto a = GlossAlphabet::standard();
  CHECK(encode(std::vector<std::string>{}, a).empty());
  try {
    encode(std::vector<std::string>{"Banana"}, a);
    FAIL("expected UnknownGloss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownGloss);
  }
}

TEST_CASE("decode rejects ids outside the gloss range") {
  const auto a = GlossAlphabet::standard();
  try {
    decode(Sequence{99}, a);
    FAIL("expected InvalidTokenId");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidTokenId);
  }
  // BLANK is not a gloss either
  CHECK_THROWS_AS(decode(Sequence{a.blank()}, a), Error);
}

TEST_CASE("encode/decode round trip on random label lists") {
  const auto a = GlossAlphabet::standard();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> labels(rng() % 9);
    for (auto& l : labels) l = a.glosses()[rng() % a.size()];
    const Sequence s = encode(labels, a);
    CHECK(s.size() == labels.size());
    CHECK(decode(s, a) == labels);
  }
}

TEST_CASE("alphabet invariants") {
  CHECK_THROWS_AS(GlossAlphabet({"a", "a"}), Error);
  CHECK_THROWS_AS(GlossAlphabet({"a", ""}), Error);
  CHECK_THROWS_AS(GlossAlphabet(std::vector<std::string>{}), Error);
  const GlossAlphabet a({"x", "y"});
  CHECK(a.blank() == 2);
  CHECK_FALSE(a.valid(kGap));
  CHECK_FALSE(a.valid(a.blank()));
}

TEST_CASE("gap never enters a Sequence") {
  CHECK_THROWS_AS(Sequence({0, kGap}), Error);
  CHECK(strip_gaps(AlignedSequence{0, kGap, 1, kGap}) == Sequence{0, 1});
  CHECK(strip_gaps(AlignedSequence{kGap, kGap, kGap, kGap}).empty());
}

TEST_CASE("scoring scheme sanity") {
  CHECK(ScoringScheme{}.is_sane());
  CHECK(ScoringScheme{3, -1, -2}.is_sane());
  CHECK_FALSE(ScoringScheme{-2, 0, -1}.is_sane());
}

TEST_CASE("split_words") {
  CHECK(split_words("Father  Luck\t") == std::vector<std::string>{"Father", "Luck"});
  CHECK(split_words("").empty());
}

TEST_CASE("shipped alphabet file matches the built-in alphabet") {
  const auto file = GlossAlphabet::from_json_file(SEQFUSE_SOURCE_DIR "/data/alphabet.json");
  CHECK(file.to_json() == GlossAlphabet::standard().to_json());
}
