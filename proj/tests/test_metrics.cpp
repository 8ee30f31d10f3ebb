#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mtaudit/errors.hpp"
#include "mtaudit/metrics.hpp"
#include "mtaudit/unicode.hpp"
#include "oracles.hpp"

using namespace mtaudit;
using namespace mtaudit::metrics;

namespace {

BleuBreakdown bleu1(const std::string& hyp, const std::string& ref, const BleuConfig& cfg = {}) {
  const std::string refs[] = {ref};
  return bleu(hyp, refs, cfg);
}

const std::vector<std::string> kVocab = {"a", "b", "c", "d", "e"};

}  // namespace

// ---- tokenize ----------------------------------------------------------------

TEST(Tokenize, WhitespaceRuns) {
  EXPECT_EQ(tokenize("a  b\tc"), (TokenList{"a", "b", "c"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("Aten 11:20 hta,"), (TokenList{"Aten", "11:20", "hta,"}));
}

TEST(Tokenize, UnicodeSeparators) {
  // NBSP and ideographic space both split.
  EXPECT_EQ(tokenize("x y　z"), (TokenList{"x", "y", "z"}));
}

TEST(Tokenize, PluginRegistry) {
  EXPECT_THROW(tokenize("abc", TokenScheme::named("mecab")), UnknownPlugin);
  EXPECT_EQ(tokenize("日本 語", TokenScheme::named("chars")), (TokenList{"日", "本", "語"}));
  register_tokenizer("comma", [](std::string_view s) {
    TokenList out;
    std::size_t start = 0;
    while (start <= s.size()) {
      auto pos = s.find(',', start);
      if (pos == std::string_view::npos) pos = s.size();
      if (pos > start) out.emplace_back(s.substr(start, pos - start));
      start = pos + 1;
    }
    return out;
  });
  EXPECT_EQ(tokenize("x,y", TokenScheme::named("comma")), (TokenList{"x", "y"}));
}

// ---- BLEU --------------------------------------------------------------------

TEST(Bleu, IdentityIsHundred) {
  const auto b = bleu1("the cat sat on the mat", "the cat sat on the mat");
  EXPECT_DOUBLE_EQ(b.score, 100.0);
  EXPECT_DOUBLE_EQ(b.bp, 1.0);
}

TEST(Bleu, EmptyHypothesisIsZero) {
  const auto b = bleu1("", "a b c");
  EXPECT_EQ(b.score, 0.0);
  EXPECT_EQ(b.hyp_len, 0u);
}

TEST(Bleu, HandWalkedExponentialDecay) {
  // Matches [3,1,0,0] over totals [4,3,2,1]; orders 3 and 4 take decay
  // factors 2 and 4: p = [75, 33.33, 100/(2*2), 100/(4*1)].
  const auto b = bleu1("a b x d", "a b c d");
  ASSERT_EQ(b.matches, (std::vector<std::size_t>{3, 1, 0, 0}));
  ASSERT_EQ(b.totals, (std::vector<std::size_t>{4, 3, 2, 1}));
  EXPECT_NEAR(b.precisions[0], 75.0, 1e-12);
  EXPECT_NEAR(b.precisions[1], 100.0 / 3.0, 1e-12);
  EXPECT_NEAR(b.precisions[2], 25.0, 1e-12);
  EXPECT_NEAR(b.precisions[3], 25.0, 1e-12);
  EXPECT_DOUBLE_EQ(b.bp, 1.0);
  // (75 * 100/3 * 25 * 25)^(1/4), evaluated offline.
  EXPECT_NEAR(b.score, 35.35533905932738, 1e-9);
  EXPECT_NEAR(b.score, 35.36, 0.01);
}

TEST(Bleu, NoSmoothingZeroesScore) {
  BleuConfig cfg;
  cfg.smoothing = Smoothing::None;
  EXPECT_EQ(bleu1("a b x d", "a b c d", cfg).score, 0.0);
}

TEST(Bleu, BrevityPenalty) {
  const auto b = bleu1("a b", "a b c d");
  EXPECT_NEAR(b.bp, std::exp(1.0 - 4.0 / 2.0), 1e-12);
  EXPECT_NEAR(b.score, b.bp * 100.0, 1e-9);
}

TEST(Bleu, ClosestReferenceLengthTiesToShorter) {
  const std::string refs[] = {"a b", "a b c d e f"};
  // c = 4: |4-2| = 2, |4-6| = 2 -> shorter (2).
  EXPECT_EQ(bleu("a b c d", refs).ref_len, 2u);
  const std::string refs2[] = {"a", "a b c d e"};
  EXPECT_EQ(bleu("a b c d", refs2).ref_len, 5u);
}

TEST(Bleu, MultiReferenceClipsAgainstMaxCount) {
  const std::string refs[] = {"the the", "the cat the the"};
  const auto b = bleu("the the the the", refs);
  EXPECT_EQ(b.matches[0], 3u);
}

TEST(Bleu, Errors) {
  EXPECT_THROW(bleu("a", std::span<const std::string>{}), EmptyReference);
  EXPECT_THROW(bleu1("a", "   "), EmptyReference);
  BleuConfig bad;
  bad.weights = {0.5, 0.5};
  EXPECT_THROW(bleu1("a", "a", bad), ValidationError);
  bad.weights = {0.5, 0.5, 0.5, 0.5};
  EXPECT_THROW(bleu1("a", "a", bad), ValidationError);
  bad = {};
  bad.max_order = 0;
  EXPECT_THROW(bleu1("a", "a", bad), ValidationError);
}

TEST(Bleu, ShortIdentityUsesEffectiveOrder) {
  const auto b = bleu1("hello", "hello");
  EXPECT_EQ(b.effective_order, 1);
  EXPECT_DOUBLE_EQ(b.score, 100.0);
}

TEST(Bleu, CountsMatchBruteForceOracle) {
  std::mt19937 rng(20250101);
  for (int trial = 0; trial < 500; ++trial) {
    const auto hyp = oracle::random_tokens(rng, kVocab, 9);
    auto ref = oracle::random_tokens(rng, kVocab, 9);
    if (ref.empty()) ref.push_back("a");
    const auto expected = oracle::brute_force_bleu_counts(hyp, ref, 4);
    const auto b = bleu1(oracle::join(hyp), oracle::join(ref));
    ASSERT_EQ(b.matches, expected.matches) << oracle::join(hyp) << " | " << oracle::join(ref);
    ASSERT_EQ(b.totals, expected.totals);
  }
}

TEST(Bleu, ScoreRecomputesFromStoredFields) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto hyp = oracle::join(oracle::random_tokens(rng, kVocab, 12));
    const auto ref = oracle::join(oracle::random_tokens(rng, kVocab, 12)) + " a";
    const auto b = bleu1(hyp, ref);
    EXPECT_NEAR(bleu_score_from_fields(b), b.score, 1e-9);
    EXPECT_GE(b.score, 0.0);
    EXPECT_LE(b.score, 100.0 + 1e-9);
    if (b.hyp_len > 0) {
      EXPECT_NEAR(b.bp, std::min(1.0, std::exp(1.0 - double(b.ref_len) / double(b.hyp_len))), 1e-12);
    }
  }
}

TEST(Bleu, AppendingUnmatchedTokensNeverRaisesScore) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    auto ref = oracle::random_tokens(rng, kVocab, 8);
    ref.push_back("a");
    auto hyp = oracle::random_tokens(rng, kVocab, 8);
    while (hyp.size() < ref.size()) hyp.push_back(oracle::random_word(rng, kVocab));
    double prev = bleu1(oracle::join(hyp), oracle::join(ref)).score;
    auto prev_matches = bleu1(oracle::join(hyp), oracle::join(ref)).matches;
    for (int k = 0; k < 6; ++k) {
      hyp.push_back("zz" + std::to_string(k));
      const auto b = bleu1(oracle::join(hyp), oracle::join(ref));
      EXPECT_LE(b.score, prev + 1e-9);
      EXPECT_DOUBLE_EQ(b.bp, 1.0);
      for (std::size_t n = 0; n < b.matches.size(); ++n) EXPECT_LE(b.matches[n], prev_matches[n]);
      prev = b.score;
      prev_matches = b.matches;
    }
  }
}

// ---- ChrF++ ------------------------------------------------------------------

TEST(Chrf, Identity) { EXPECT_DOUBLE_EQ(chrfpp("ab cd", "ab cd").score, 100.0); }

TEST(Chrf, Disjoint) { EXPECT_EQ(chrfpp("ab", "cd").score, 0.0); }

TEST(Chrf, BothEmptyIsZero) {
  const auto b = chrfpp("", "");
  EXPECT_EQ(b.score, 0.0);
  EXPECT_EQ(b.effective_char_order, 0);
  EXPECT_EQ(b.effective_word_order, 0);
}

TEST(Chrf, HandEnumeratedCase) {
  // Chars without spaces: "abcd" vs "abce", 4 < 5 so char order drops to 4.
  // char: a,b,c,d | ab,bc,cd | abc,bcd | abcd  -> 3/4, 2/3, 1/2, 0
  // word: ab,cd | "ab cd"                        -> 1/2, 0
  const auto b = chrfpp("ab cd", "ab ce");
  EXPECT_EQ(b.effective_char_order, 4);
  EXPECT_EQ(b.effective_word_order, 2);
  ASSERT_EQ(b.char_precisions.size(), 4u);
  EXPECT_NEAR(b.char_precisions[0], 3.0 / 4.0, 1e-12);
  EXPECT_NEAR(b.char_precisions[1], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(b.char_precisions[2], 1.0 / 2.0, 1e-12);
  EXPECT_NEAR(b.char_precisions[3], 0.0, 1e-12);
  EXPECT_NEAR(b.word_precisions[0], 0.5, 1e-12);
  EXPECT_NEAR(b.word_precisions[1], 0.0, 1e-12);
  const double expected_p = (0.75 + 2.0 / 3.0 + 0.5 + 0.0 + 0.5 + 0.0) / 6.0;
  EXPECT_NEAR(b.precision, expected_p, 1e-12);
  EXPECT_NEAR(b.recall, expected_p, 1e-12);
  EXPECT_NEAR(b.score, 40.27777777777777, 1e-9);
  EXPECT_NEAR(b.score, 40.28, 0.01);
}

TEST(Chrf, CornerCaseReductionForShortHypotheses) {
  const std::string ref = "abcdef";
  for (int len = 1; len <= 6; ++len) {
    const std::string hyp = ref.substr(0, static_cast<std::size_t>(len));
    const auto b = chrfpp(hyp, ref);
    EXPECT_EQ(b.effective_char_order, len) << hyp;
    EXPECT_EQ(b.effective_word_order, 1) << hyp;
    EXPECT_EQ(b.char_precisions.size(), static_cast<std::size_t>(len));
    for (double p : b.char_precisions) EXPECT_DOUBLE_EQ(p, 1.0);
  }
  // Word 2-gram dropped for a one-word hypothesis, kept for two words.
  EXPECT_EQ(chrfpp("ab", "ab cd").effective_word_order, 1);
  EXPECT_EQ(chrfpp("ab cd", "ab cd ef").effective_word_order, 2);
}

TEST(Chrf, WhitespaceKeptWhenConfigured) {
  ChrfConfig cfg;
  cfg.remove_whitespace_for_char_ngrams = false;
  const auto b = chrfpp("ab cd", "ab cd", cfg);
  EXPECT_EQ(b.effective_char_order, 5);
  EXPECT_DOUBLE_EQ(b.score, 100.0);
}

TEST(Chrf, RangeAndPrecisionRecallDuality) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto h = oracle::join(oracle::random_tokens(rng, kVocab, 6), " ") + "x";
    const auto r = oracle::join(oracle::random_tokens(rng, kVocab, 6), " ") + "y";
    const auto fwd = chrfpp(h, r);
    const auto rev = chrfpp(r, h);
    EXPECT_GE(fwd.score, 0.0);
    EXPECT_LE(fwd.score, 100.0 + 1e-9);
    EXPECT_NEAR(fwd.precision, rev.recall, 1e-12);
    EXPECT_NEAR(fwd.recall, rev.precision, 1e-12);
  }
}

TEST(Chrf, ConfigValidation) {
  ChrfConfig cfg;
  cfg.beta = 0.0;
  EXPECT_THROW(chrfpp("a", "a", cfg), ValidationError);
  cfg = {};
  cfg.char_order = 0;
  EXPECT_THROW(chrfpp("a", "a", cfg), ValidationError);
}

// ---- CER / TER ---------------------------------------------------------------

TEST(Cer, Basics) {
  EXPECT_EQ(cer("abc", "abc").rate, 0.0);
  EXPECT_DOUBLE_EQ(cer("", "abc").rate, 1.0);
  const auto k = cer("kitten", "sitting");
  EXPECT_EQ(k.distance, 3u);
  EXPECT_EQ(k.ref_units, 7u);
  EXPECT_NEAR(k.rate, 3.0 / 7.0, 1e-12);
  EXPECT_THROW(cer("abc", ""), EmptyReference);
}

TEST(Cer, CountsScalarValuesNotBytes) {
  const auto b = cer("naïve", "naive");
  EXPECT_EQ(b.distance, 1u);
  EXPECT_EQ(b.ref_units, 5u);
}

TEST(Cer, MatchesRecursiveOracle) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = oracle::random_text(rng, 12);
    auto r = oracle::random_text(rng, 12);
    if (r.empty()) r = "a";
    const auto hd = *unicode::decode_utf8(h);
    const auto rd = *unicode::decode_utf8(r);
    const auto expected = oracle::edit_distance(std::vector<char32_t>(hd.begin(), hd.end()),
                                                std::vector<char32_t>(rd.begin(), rd.end()));
    const auto b = cer(h, r);
    ASSERT_EQ(b.distance, expected) << h << " | " << r;
    EXPECT_EQ(b.rate == 0.0, h == r);
    EXPECT_LE(b.distance, std::max(hd.size(), rd.size()));
  }
}

TEST(Ter, Basics) {
  EXPECT_EQ(ter("the cat sat", "the cat sat").rate, 0.0);
  EXPECT_DOUBLE_EQ(ter("", "a b").rate, 1.0);
  const auto b = ter("the cat", "the black cat");
  EXPECT_EQ(b.distance, 1u);
  EXPECT_NEAR(b.rate, 1.0 / 3.0, 1e-12);
  EXPECT_THROW(ter("a", "  "), EmptyReference);
}

TEST(Ter, ShiftFreeMatchesOracleAndTokenCer) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = oracle::random_tokens(rng, kVocab, 12);
    auto r = oracle::random_tokens(rng, kVocab, 12);
    if (r.empty()) r.push_back("e");
    const auto b = ter(oracle::join(h), oracle::join(r));
    ASSERT_EQ(b.distance, oracle::edit_distance(h, r));
    // Same thing through the character metric with one symbol per token.
    std::string hs, rs;
    for (const auto& t : h) hs += t;
    for (const auto& t : r) rs += t;
    EXPECT_EQ(b.distance, cer(hs, rs).distance);
    EXPECT_EQ(b.rate == 0.0, h == r);
  }
}

TEST(Ter, ShiftMovesBlock) {
  TerConfig cfg;
  cfg.shifts = true;
  // Without shifts: delete "a" at the end, insert at the front = 2.
  EXPECT_EQ(ter("b c a", "a b c").distance, 2u);
  const auto b = ter("b c a", "a b c", cfg);
  EXPECT_EQ(b.shifts, 1u);
  EXPECT_EQ(b.distance, 1u);
  // Multi-word block.
  const auto m = ter("d e f a b c", "a b c d e f", cfg);
  EXPECT_EQ(m.distance, 1u);
}

TEST(Ter, ShiftsNeverWorseThanShiftFree) {
  TerConfig cfg;
  cfg.shifts = true;
  std::mt19937 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = oracle::join(oracle::random_tokens(rng, kVocab, 10));
    const auto r = oracle::join(oracle::random_tokens(rng, kVocab, 10)) + " a";
    const auto plain = ter(h, r);
    const auto shifted = ter(h, r, cfg);
    EXPECT_LE(shifted.distance, plain.distance);
    EXPECT_EQ(shifted.distance == 0, h == r);
  }
}
