#include <gtest/gtest.h>

#include <random>

#include "mtaudit/errors.hpp"
#include "mtaudit/kernels.hpp"
#include "oracles.hpp"

using namespace mtaudit;
using namespace mtaudit::kernels;

namespace {

struct Batch {
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
};

Batch random_batch(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "é", "語"};
  Batch b;
  for (std::size_t i = 0; i < n; ++i) {
    b.hyps.push_back(oracle::join(oracle::random_tokens(rng, vocab, 15)));
    auto ref = oracle::random_tokens(rng, vocab, 15);
    if (ref.empty()) ref.push_back("a");
    b.refs.push_back(oracle::join(ref));
  }
  return b;
}

}  // namespace

TEST(Kernels, SerialAndParallelAgree) {
  const auto b = random_batch(700, 21);
  EXPECT_EQ(corpus_bleu_stats(b.hyps, b.refs, {}, Exec::Serial),
            corpus_bleu_stats(b.hyps, b.refs, {}, Exec::Parallel));
  EXPECT_EQ(corpus_bleu(b.hyps, b.refs, {}, Exec::Serial).score,
            corpus_bleu(b.hyps, b.refs, {}, Exec::Parallel).score);
  EXPECT_EQ(corpus_chrf(b.hyps, b.refs, {}, Exec::Serial).score,
            corpus_chrf(b.hyps, b.refs, {}, Exec::Parallel).score);
  EXPECT_EQ(corpus_cer(b.hyps, b.refs, Exec::Serial).distance, corpus_cer(b.hyps, b.refs, Exec::Parallel).distance);
  metrics::TerConfig shifts;
  shifts.shifts = true;
  EXPECT_EQ(corpus_ter(b.hyps, b.refs, shifts, Exec::Serial).distance,
            corpus_ter(b.hyps, b.refs, shifts, Exec::Parallel).distance);

  const auto sb = sentence_bleu(b.hyps, b.refs, {}, Exec::Serial);
  const auto pb = sentence_bleu(b.hyps, b.refs, {}, Exec::Parallel);
  const auto sc = sentence_chrf(b.hyps, b.refs, {}, Exec::Serial);
  const auto pc = sentence_chrf(b.hyps, b.refs, {}, Exec::Parallel);
  for (std::size_t i = 0; i < b.hyps.size(); ++i) {
    ASSERT_EQ(sb[i].score, pb[i].score);
    ASSERT_EQ(sc[i].score, pc[i].score);
  }
}

TEST(Kernels, CorpusStatsAreSums) {
  const auto b = random_batch(50, 4);
  metrics::BleuStats sum;
  metrics::ChrfStats chrf_sum;
  for (std::size_t i = 0; i < b.hyps.size(); ++i) {
    const auto h = tokenize(b.hyps[i]);
    const std::vector<TokenList> r = {tokenize(b.refs[i])};
    sum += metrics::bleu_stats(h, r, 4);
    chrf_sum += metrics::chrf_stats(b.hyps[i], b.refs[i]);
  }
  EXPECT_EQ(corpus_bleu_stats(b.hyps, b.refs, {}, Exec::Parallel), sum);
  EXPECT_DOUBLE_EQ(corpus_chrf(b.hyps, b.refs).score, metrics::chrf_from_stats(chrf_sum).score);
}

TEST(Kernels, MicroAveragedEditRates) {
  const std::vector<std::string> hyps = {"kitten", "abc"};
  const std::vector<std::string> refs = {"sitting", "abc"};
  const auto c = corpus_cer(hyps, refs);
  EXPECT_EQ(c.distance, 3u);
  EXPECT_EQ(c.ref_units, 10u);
  EXPECT_DOUBLE_EQ(c.rate, 0.3);
  const auto t = corpus_ter(std::vector<std::string>{"the cat", "x"}, std::vector<std::string>{"the black cat", "x"});
  EXPECT_DOUBLE_EQ(t.rate, 0.25);
}

TEST(Kernels, Errors) {
  const std::vector<std::string> two = {"a", "b"}, one = {"a"};
  EXPECT_THROW(corpus_bleu(two, one), AlignmentError);
  EXPECT_THROW(sentence_chrf(one, two), AlignmentError);
  EXPECT_THROW(corpus_cer(one, std::vector<std::string>{""}), EmptyReference);
}

TEST(Kernels, ExceptionFromLowestIndexWins) {
  std::vector<std::string> hyps(100, "a"), refs(100, "a");
  refs[40] = "";
  refs[90] = "";
  try {
    sentence_cer(hyps, refs, Exec::Parallel);
    FAIL();
  } catch (const EmptyReference&) {
  }
}
