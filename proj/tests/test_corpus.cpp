#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "mtaudit/corpus.hpp"
#include "mtaudit/errors.hpp"
#include "mtaudit/io.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mtaudit;
using mtaudit::testing::TempDir;
using mtaudit::testing::write_text;

namespace {

const LanguagePair kEngKac{LanguageTag::parse("eng_Latn"), LanguageTag::parse("kac_Latn")};

std::size_t count_tokens(const std::string& s) {
  std::istringstream in(s);
  std::string t;
  std::size_t n = 0;
  while (in >> t) ++n;
  return n;
}

std::string numbered_lines(const std::string& prefix, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += prefix + " " + std::to_string(i) + "\n";
  return out;
}

}  // namespace

TEST(LanguageTag, Parse) {
  const auto t = LanguageTag::parse("twi_Latn_asan1239");
  EXPECT_EQ(t.language(), "twi");
  EXPECT_EQ(t.script(), "Latn");
  EXPECT_EQ(t.script_class(), ScriptClass::Latin);
  EXPECT_EQ(LanguageTag::parse("jpn_Jpan").script_class(), ScriptClass::NonLatin);
  EXPECT_FALSE(LanguageTag::is_valid("kac"));
  EXPECT_FALSE(LanguageTag::is_valid("kac__Latn"));
  EXPECT_FALSE(LanguageTag::is_valid("_Latn"));
  EXPECT_THROW(LanguageTag::parse("kac-Latn"), ValidationError);
}

TEST(Split, RoundTrip) {
  for (auto s : {Split::Dev, Split::Devtest, Split::Custom}) EXPECT_EQ(parse_split(to_string(s)), s);
  EXPECT_THROW(parse_split("test"), ValidationError);
}

TEST(LoadCorpus, ThreeLines) {
  TempDir dir;
  write_text(dir / "a.eng", "one\ntwo\nthree\n");
  write_text(dir / "a.kac", "hkra\nlahkawng\nmasum");
  const auto c = load_corpus(dir / "a.eng", dir / "a.kac", kEngKac, Split::Dev);
  ASSERT_EQ(c.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(c.pairs[i].id, i);
  EXPECT_EQ(c.pairs[2].reference_text, "masum");
  EXPECT_EQ(c.pairs[1].target_lang.code(), "kac_Latn");
  EXPECT_EQ(c.pairs[0].split, Split::Dev);
}

TEST(LoadCorpus, DevSizedFiles) {
  TempDir dir;
  write_text(dir / "dev.eng", numbered_lines("sentence", 997));
  write_text(dir / "dev.kac", numbered_lines("ga", 997));
  const auto c = load_corpus(dir / "dev.eng", dir / "dev.kac", kEngKac, Split::Dev);
  EXPECT_EQ(c.size(), 997u);
  EXPECT_EQ(c.split, Split::Dev);
  EXPECT_EQ(c.pairs.back().id, 996u);
}

TEST(LoadCorpus, LineCountMismatch) {
  TempDir dir;
  write_text(dir / "a", numbered_lines("x", 5));
  write_text(dir / "b", numbered_lines("y", 4));
  try {
    load_corpus(dir / "a", dir / "b", kEngKac, Split::Custom);
    FAIL();
  } catch (const LineCountMismatch& e) {
    EXPECT_NE(std::string(e.what()).find('5'), std::string::npos);
    EXPECT_NE(std::string(e.what()).find('4'), std::string::npos);
  }
}

TEST(LoadCorpus, CrlfAndNfc) {
  TempDir dir;
  write_text(dir / "a", "café\r\nb\r\n");
  write_text(dir / "b", "x\r\ny\r\n");
  const auto c = load_corpus(dir / "a", dir / "b", kEngKac, Split::Custom);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.pairs[0].source_text, "café");
  EXPECT_EQ(c.pairs[1].reference_text, "y");
  const auto raw = load_corpus(dir / "a", dir / "b", kEngKac, Split::Custom, {.normalize_nfc = false});
  EXPECT_EQ(raw.pairs[0].source_text, "café");
}

TEST(LoadCorpus, Errors) {
  TempDir dir;
  write_text(dir / "bad", "ok\n\xff\xfe\n");
  write_text(dir / "good", "a\nb\n");
  write_text(dir / "blank", "a\n   \n");
  EXPECT_THROW(load_corpus(dir / "bad", dir / "good", kEngKac, Split::Custom), EncodingError);
  EXPECT_THROW(load_corpus(dir / "good", dir / "blank", kEngKac, Split::Custom), EmptyLine);
  EXPECT_THROW(load_corpus(dir / "missing", dir / "good", kEngKac, Split::Custom), IoError);
}

TEST(LoadCorpus, RoundTripByteIdentical) {
  TempDir dir;
  const std::string src = "Alice met Bob.\nTôi đi học.\n日本語\n";
  const std::string ref = "a b\nc\nd e f\n";
  write_text(dir / "s", src);
  write_text(dir / "r", ref);
  const auto c = load_corpus(dir / "s", dir / "r", kEngKac, Split::Devtest);
  save_corpus(c, dir / "s2", dir / "r2");
  EXPECT_EQ(io::read_file(dir / "s2"), src);
  EXPECT_EQ(io::read_file(dir / "r2"), ref);
  const auto again = load_corpus(dir / "s2", dir / "r2", kEngKac, Split::Devtest);
  EXPECT_EQ(again.sources(), c.sources());
  EXPECT_EQ(again.references(), c.references());
}

TEST(LoadCorpus, TsvRoundTrip) {
  TempDir dir;
  write_text(dir / "c.tsv", "id\tsource\treference\n0\thello\tga\n1\tworld\tmung\n");
  auto c = load_corpus_tsv(dir / "c.tsv", kEngKac, Split::Dev);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.pairs[1].source_text, "world");
  save_corpus_tsv(c, dir / "d.tsv");
  EXPECT_EQ(io::read_file(dir / "d.tsv"), io::read_file(dir / "c.tsv"));

  write_text(dir / "bad.tsv", "id\tsource\treference\n1\thello\tga\n");
  EXPECT_THROW(load_corpus_tsv(dir / "bad.tsv", kEngKac, Split::Dev), ValidationError);
  write_text(dir / "hdr.tsv", "src\tref\nhello\tga\n");
  EXPECT_THROW(load_corpus_tsv(dir / "hdr.tsv", kEngKac, Split::Dev), ValidationError);
}

TEST(LoadCorpus, MetaSidecar) {
  TempDir dir;
  const auto tsv = dir / "c.tsv";
  CorpusMeta meta;
  EXPECT_FALSE(load_corpus_meta(tsv, meta));
  save_corpus_meta({"kac", "eng_Latn", "kac_Latn", Split::Dev}, tsv);
  ASSERT_TRUE(load_corpus_meta(tsv, meta));
  EXPECT_EQ(meta.name, "kac");
  EXPECT_EQ(meta.target_lang, "kac_Latn");
  EXPECT_EQ(meta.split, Split::Dev);
}

TEST(LoadHypotheses, LengthsAndEmptyLines) {
  TempDir dir;
  write_text(dir / "h50", numbered_lines("h", 50));
  write_text(dir / "h49", numbered_lines("h", 49));
  write_text(dir / "gaps", "a\n\nc\n");
  EXPECT_EQ(load_hypotheses(dir / "h50", 50).size(), 50u);
  EXPECT_THROW(load_hypotheses(dir / "h49", 50), LineCountMismatch);
  EXPECT_EQ(load_hypotheses(dir / "gaps", 3), (std::vector<std::string>{"a", "", "c"}));
}

// ---- filtering ---------------------------------------------------------------

TEST(Filter, Examples) {
  auto r = filter_corpus({{"a b", "x y"}, {"a b", "x y"}}, {});
  EXPECT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.report.dropped_dup, 1u);

  r = filter_corpus({{"one two", "w x y z a b c d e"}}, {});
  EXPECT_EQ(r.kept.size(), 0u);
  EXPECT_EQ(r.report.dropped_ratio, 1u);

  r = filter_corpus({{"one two", "w x y z"}}, {});
  EXPECT_EQ(r.report.kept, 1u);

  r = filter_corpus({{"", "x"}, {"a", "b"}}, {});
  EXPECT_EQ(r.report.dropped_short, 1u);
  EXPECT_EQ(r.report.kept, 1u);

  EXPECT_TRUE(filter_corpus({}, {}).kept.empty());
}

TEST(Filter, ConfigValidation) {
  EXPECT_NO_THROW(FilterConfig{}.validate());
  EXPECT_THROW((FilterConfig{0.5, 1, true}).validate(), ValidationError);
  EXPECT_THROW((FilterConfig{std::nan(""), 1, true}).validate(), ValidationError);
}

TEST(Filter, ReportJson) {
  const auto r = filter_corpus({{"a", "b"}, {"a", "b"}}, {});
  const nlohmann::json j = r.report;
  EXPECT_EQ(j.at("kept"), 1);
  EXPECT_EQ(j.at("dropped_dup"), 1);
}

// Idempotence, duplicate-freeness and the ratio bound over random corpora.
TEST(Filter, RandomCorpusProperties) {
  std::mt19937 rng(7);
  const std::vector<std::string> vocab = {"a", "b", "c"};
  std::uniform_int_distribution<int> size(0, 30), coin(0, 1);
  std::uniform_real_distribution<double> ratio(1.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<TextPair> pairs;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) {
      pairs.emplace_back(oracle::join(oracle::random_tokens(rng, vocab, 6)),
                         oracle::join(oracle::random_tokens(rng, vocab, 6)));
    }
    const FilterConfig cfg{ratio(rng), static_cast<std::size_t>(coin(rng) + coin(rng)), coin(rng) == 1};
    const auto once = filter_corpus(pairs, cfg);
    const auto twice = filter_corpus(once.kept, cfg);
    ASSERT_EQ(twice.kept, once.kept) << "trial " << trial;
    ASSERT_EQ(once.report.total(), pairs.size());
    ASSERT_EQ(once.report.kept, once.kept.size());

    if (cfg.dedup) {
      std::set<TextPair> seen(once.kept.begin(), once.kept.end());
      ASSERT_EQ(seen.size(), once.kept.size());
    }
    // Survivors appear in input order.
    std::size_t cursor = 0;
    for (const auto& k : once.kept) {
      while (cursor < pairs.size() && pairs[cursor] != k) ++cursor;
      ASSERT_LT(cursor, pairs.size());
      ++cursor;
    }
    for (const auto& [s, t] : once.kept) {
      const auto a = count_tokens(s), b = count_tokens(t);
      ASSERT_GE(std::min(a, b), cfg.min_tokens);
      if (a == 0 && b == 0) continue;
      ASSERT_GT(std::min(a, b), 0u);
      ASSERT_LE(static_cast<double>(std::max(a, b)) / static_cast<double>(std::min(a, b)),
                cfg.max_length_ratio);
    }
  }
}
