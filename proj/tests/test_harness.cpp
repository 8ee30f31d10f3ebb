#include <gtest/gtest.h>

#include <algorithm>

#include "mtaudit/errors.hpp"
#include "mtaudit/harness.hpp"
#include "mtaudit/io.hpp"
#include "test_util.hpp"

using namespace mtaudit;
using namespace mtaudit::harness;
using mtaudit::testing::TempDir;
using mtaudit::testing::write_text;

namespace {

Corpus make_set(const std::string& name, const std::vector<std::string>& refs) {
  Corpus c;
  c.name = name;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    c.pairs.push_back({i, "src " + std::to_string(i), refs[i], LanguageTag::parse("kac_Latn"),
                       LanguageTag::parse("eng_Latn"), Split::Custom});
  }
  return c;
}

std::vector<NamedTestSet> three_sets() {
  return {{"PARADISEC (test)", make_set("p", {"the boy went home", "she sang a song"})},
          {"FLORES (devtest)", make_set("f", {"the market opened early today", "prices rose again"})},
          {"Dialogue", make_set("d", {"how are you", "i am fine thanks"})}};
}

}  // namespace

TEST(Harness, BaselineRowAverage) {
  const auto m = parse_matrix_csv(io::read_file(mtaudit::testing::fixture("harness/baseline_row.csv")));
  ASSERT_EQ(m.test_sets, (std::vector<std::string>{"PARADISEC (test)", "FLORES (devtest)", "Dialogue"}));
  ASSERT_EQ(m.rows.size(), 1u);
  const auto& row = m.rows[0];
  EXPECT_EQ(row.training_tag, "Baseline");
  const auto avg = row_average(row.cells);
  EXPECT_NEAR(avg.bleu, 10.81, 0.005);
  EXPECT_NEAR(avg.chrfpp, 29.41, 0.005);
  EXPECT_NEAR(avg.bleu, row.average.bleu, 0.005);
  EXPECT_NEAR(avg.chrfpp, row.average.chrfpp, 0.005);
}

TEST(Harness, IdentityScoresPerfect) {
  const auto sets = three_sets();
  SystemRun run{"oracle", "Baseline", "kac_Latn", "eng_Latn", {}};
  for (const auto& ts : sets) run.hypotheses[ts.name] = ts.corpus.references();
  const auto cells = score_run(run, sets);
  ASSERT_EQ(cells.size(), 3u);
  for (const auto& c : cells) {
    EXPECT_DOUBLE_EQ(c.bleu, 100.0);
    EXPECT_DOUBLE_EQ(c.chrfpp, 100.0);
  }
  EXPECT_DOUBLE_EQ(row_average(cells).bleu, 100.0);
  EXPECT_DOUBLE_EQ(row_average(cells).chrfpp, 100.0);
}

TEST(Harness, SerialMatchesParallel) {
  const auto sets = three_sets();
  SystemRun run{"sys", "D", "kac_Latn", "eng_Latn", {}};
  run.hypotheses["PARADISEC (test)"] = {"the boy went", "she sang"};
  run.hypotheses["FLORES (devtest)"] = {"market opened today", "prices rose"};
  run.hypotheses["Dialogue"] = {"how are you", ""};
  ScoreConfig serial;
  serial.exec = Exec::Serial;
  EXPECT_EQ(score_run(run, sets, serial), score_run(run, sets));
}

TEST(Harness, AlignmentErrors) {
  const auto sets = three_sets();
  SystemRun run{"sys", "P", "kac_Latn", "eng_Latn", {}};
  EXPECT_THROW(score_run(run, sets), AlignmentError);
  for (const auto& ts : sets) run.hypotheses[ts.name] = ts.corpus.references();
  run.hypotheses["Dialogue"].pop_back();
  EXPECT_THROW(score_run(run, sets), AlignmentError);
}

TEST(Harness, EmitFormats) {
  ScoreMatrix m;
  m.test_sets = {"A", "B, quoted"};
  m.rows.push_back(make_row("NLLB-600M", "P+D", "kac_Latn-eng_Latn", {{2.324, 20.336}, {12.77, 35.47}}));
  const auto csv = emit_matrix(m, MatrixFormat::Csv);
  EXPECT_NE(csv.find("2.32,20.34,12.77,35.47,7.55,27.90"), std::string::npos) << csv;
  const auto back = parse_matrix_csv(csv);
  EXPECT_EQ(back.test_sets, m.test_sets);
  EXPECT_EQ(back.rows[0].training_tag, "P+D");
  EXPECT_DOUBLE_EQ(back.rows[0].cells[0].bleu, 2.32);
  EXPECT_DOUBLE_EQ(back.rows[0].average.chrfpp, 27.90);

  const auto md = emit_matrix(m, MatrixFormat::Markdown);
  EXPECT_NE(md.find("| Model | Training data | A | B, quoted | Average |"), std::string::npos);
  EXPECT_NE(md.find("| NLLB-600M | P+D | 2.32 / 20.34 | 12.77 / 35.47 | 7.55 / 27.90 |"), std::string::npos) << md;

  const auto j = nlohmann::json::parse(emit_matrix(m, MatrixFormat::Json));
  EXPECT_EQ(j.at("columns").back(), "Average");
  EXPECT_DOUBLE_EQ(j.at("rows").at(0).at("cells").at(0).at("bleu"), 2.324);

  EXPECT_EQ(parse_matrix_format("md"), MatrixFormat::Markdown);
  EXPECT_THROW(parse_matrix_format("xlsx"), ValidationError);
  EXPECT_THROW(parse_matrix_csv("system_name,x\n"), ValidationError);
  m.rows[0].cells.pop_back();
  EXPECT_THROW(emit_matrix(m, MatrixFormat::Csv), ValidationError);
}

TEST(Harness, Manifest) {
  TempDir dir;
  write_text(dir / "p.src", "a\nb\n");
  write_text(dir / "p.ref", "the boy\nthe girl\n");
  write_text(dir / "d.src", "c\n");
  write_text(dir / "d.ref", "hello there\n");
  write_text(dir / "base.p", "the boy\nthe girl\n");
  write_text(dir / "base.d", "hello\n");
  write_text(dir / "manifest.json", R"J({
    "test_sets": [
      {"name": "PARADISEC (test)", "source": "p.src", "reference": "p.ref", "source_lang": "kac_Latn", "target_lang": "eng_Latn"},
      {"name": "Dialogue", "source": "d.src", "reference": "d.ref", "source_lang": "kac_Latn", "target_lang": "eng_Latn"}
    ],
    "runs": [
      {"system_name": "NLLB-600M", "training_tag": "Baseline",
       "direction": {"source": "kac_Latn", "target": "eng_Latn"},
       "hypotheses": {"PARADISEC (test)": "base.p", "Dialogue": "base.d"}}
    ]
  })J");
  const auto manifest = load_manifest(dir / "manifest.json");
  ASSERT_EQ(manifest.test_sets.size(), 2u);
  const auto m = score_manifest(manifest);
  ASSERT_EQ(m.rows.size(), 1u);
  EXPECT_EQ(m.rows[0].direction, "kac_Latn-eng_Latn");
  EXPECT_DOUBLE_EQ(m.rows[0].cells[0].bleu, 100.0);
  EXPECT_LT(m.rows[0].cells[1].bleu, 100.0);

  write_text(dir / "bad.json", R"J({"test_sets": [], "runs": [{"system_name": "x"}]})J");
  EXPECT_THROW(load_manifest(dir / "bad.json"), ValidationError);
  write_text(dir / "short.json", R"J({
    "test_sets": [{"name": "D", "source": "d.src", "reference": "d.ref", "source_lang": "kac_Latn", "target_lang": "eng_Latn"}],
    "runs": [{"system_name": "x", "training_tag": "D", "direction": {"source": "kac_Latn", "target": "eng_Latn"},
              "hypotheses": {"D": "base.p"}}]})J");
  EXPECT_THROW(load_manifest(dir / "short.json"), LineCountMismatch);

  auto wrong = manifest;
  wrong.runs[0].source_lang = "twi_Latn";
  EXPECT_THROW(score_manifest(wrong), AlignmentError);
}

TEST(Harness, FiveRowCsvRoundTripIsByteIdentical) {
  ScoreMatrix m;
  m.test_sets = {"PARADISEC (test)", "FLORES (devtest)", "Dialogue"};
  const std::vector<std::string> tags = {"Baseline", "D", "P+D", "P+D+N", "P+D+N+F"};
  for (std::size_t r = 0; r < tags.size(); ++r) {
    std::vector<Cell> cells;
    for (std::size_t c = 0; c < 3; ++c) {
      cells.push_back({static_cast<double>(r * 311 + c * 97 % 400) / 100.0 + 1.25,
                       static_cast<double>(r * 523 + c * 181 % 900) / 100.0 + 20.5});
    }
    m.rows.push_back(make_row("NLLB-600M", tags[r], "kac_Latn-eng_Latn", cells));
  }
  const auto csv = emit_matrix(m, MatrixFormat::Csv);
  EXPECT_EQ(io::parse_csv(csv).size(), 6u);
  const auto back = parse_matrix_csv(csv);
  ASSERT_EQ(back.rows.size(), 5u);
  EXPECT_EQ(emit_matrix(back, MatrixFormat::Csv), csv);
  for (std::size_t r = 0; r < 5; ++r) EXPECT_EQ(back.rows[r].training_tag, tags[r]);
}

TEST(Harness, TestSetOrderPermutationIsEquivariant) {
  const auto sets = three_sets();
  SystemRun run{"sys", "D", "kac_Latn", "eng_Latn", {}};
  run.hypotheses["PARADISEC (test)"] = {"the boy went", "she sang song"};
  run.hypotheses["FLORES (devtest)"] = {"the market opened today", "prices rose"};
  run.hypotheses["Dialogue"] = {"how are you", "i am fine"};
  const auto base = score_run(run, sets);
  std::vector<std::size_t> perm = {0, 1, 2};
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::vector<NamedTestSet> permuted;
    for (std::size_t i : perm) permuted.push_back(sets[i]);
    const auto cells = score_run(run, permuted);
    for (std::size_t k = 0; k < perm.size(); ++k) EXPECT_EQ(cells[k], base[perm[k]]);
    const auto avg = row_average(cells);
    EXPECT_NEAR(avg.bleu, row_average(base).bleu, 1e-12);
    EXPECT_NEAR(avg.chrfpp, row_average(base).chrfpp, 1e-12);
  }
}
