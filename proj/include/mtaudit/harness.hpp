#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mtaudit/corpus.hpp"
#include "mtaudit/metrics.hpp"
#include "mtaudit/parallel.hpp"

namespace mtaudit::harness {

// Externally produced system output for a set of test sets.
struct SystemRun {
  std::string system_name;
  std::string training_tag;  // "Baseline", "D", "P+D+N", ...
  std::string source_lang;
  std::string target_lang;
  std::map<std::string, std::vector<std::string>> hypotheses;  // test set -> lines
};

struct NamedTestSet {
  std::string name;
  Corpus corpus;
};

struct Cell {
  double bleu = 0.0;
  double chrfpp = 0.0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct MatrixRow {
  std::string system_name;
  std::string training_tag;
  std::string direction;  // "src_Latn-tgt_Latn"
  std::vector<Cell> cells;
  Cell average;
};

struct ScoreMatrix {
  std::vector<std::string> test_sets;  // declared order; "Average" is implicit
  std::vector<MatrixRow> rows;
};

struct ScoreConfig {
  metrics::BleuConfig bleu;
  metrics::ChrfConfig chrf;
  Exec exec = Exec::Parallel;
};

// Corpus-level BLEU and ChrF++ per test set in declared order. Throws
// AlignmentError when a test set has no hypotheses or the counts differ.
std::vector<Cell> score_run(const SystemRun& run, const std::vector<NamedTestSet>& test_sets,
                            const ScoreConfig& cfg = {});

// Unweighted mean of the cells.
Cell row_average(const std::vector<Cell>& cells);
MatrixRow make_row(std::string system_name, std::string training_tag, std::string direction,
                   std::vector<Cell> cells);

enum class MatrixFormat { Csv, Json, Markdown };
MatrixFormat parse_matrix_format(std::string_view s);

// Cells are rendered with 2 decimals; markdown cells read "B / C".
std::string emit_matrix(const ScoreMatrix& matrix, MatrixFormat format);
// Parses the CSV layout written by emit_matrix.
ScoreMatrix parse_matrix_csv(std::string_view csv);

// ---- manifest ------------------------------------------------------------------

// {
//   "test_sets": [{"name", "source", "reference", "source_lang", "target_lang",
//                  "split"?}],
//   "runs": [{"system_name", "training_tag",
//             "direction": {"source", "target"},
//             "hypotheses": {"<test set>": "<path>", ...}}]
// }
// Relative paths resolve against the manifest's directory.
struct Manifest {
  std::vector<NamedTestSet> test_sets;
  std::vector<SystemRun> runs;
};

Manifest load_manifest(const std::filesystem::path& path, const LoadOptions& opts = {});

ScoreMatrix score_manifest(const Manifest& manifest, const ScoreConfig& cfg = {});

}  // namespace mtaudit::harness
