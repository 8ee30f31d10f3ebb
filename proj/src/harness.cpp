#include "mtaudit/harness.hpp"

#include <algorithm>
#include <cstdio>

#include "mtaudit/errors.hpp"
#include "mtaudit/io.hpp"
#include "mtaudit/kernels.hpp"

namespace mtaudit::harness {

namespace {

constexpr std::string_view kBleuSuffix = " BLEU";
constexpr std::string_view kChrfSuffix = " ChrF++";

std::string two_dp(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("matrix CSV: not a number: '" + s + "'");
  }
}

}  // namespace

std::vector<Cell> score_run(const SystemRun& run, const std::vector<NamedTestSet>& test_sets,
                            const ScoreConfig& cfg) {
  for (const auto& ts : test_sets) {
    const auto it = run.hypotheses.find(ts.name);
    if (it == run.hypotheses.end()) {
      throw AlignmentError(run.system_name + "/" + run.training_tag + ": no hypotheses for test set '" +
                           ts.name + "'");
    }
    if (it->second.size() != ts.corpus.size()) {
      throw AlignmentError(run.system_name + "/" + run.training_tag + ": " +
                           std::to_string(it->second.size()) + " hypotheses for '" + ts.name +
                           "' which has " + std::to_string(ts.corpus.size()) + " pairs");
    }
  }
  std::vector<Cell> cells(test_sets.size());
  for_each_index(test_sets.size(), cfg.exec, [&](std::size_t i) {
    const auto& ts = test_sets[i];
    const auto& hyps = run.hypotheses.at(ts.name);
    const auto refs = ts.corpus.references();
    cells[i].bleu = kernels::corpus_bleu(hyps, refs, cfg.bleu, Exec::Serial).score;
    cells[i].chrfpp = kernels::corpus_chrf(hyps, refs, cfg.chrf, Exec::Serial).score;
  });
  return cells;
}

Cell row_average(const std::vector<Cell>& cells) {
  Cell avg;
  if (cells.empty()) return avg;
  for (const auto& c : cells) {
    avg.bleu += c.bleu;
    avg.chrfpp += c.chrfpp;
  }
  avg.bleu /= static_cast<double>(cells.size());
  avg.chrfpp /= static_cast<double>(cells.size());
  return avg;
}

MatrixRow make_row(std::string system_name, std::string training_tag, std::string direction,
                   std::vector<Cell> cells) {
  MatrixRow row{std::move(system_name), std::move(training_tag), std::move(direction),
                std::move(cells), {}};
  row.average = row_average(row.cells);
  return row;
}

MatrixFormat parse_matrix_format(std::string_view s) {
  if (s == "csv") return MatrixFormat::Csv;
  if (s == "json") return MatrixFormat::Json;
  if (s == "markdown" || s == "md") return MatrixFormat::Markdown;
  throw ValidationError("unknown matrix format '" + std::string(s) + "'");
}

std::string emit_matrix(const ScoreMatrix& m, MatrixFormat format) {
  for (const auto& row : m.rows) {
    if (row.cells.size() != m.test_sets.size()) {
      throw ValidationError("matrix row '" + row.system_name + "' has " +
                            std::to_string(row.cells.size()) + " cells for " +
                            std::to_string(m.test_sets.size()) + " test sets");
    }
  }
  switch (format) {
    case MatrixFormat::Csv: {
      std::vector<std::string> header = {"system_name", "training_tag", "direction"};
      for (const auto& ts : m.test_sets) {
        header.push_back(ts + std::string(kBleuSuffix));
        header.push_back(ts + std::string(kChrfSuffix));
      }
      header.push_back("Average" + std::string(kBleuSuffix));
      header.push_back("Average" + std::string(kChrfSuffix));
      std::string out = io::csv_row(header);
      for (const auto& row : m.rows) {
        std::vector<std::string> fields = {row.system_name, row.training_tag, row.direction};
        for (const auto& c : row.cells) {
          fields.push_back(two_dp(c.bleu));
          fields.push_back(two_dp(c.chrfpp));
        }
        fields.push_back(two_dp(row.average.bleu));
        fields.push_back(two_dp(row.average.chrfpp));
        out += io::csv_row(fields);
      }
      return out;
    }
    case MatrixFormat::Json: {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& row : m.rows) {
        nlohmann::json cells = nlohmann::json::array();
        for (std::size_t i = 0; i < row.cells.size(); ++i) {
          cells.push_back({{"test_set", m.test_sets[i]},
                           {"bleu", row.cells[i].bleu},
                           {"chrfpp", row.cells[i].chrfpp}});
        }
        rows.push_back({{"system_name", row.system_name},
                        {"training_tag", row.training_tag},
                        {"direction", row.direction},
                        {"cells", cells},
                        {"average", {{"bleu", row.average.bleu}, {"chrfpp", row.average.chrfpp}}}});
      }
      nlohmann::json columns = m.test_sets;
      columns.push_back("Average");
      return nlohmann::json{{"test_sets", m.test_sets}, {"columns", columns}, {"rows", rows}}.dump(2) +
             "\n";
    }
    case MatrixFormat::Markdown: {
      std::string out = "| Model | Training data |";
      std::string rule = "|---|---|";
      for (const auto& ts : m.test_sets) {
        out += " " + ts + " |";
        rule += "---|";
      }
      out += " Average |\n" + rule + "---|\n";
      for (const auto& row : m.rows) {
        out += "| " + row.system_name + " | " + row.training_tag + " |";
        for (const auto& c : row.cells) out += " " + two_dp(c.bleu) + " / " + two_dp(c.chrfpp) + " |";
        out += " " + two_dp(row.average.bleu) + " / " + two_dp(row.average.chrfpp) + " |\n";
      }
      return out;
    }
  }
  return {};
}

ScoreMatrix parse_matrix_csv(std::string_view csv) {
  const auto rows = io::parse_csv(csv);
  if (rows.empty()) throw ValidationError("matrix CSV is empty");
  const auto& header = rows[0];
  if (header.size() < 5 || (header.size() - 3) % 2 != 0 || header[0] != "system_name" ||
      header[1] != "training_tag" || header[2] != "direction") {
    throw ValidationError("matrix CSV has an unexpected header");
  }
  ScoreMatrix m;
  const std::size_t pairs = (header.size() - 3) / 2;
  for (std::size_t k = 0; k < pairs; ++k) {
    const auto& b = header[3 + 2 * k];
    const auto& c = header[4 + 2 * k];
    if (!ends_with(b, kBleuSuffix) || !ends_with(c, kChrfSuffix)) {
      throw ValidationError("matrix CSV column pair " + std::to_string(k) + " is malformed");
    }
    const auto name = b.substr(0, b.size() - kBleuSuffix.size());
    if (c.substr(0, c.size() - kChrfSuffix.size()) != name) {
      throw ValidationError("matrix CSV column names disagree: '" + b + "' / '" + c + "'");
    }
    if (k + 1 == pairs) {
      if (name != "Average") throw ValidationError("matrix CSV must end with Average columns");
    } else {
      m.test_sets.push_back(name);
    }
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != header.size()) {
      throw ValidationError("matrix CSV row " + std::to_string(r + 1) + " has the wrong width");
    }
    MatrixRow row;
    row.system_name = f[0];
    row.training_tag = f[1];
    row.direction = f[2];
    for (std::size_t k = 0; k + 1 < pairs; ++k) {
      row.cells.push_back({parse_double(f[3 + 2 * k]), parse_double(f[4 + 2 * k])});
    }
    row.average = {parse_double(f[f.size() - 2]), parse_double(f[f.size() - 1])};
    m.rows.push_back(std::move(row));
  }
  return m;
}

// ---- manifest ------------------------------------------------------------------

Manifest load_manifest(const std::filesystem::path& path, const LoadOptions& opts) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  Manifest m;
  try {
    for (const auto& ts : j.at("test_sets")) {
      const LanguagePair tags{LanguageTag::parse(ts.at("source_lang").get<std::string>()),
                              LanguageTag::parse(ts.at("target_lang").get<std::string>())};
      const auto split = parse_split(ts.value("split", std::string("custom")));
      NamedTestSet named{ts.at("name").get<std::string>(),
                         load_corpus(resolve(ts.at("source").get<std::string>()),
                                     resolve(ts.at("reference").get<std::string>()), tags, split,
                                     opts)};
      named.corpus.name = named.name;
      m.test_sets.push_back(std::move(named));
    }
    for (const auto& rj : j.at("runs")) {
      SystemRun run;
      run.system_name = rj.at("system_name").get<std::string>();
      run.training_tag = rj.at("training_tag").get<std::string>();
      run.source_lang = rj.at("direction").at("source").get<std::string>();
      run.target_lang = rj.at("direction").at("target").get<std::string>();
      LanguageTag::parse(run.source_lang);
      LanguageTag::parse(run.target_lang);
      for (const auto& [name, file] : rj.at("hypotheses").items()) {
        const auto ts = std::find_if(m.test_sets.begin(), m.test_sets.end(),
                                     [&](const NamedTestSet& t) { return t.name == name; });
        if (ts == m.test_sets.end()) {
          throw ValidationError("run '" + run.system_name + "' names unknown test set '" + name + "'");
        }
        run.hypotheses[name] =
            load_hypotheses(resolve(file.get<std::string>()), ts->corpus.size(), opts);
      }
      m.runs.push_back(std::move(run));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return m;
}

ScoreMatrix score_manifest(const Manifest& manifest, const ScoreConfig& cfg) {
  ScoreMatrix matrix;
  for (const auto& ts : manifest.test_sets) matrix.test_sets.push_back(ts.name);
  for (const auto& run : manifest.runs) {
    for (const auto& ts : manifest.test_sets) {
      const auto& first = ts.corpus.pairs.empty() ? nullptr : &ts.corpus.pairs.front();
      if (first && (first->source_lang.code() != run.source_lang ||
                    first->target_lang.code() != run.target_lang)) {
        throw AlignmentError("run '" + run.system_name + "/" + run.training_tag + "' direction " +
                             run.source_lang + "-" + run.target_lang + " does not match test set '" +
                             ts.name + "' (" + first->source_lang.code() + "-" +
                             first->target_lang.code() + ")");
      }
    }
    matrix.rows.push_back(make_row(run.system_name, run.training_tag,
                                   run.source_lang + "-" + run.target_lang,
                                   score_run(run, manifest.test_sets, cfg)));
  }
  return matrix;
}

}  // namespace mtaudit::harness
