#include "mtaudit/corpus.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "mtaudit/errors.hpp"
#include "mtaudit/io.hpp"
#include "mtaudit/tokenize.hpp"
#include "mtaudit/unicode.hpp"

namespace mtaudit {

namespace {

bool is_lower_alpha(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < 'a' || c > 'z') return false;
  }
  return true;
}

bool is_script_subtag(std::string_view s) {
  if (s.size() != 4) return false;
  if (s[0] < 'A' || s[0] > 'Z') return false;
  for (std::size_t i = 1; i < 4; ++i) {
    if (s[i] < 'a' || s[i] > 'z') return false;
  }
  return true;
}

bool is_alnum_lower(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
  }
  return true;
}

std::vector<std::string_view> split_view(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string prepare_text(std::string text, std::size_t line, const LoadOptions& opts,
                         bool allow_empty) {
  if (opts.normalize_nfc) text = unicode::to_nfc(text);
  if (!allow_empty && unicode::trim(text).empty()) throw EmptyLine(line);
  return text;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace

// ---- LanguageTag -----------------------------------------------------------

bool LanguageTag::is_valid(std::string_view code) {
  const auto parts = split_view(code, '_');
  if (parts.size() != 2 && parts.size() != 3) return false;
  if (!is_lower_alpha(parts[0])) return false;
  if (!is_script_subtag(parts[1])) return false;
  if (parts.size() == 3 && !is_alnum_lower(parts[2])) return false;
  return true;
}

LanguageTag LanguageTag::parse(std::string_view code) {
  if (!is_valid(code)) {
    throw ValidationError("malformed language tag '" + std::string(code) +
                          "' (expected <lang>_<Script>[_<glottocode>])");
  }
  return LanguageTag(std::string(code));
}

std::string_view LanguageTag::language() const {
  return std::string_view(code_).substr(0, code_.find('_'));
}

std::string_view LanguageTag::script() const {
  const auto first = code_.find('_');
  const auto second = code_.find('_', first + 1);
  return std::string_view(code_).substr(first + 1, second == std::string::npos
                                                       ? std::string::npos
                                                       : second - first - 1);
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Dev:
      return "dev";
    case Split::Devtest:
      return "devtest";
    case Split::Custom:
      return "custom";
  }
  return "custom";
}

Split parse_split(std::string_view s) {
  if (s == "dev") return Split::Dev;
  if (s == "devtest") return Split::Devtest;
  if (s == "custom") return Split::Custom;
  throw ValidationError("unknown split '" + std::string(s) + "'");
}

std::vector<std::string> Corpus::sources() const {
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.source_text);
  return out;
}

std::vector<std::string> Corpus::references() const {
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.reference_text);
  return out;
}

// ---- file IO ---------------------------------------------------------------

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string content = io::read_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!unicode::is_valid_utf8(line)) throw EncodingError(lines.size());
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

Corpus load_corpus(const std::filesystem::path& source_path,
                   const std::filesystem::path& reference_path, const LanguagePair& tags,
                   Split split, const LoadOptions& opts) {
  auto src = read_lines(source_path);
  auto ref = read_lines(reference_path);
  if (src.size() != ref.size()) throw LineCountMismatch(src.size(), ref.size());

  Corpus corpus;
  corpus.name = reference_path.filename().string();
  corpus.split = split;
  corpus.pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    corpus.pairs.push_back(SentencePair{
        .id = i,
        .source_text = prepare_text(std::move(src[i]), i, opts, false),
        .reference_text = prepare_text(std::move(ref[i]), i, opts, false),
        .source_lang = tags.source,
        .target_lang = tags.target,
        .split = split,
    });
  }
  return corpus;
}

Corpus load_corpus_tsv(const std::filesystem::path& path, const LanguagePair& tags, Split split,
                       const LoadOptions& opts) {
  auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "id\tsource\treference") {
    throw ValidationError(path.string() + ": missing header 'id\\tsource\\treference'");
  }
  Corpus corpus;
  corpus.name = path.stem().string();
  corpus.split = split;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::size_t index = row - 1;
    const auto fields = split_view(lines[row], '\t');
    if (fields.size() != 3) {
      throw ValidationError(path.string() + ": row " + std::to_string(row + 1) +
                            " does not have 3 tab-separated fields");
    }
    std::size_t id = 0;
    const auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), id);
    if (ec != std::errc() || ptr != fields[0].data() + fields[0].size() || id != index) {
      throw ValidationError(path.string() + ": row " + std::to_string(row + 1) + " has id '" +
                            std::string(fields[0]) + "', expected " + std::to_string(index));
    }
    corpus.pairs.push_back(SentencePair{
        .id = index,
        .source_text = prepare_text(std::string(fields[1]), index, opts, false),
        .reference_text = prepare_text(std::string(fields[2]), index, opts, false),
        .source_lang = tags.source,
        .target_lang = tags.target,
        .split = split,
    });
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& source_path,
                 const std::filesystem::path& reference_path) {
  io::write_file_atomic(source_path, join_lines(corpus.sources()));
  io::write_file_atomic(reference_path, join_lines(corpus.references()));
}

void save_corpus_tsv(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out = "id\tsource\treference\n";
  for (const auto& p : corpus.pairs) {
    if (p.source_text.find('\t') != std::string::npos ||
        p.reference_text.find('\t') != std::string::npos) {
      throw ValidationError("pair " + std::to_string(p.id) + " contains a TAB; cannot store as TSV");
    }
    out += std::to_string(p.id) + '\t' + p.source_text + '\t' + p.reference_text + '\n';
  }
  io::write_file_atomic(path, out);
}

std::filesystem::path meta_path_for(const std::filesystem::path& tsv_path) {
  auto p = tsv_path;
  p += ".meta.json";
  return p;
}

void save_corpus_meta(const CorpusMeta& meta, const std::filesystem::path& tsv_path) {
  nlohmann::json j{{"name", meta.name},
                   {"source_lang", meta.source_lang},
                   {"target_lang", meta.target_lang},
                   {"split", std::string(to_string(meta.split))}};
  io::write_file_atomic(meta_path_for(tsv_path), j.dump(2) + "\n");
}

bool load_corpus_meta(const std::filesystem::path& tsv_path, CorpusMeta& meta) {
  const auto p = meta_path_for(tsv_path);
  if (!std::filesystem::exists(p)) return false;
  try {
    const auto j = nlohmann::json::parse(io::read_file(p));
    meta.name = j.at("name").get<std::string>();
    meta.source_lang = j.at("source_lang").get<std::string>();
    meta.target_lang = j.at("target_lang").get<std::string>();
    meta.split = parse_split(j.at("split").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
  return true;
}

std::vector<std::string> load_hypotheses(const std::filesystem::path& path,
                                         std::size_t expected_len, const LoadOptions& opts) {
  auto lines = read_lines(path);
  if (lines.size() != expected_len) throw LineCountMismatch(lines.size(), expected_len);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    lines[i] = prepare_text(std::move(lines[i]), i, opts, true);
  }
  return lines;
}

// ---- filtering -------------------------------------------------------------

void FilterConfig::validate() const {
  if (!std::isfinite(max_length_ratio) || max_length_ratio < 1.0) {
    throw ValidationError("max_length_ratio must be a finite value >= 1");
  }
}

void to_json(nlohmann::json& j, const FilterReport& r) {
  j = nlohmann::json{{"kept", r.kept},
                     {"dropped_dup", r.dropped_dup},
                     {"dropped_ratio", r.dropped_ratio},
                     {"dropped_short", r.dropped_short},
                     {"total", r.total()}};
}

FilterResult filter_corpus(const std::vector<TextPair>& pairs, const FilterConfig& cfg) {
  cfg.validate();
  FilterResult result;
  std::set<TextPair> seen;
  for (const auto& pair : pairs) {
    if (cfg.dedup && !seen.insert(pair).second) {
      ++result.report.dropped_dup;
      continue;
    }
    const auto src_n = tokenize_whitespace(pair.first).size();
    const auto tgt_n = tokenize_whitespace(pair.second).size();
    if (src_n < cfg.min_tokens || tgt_n < cfg.min_tokens) {
      ++result.report.dropped_short;
      continue;
    }
    const auto longer = std::max(src_n, tgt_n);
    const auto shorter = std::min(src_n, tgt_n);
    // Both sides empty (min_tokens == 0) counts as a 1:1 ratio.
    const bool too_far = longer > 0 && (shorter == 0 || static_cast<double>(longer) /
                                                                static_cast<double>(shorter) >
                                                            cfg.max_length_ratio);
    if (too_far) {
      ++result.report.dropped_ratio;
      continue;
    }
    result.kept.push_back(pair);
    ++result.report.kept;
  }
  return result;
}

}  // namespace mtaudit
