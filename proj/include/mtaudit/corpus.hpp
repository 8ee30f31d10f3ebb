#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace mtaudit {

enum class ScriptClass { Latin, NonLatin };

// FLORES+-style code: <lang>_<Script>[_<glottocode>], e.g. "kac_Latn",
// "twi_Latn_asan1239".
class LanguageTag {
 public:
  // Throws ValidationError on a malformed code.
  static LanguageTag parse(std::string_view code);
  static bool is_valid(std::string_view code);

  const std::string& code() const { return code_; }
  std::string_view language() const;
  std::string_view script() const;
  ScriptClass script_class() const { return script() == "Latn" ? ScriptClass::Latin : ScriptClass::NonLatin; }

  friend bool operator==(const LanguageTag&, const LanguageTag&) = default;

 private:
  explicit LanguageTag(std::string code) : code_(std::move(code)) {}
  std::string code_;
};

struct LanguagePair {
  LanguageTag source;
  LanguageTag target;
};

enum class Split { Dev, Devtest, Custom };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

struct SentencePair {
  std::size_t id = 0;
  std::string source_text;
  std::string reference_text;
  LanguageTag source_lang;
  LanguageTag target_lang;
  Split split = Split::Custom;
};

struct Corpus {
  std::string name;
  Split split = Split::Custom;
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  std::vector<std::string> sources() const;
  std::vector<std::string> references() const;
};

struct LoadOptions {
  // Turn off for bit-exact replication of un-normalized data.
  bool normalize_nfc = true;
};

// Paired one-sentence-per-line files (LF or CRLF, trailing newline optional).
Corpus load_corpus(const std::filesystem::path& source_path,
                   const std::filesystem::path& reference_path, const LanguagePair& tags,
                   Split split, const LoadOptions& opts = {});

// TSV with header "id\tsource\treference"; ids must equal 0-based row index.
Corpus load_corpus_tsv(const std::filesystem::path& path, const LanguagePair& tags, Split split,
                       const LoadOptions& opts = {});

void save_corpus(const Corpus& corpus, const std::filesystem::path& source_path,
                 const std::filesystem::path& reference_path);
void save_corpus_tsv(const Corpus& corpus, const std::filesystem::path& path);

// Sidecar metadata written next to a TSV store: name, tags, split.
struct CorpusMeta {
  std::string name;
  std::string source_lang;
  std::string target_lang;
  Split split = Split::Custom;
};
void save_corpus_meta(const CorpusMeta& meta, const std::filesystem::path& tsv_path);
// Returns false when no sidecar exists.
bool load_corpus_meta(const std::filesystem::path& tsv_path, CorpusMeta& meta);
std::filesystem::path meta_path_for(const std::filesystem::path& tsv_path);

// One hypothesis per line; empty lines are kept as empty strings.
std::vector<std::string> load_hypotheses(const std::filesystem::path& path,
                                         std::size_t expected_len,
                                         const LoadOptions& opts = {});

// Raw lines with CR/LF stripped; throws EncodingError on invalid UTF-8.
std::vector<std::string> read_lines(const std::filesystem::path& path);

// ---- filtering -------------------------------------------------------------

struct FilterConfig {
  double max_length_ratio = 2.0;
  std::size_t min_tokens = 1;
  bool dedup = true;

  // Throws ValidationError when max_length_ratio < 1 or not finite.
  void validate() const;
};

struct FilterReport {
  std::size_t kept = 0;
  std::size_t dropped_dup = 0;
  std::size_t dropped_ratio = 0;
  std::size_t dropped_short = 0;

  std::size_t total() const { return kept + dropped_dup + dropped_ratio + dropped_short; }
};

void to_json(nlohmann::json& j, const FilterReport& r);

using TextPair = std::pair<std::string, std::string>;

struct FilterResult {
  std::vector<TextPair> kept;
  FilterReport report;
};

// Drops, in this precedence: exact (src, tgt) duplicates of an earlier pair,
// pairs with a side shorter than min_tokens, then pairs whose whitespace
// token-length ratio exceeds max_length_ratio. Order of survivors is kept.
FilterResult filter_corpus(const std::vector<TextPair>& pairs, const FilterConfig& cfg);

}  // namespace mtaudit
