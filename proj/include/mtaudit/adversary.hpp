#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mtaudit/corpus.hpp"
#include "mtaudit/metrics.hpp"
#include "mtaudit/parallel.hpp"

namespace mtaudit::adversary {

enum class ExtractorMode { Heuristic, Gazetteer, ExternalLLM };

std::string_view to_string(ExtractorMode m);
ExtractorMode parse_extractor_mode(std::string_view s);

struct EntityExtraction {
  std::size_t pair_id = 0;
  // Surface forms in source order; duplicates preserved.
  std::vector<std::string> entities;
  ExtractorMode extractor = ExtractorMode::Heuristic;
};

// Case-insensitive word list.
class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(const std::vector<std::string>& words);

  // Small bundled list of English function words and common sentence openers.
  static const StopwordList& english();
  // One word per line; blank lines and lines starting with '#' are skipped.
  static StopwordList load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string, std::less<>> words_;
};

// User-supplied entity list matched longest-first on token boundaries.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(const std::vector<std::string>& entries);
  static Gazetteer load(const std::filesystem::path& path);

  std::size_t size() const { return entries_.size(); }
  std::size_t max_tokens() const { return max_tokens_; }
  bool contains(const std::vector<std::string>& tokens) const;

 private:
  std::set<std::vector<std::string>> entries_;
  std::size_t max_tokens_ = 0;
};

// Chat-completion transport used by the ExternalLLM extractor.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Throws LlmUnavailable on transport failure.
  virtual std::string complete(const std::string& prompt) = 0;
};

// Extraction prompt with {other_in_context_examples} and {text} filled in.
std::string build_ne_prompt(std::string_view text, std::string_view other_examples = {});
// Splits a whitespace-joined model reply into entity tokens.
std::vector<std::string> parse_llm_entities(std::string_view reply);

struct ExtractorSettings {
  ExtractorMode mode = ExtractorMode::Heuristic;
  const StopwordList* stopwords = nullptr;  // defaults to english()
  const Gazetteer* gazetteer = nullptr;     // required for Gazetteer mode
  LlmClient* llm = nullptr;                 // required for ExternalLLM mode
  std::string llm_examples;                 // extra in-context examples
};

// Heuristic mode: maximal runs of capitalized non-stopword tokens (token
// edges stripped of punctuation and possessive 's; trailing punctuation
// ends a run); numeric date/time tokens adjoining a run join it. A
// sentence-initial single-token run is dropped when its lowercase form also
// occurs elsewhere in the sentence, unless it recurs capitalized later.
// Throws ValidationError for Gazetteer/ExternalLLM modes without their
// backing resource, LlmUnavailable when the LLM call fails.
EntityExtraction extract_entities(std::string_view text, const ExtractorSettings& settings = {},
                                  std::size_t pair_id = 0);

enum class Scenario { Empty, NonEmpty };
std::string_view to_string(Scenario s);

struct AdversarialHypothesis {
  std::size_t pair_id = 0;
  std::string text;
  Scenario scenario = Scenario::Empty;
};

struct PaddingConfig {
  std::string token = "dummy";
  std::size_t count = 50;
};

// No entities -> ("", Empty). Otherwise entities joined by single spaces
// followed by `count` copies of " <token>".
AdversarialHypothesis build_adversarial(const EntityExtraction& extraction,
                                        const PaddingConfig& padding = {});

// ---- audit ---------------------------------------------------------------------

struct AuditConfig {
  ExtractorSettings extractor;
  PaddingConfig padding;
  metrics::BleuConfig bleu;
  metrics::ChrfConfig chrf;
  Exec exec = Exec::Parallel;
  // Reject corpora whose source language is not English.
  bool require_english_source = true;
};

struct SentenceAudit {
  std::size_t pair_id = 0;
  Scenario scenario = Scenario::Empty;
  std::vector<std::string> entities;
  std::string hypothesis;
  double bleu = 0.0;
  double chrfpp = 0.0;
  double bp = 0.0;
  std::size_t unigram_matches = 0;
  std::optional<std::string> error;  // set when this pair could not be scored
};

struct LanguageAudit {
  std::string corpus_name;
  std::string language;  // tag code
  std::size_t pairs = 0;
  std::size_t scored = 0;
  double mean_bleu = 0.0;    // mean of sentence BLEU over scored pairs
  double mean_chrfpp = 0.0;  // mean of sentence ChrF++ over scored pairs
  double corpus_bleu = 0.0;
  double corpus_chrfpp = 0.0;
  double fraction_nonzero = 0.0;  // share of scored pairs with BLEU > 0
  std::vector<SentenceAudit> sentences;
};

struct AuditReport {
  std::vector<LanguageAudit> languages;
};

// Throws ValidationError when a corpus target is not Latin-script or (by
// default) its source is not English. Per-pair extraction/scoring failures
// are recorded on the sentence and excluded from the aggregates.
AuditReport run_audit(std::span<const Corpus> corpora, const AuditConfig& cfg = {});

void to_json(nlohmann::json& j, const SentenceAudit& s);
void to_json(nlohmann::json& j, const LanguageAudit& l);
void to_json(nlohmann::json& j, const AuditReport& r);
void from_json(const nlohmann::json& j, AuditReport& r);

// One row per language: code, mean_bleu, mean_chrfpp, fraction_nonzero, ...
std::string summary_csv(const AuditReport& report);
// Long format: one row per (language, pair).
std::string sentences_csv(const AuditReport& report);

}  // namespace mtaudit::adversary
