#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mtaudit/corpus.hpp"
#include "mtaudit/tokenize.hpp"

namespace mtaudit::annotation {

enum class ErrorCategory {
  Correct,
  WrongGrammar,
  WrongPunctuation,
  WrongSpelling,
  WrongCapitalization,
  InaccurateAddition,
  InaccurateOmission,
  Mistranslation,
  UnnaturalTranslation,
  UntranslatedText,
  WrongRegister,
  Other,
};

inline constexpr std::array<ErrorCategory, 12> kAllCategories = {
    ErrorCategory::Correct,           ErrorCategory::WrongGrammar,
    ErrorCategory::WrongPunctuation,  ErrorCategory::WrongSpelling,
    ErrorCategory::WrongCapitalization, ErrorCategory::InaccurateAddition,
    ErrorCategory::InaccurateOmission, ErrorCategory::Mistranslation,
    ErrorCategory::UnnaturalTranslation, ErrorCategory::UntranslatedText,
    ErrorCategory::WrongRegister,     ErrorCategory::Other,
};

// Display names as used in the assessment statistics table.
std::string_view display_name(ErrorCategory c);
// Accepts the display name or the enumerator spelling, case-insensitively.
std::optional<ErrorCategory> parse_category(std::string_view s);

enum class Severity { Minor, Major, Critical };

std::string_view to_string(Severity s);
std::optional<Severity> parse_severity(std::string_view s);

// Per-sentence error tally that overrides the default one-error-per-category
// counting for MQM scoring.
struct ErrorTally {
  std::size_t minor = 0;
  std::size_t major = 0;
  std::size_t critical = 0;
  friend bool operator==(const ErrorTally&, const ErrorTally&) = default;
};

using Timestamp = std::chrono::sys_seconds;

struct AnnotationRecord {
  std::size_t pair_id = 0;
  std::set<ErrorCategory> categories;
  std::optional<Severity> severity;
  std::optional<std::string> corrected_translation;
  std::optional<std::string> comments;
  std::string annotator_id;
  Timestamp timestamp{};
  std::optional<ErrorTally> error_tally;

  bool is_correct() const { return categories.count(ErrorCategory::Correct) > 0; }
  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

std::string format_timestamp(Timestamp t);
// ISO-8601 UTC, "YYYY-MM-DDTHH:MM:SSZ". Throws ValidationError.
Timestamp parse_timestamp(std::string_view s);
Timestamp now();

void to_json(nlohmann::json& j, const AnnotationRecord& r);
// Throws ValidationError on missing/ill-typed fields or unknown labels.
void from_json(const nlohmann::json& j, AnnotationRecord& r);

// ---- validation --------------------------------------------------------------

enum class ViolationCode { EmptyCategories, CorrectNotExclusive, SeverityRequired, SeverityOnCorrect };

struct Violation {
  ViolationCode code;
  std::string message;
};

std::string_view to_string(ViolationCode c);
void to_json(nlohmann::json& j, const Violation& v);

// All rule violations for one record; empty means valid.
std::vector<Violation> validate(const AnnotationRecord& record);

// ---- scores ------------------------------------------------------------------

struct SeverityCounts {
  std::size_t correct = 0;   // C
  std::size_t minor = 0;     // E_m
  std::size_t major = 0;     // E_M
  std::size_t critical = 0;  // E_c

  std::size_t total() const { return correct + minor + major + critical; }
  friend bool operator==(const SeverityCounts&, const SeverityCounts&) = default;
};

struct ErrorCounts {
  std::size_t minor = 0;     // e_m
  std::size_t major = 0;     // e_M
  std::size_t critical = 0;  // e_c
  std::size_t words = 0;     // W
};

// 100 * (3C + 2E_m + E_M) / (3 * total). Throws ValidationError on zero total.
double tqs(const SeverityCounts& counts);

// 100 * (1 - (e_m + 5 e_M + 10 e_c) / W), unclamped. Throws ValidationError
// when W == 0.
double tqs_mqm(const ErrorCounts& counts);

struct AggregateOptions {
  // Tokenizer used for W and for TER against corrected translations.
  TokenScheme tokenizer;
};

struct AggregateStats {
  std::size_t records = 0;
  std::map<ErrorCategory, std::size_t> category_histogram;  // all 12 keys
  SeverityCounts severity_counts;
  ErrorCounts error_counts;
  std::optional<double> tqs;
  std::optional<double> tqs_mqm;
  std::size_t corrected = 0;
  std::optional<double> cer;  // percent, micro-averaged
  std::optional<double> ter;
};

void to_json(nlohmann::json& j, const AggregateStats& s);

// Throws ValidationError (DuplicateRecord / UnknownPairId wording) when two
// records share (pair_id, annotator_id) or a pair_id is out of range.
AggregateStats aggregate(std::span<const AnnotationRecord> records,
                         std::span<const std::string> references,
                         const AggregateOptions& opts = {});
AggregateStats aggregate(std::span<const AnnotationRecord> records, const Corpus& corpus,
                         const AggregateOptions& opts = {});

// Spreadsheet-style export: id, source, reference, evaluation, severity,
// corrected translation, comments, annotator, timestamp.
std::string export_csv(std::span<const AnnotationRecord> records, const Corpus& corpus);

}  // namespace mtaudit::annotation
