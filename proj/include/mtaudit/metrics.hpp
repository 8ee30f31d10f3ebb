#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mtaudit/tokenize.hpp"

namespace mtaudit::metrics {

// ---- BLEU ------------------------------------------------------------------

enum class Smoothing { ExponentialDecay, None };

struct BleuConfig {
  int max_order = 4;
  // Empty means uniform 1/max_order.
  std::vector<double> weights;
  Smoothing smoothing = Smoothing::ExponentialDecay;
  TokenScheme tokenizer;

  // Throws ValidationError.
  void validate() const;
  std::vector<double> effective_weights() const;
};

// Additive sufficient statistics; corpus BLEU sums these over sentences.
struct BleuStats {
  std::vector<std::size_t> matches;
  std::vector<std::size_t> totals;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
  friend bool operator==(const BleuStats&, const BleuStats&) = default;
};

struct BleuBreakdown {
  double score = 0.0;  // [0, 100]
  double bp = 0.0;
  std::size_t hyp_len = 0;  // c
  std::size_t ref_len = 0;  // r
  std::vector<double> precisions;  // p_n on the 0-100 scale, smoothed
  std::vector<std::size_t> matches;
  std::vector<std::size_t> totals;
  // Orders with at least one hypothesis n-gram; higher orders are skipped.
  int effective_order = 0;
};

// Clipped n-gram matches against the max count over references; r is the
// reference length closest to c, ties broken toward the shorter one.
BleuStats bleu_stats(std::span<const std::string> hyp_tokens,
                     std::span<const TokenList> ref_tokens, int max_order);

BleuBreakdown bleu_from_stats(const BleuStats& stats, const BleuConfig& cfg);

// Throws EmptyReference when `references` is empty or every reference
// tokenizes to nothing.
BleuBreakdown bleu(std::string_view hypothesis, std::span<const std::string> references,
                   const BleuConfig& cfg = {});

// Recomputes the score from a breakdown's stored c, r, p_n.
double bleu_score_from_fields(const BleuBreakdown& b, const BleuConfig& cfg = {});

void to_json(nlohmann::json& j, const BleuBreakdown& b);

// ---- ChrF++ ----------------------------------------------------------------

struct ChrfConfig {
  double beta = 2.0;
  int word_order = 2;
  int char_order = 6;
  bool remove_whitespace_for_char_ngrams = true;

  void validate() const;
};

struct NgramLevelStats {
  std::size_t hyp = 0;
  std::size_t ref = 0;
  std::size_t matches = 0;
  friend bool operator==(const NgramLevelStats&, const NgramLevelStats&) = default;
};

struct ChrfStats {
  std::vector<NgramLevelStats> chars;  // index n-1
  std::vector<NgramLevelStats> words;

  ChrfStats& operator+=(const ChrfStats& other);
  friend bool operator==(const ChrfStats&, const ChrfStats&) = default;
};

struct ChrfBreakdown {
  double score = 0.0;  // [0, 100]
  double precision = 0.0;  // P in [0, 1]
  double recall = 0.0;     // R in [0, 1]
  std::vector<double> char_precisions;
  std::vector<double> char_recalls;
  std::vector<double> word_precisions;
  std::vector<double> word_recalls;
  int effective_char_order = 0;
  int effective_word_order = 0;
};

ChrfStats chrf_stats(std::string_view hypothesis, std::string_view reference,
                     const ChrfConfig& cfg = {});

// A level is dropped when either side has no n-grams of that order (the
// text is shorter than n). Zero-match levels enter the average as 0.
ChrfBreakdown chrf_from_stats(const ChrfStats& stats, const ChrfConfig& cfg = {});

ChrfBreakdown chrfpp(std::string_view hypothesis, std::string_view reference,
                     const ChrfConfig& cfg = {});

void to_json(nlohmann::json& j, const ChrfBreakdown& b);

// ---- edit rates ------------------------------------------------------------

enum class EditUnit { Character, Word };

struct EditBreakdown {
  std::size_t distance = 0;  // includes shift count for TER with shifts
  std::size_t ref_units = 0;
  double rate = 0.0;
  EditUnit unit = EditUnit::Character;
  std::size_t shifts = 0;
};

void to_json(nlohmann::json& j, const EditBreakdown& b);

// Two-row Levenshtein DP with unit costs.
template <typename T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Edit distance over Unicode scalar values / reference length.
EditBreakdown cer(std::string_view hypothesis, std::string_view reference);

struct TerConfig {
  TokenScheme tokenizer;
  bool shifts = false;
  // Longest block considered for a shift.
  std::size_t max_shift_size = 10;
  // Upper bound on how far (in tokens) a block may move.
  std::size_t max_shift_distance = 50;
};

EditBreakdown ter(std::string_view hypothesis, std::string_view reference,
                  const TerConfig& cfg = {});

// Token-level TER core, exposed for the corpus kernels and tests.
EditBreakdown ter_tokens(std::span<const std::string> hyp, std::span<const std::string> ref,
                         const TerConfig& cfg = {});

}  // namespace mtaudit::metrics
